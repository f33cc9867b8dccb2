#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace seamkit {

// Deterministic RNG: mt19937_64 supplies the bits, the floating-point
// transforms are written out explicitly so sequences are identical across
// standard libraries (std::uniform_real_distribution and friends are not
// guaranteed portable).
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double u01() {
        return double(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // uniform integer in [lo, hi] inclusive, via rejection sampling
    int64_t uniform_int(int64_t lo, int64_t hi) {
        uint64_t range = uint64_t(hi - lo) + 1;
        if (range == 0) return int64_t(eng_()); // full 64-bit span
        uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        uint64_t v;
        do { v = eng_(); } while (v >= limit);
        return lo + int64_t(v % range);
    }

    // standard normal via Box-Muller; consumes two uniforms per pair
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do { u1 = u01(); } while (u1 <= 0.0);
        u2 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// 64-bit FNV-1a, used to derive independent substreams from a master seed
inline uint64_t hash_combine(uint64_t seed, const std::string& tag) {
    uint64_t h = 14695981039346656037ull;
    auto mix = [&](uint8_t byte) {
        h ^= byte;
        h *= 1099511628211ull;
    };
    for (int i = 0; i < 8; ++i) mix(uint8_t(seed >> (8 * i)));
    for (char c : tag) mix(uint8_t(c));
    return h;
}

inline uint64_t hash_combine(uint64_t seed, const std::string& tag, uint64_t a, uint64_t b = 0) {
    uint64_t h = hash_combine(seed, tag);
    auto mix = [&](uint8_t byte) {
        h ^= byte;
        h *= 1099511628211ull;
    };
    for (int i = 0; i < 8; ++i) mix(uint8_t(a >> (8 * i)));
    for (int i = 0; i < 8; ++i) mix(uint8_t(b >> (8 * i)));
    return h;
}

// Named substream: e.g. derive_rng(seed, "augment", step, idx). Distinct
// purposes never share state, so enabling one consumer does not shift the
// draws seen by another.
inline Rng derive_rng(uint64_t seed, const std::string& purpose, uint64_t a = 0, uint64_t b = 0) {
    return Rng(hash_combine(seed, purpose, a, b));
}

} // namespace seamkit
