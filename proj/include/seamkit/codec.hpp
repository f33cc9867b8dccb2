#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "seam.hpp"

namespace seamkit {

// Coordinate tokenizer: uniform quantization of [-1,1] into `bins` levels plus
// three control tokens appended after the coordinate vocabulary.
struct CodecConfig {
    int bins = 1024;
    int max_segments = 1024;

    int bos() const { return bins; }
    int eos() const { return bins + 1; }
    int pad() const { return bins + 2; }
    int vocab_size() const { return bins + 3; }
};

struct TokenStream {
    std::vector<int> tokens;

    size_t size() const { return tokens.size(); }
    bool operator==(const TokenStream& o) const { return tokens == o.tokens; }
};

inline int quantize(double coord, const CodecConfig& cfg = {}) {
    if (!std::isfinite(coord)) throw ValidationError("cannot quantize non-finite coordinate");
    if (coord < -1.0 - 1e-9 || coord > 1.0 + 1e-9)
        throw ValidationError("coordinate " + std::to_string(coord) + " outside [-1,1]");
    coord = std::clamp(coord, -1.0, 1.0);
    int bin = int(std::floor((coord + 1.0) / 2.0 * cfg.bins));
    return std::clamp(bin, 0, cfg.bins - 1);
}

// Returns the bin center, bounding reconstruction error to half a bin width.
inline double dequantize(int bin, const CodecConfig& cfg = {}) {
    if (bin < 0 || bin >= cfg.bins)
        throw ValidationError("bin " + std::to_string(bin) + " out of range [0," +
                              std::to_string(cfg.bins - 1) + "]");
    return -1.0 + (bin + 0.5) * (2.0 / cfg.bins);
}

inline Vec3 snap_to_bins(const Vec3& p, const CodecConfig& cfg = {}) {
    return {dequantize(quantize(p.x, cfg), cfg), dequantize(quantize(p.y, cfg), cfg),
            dequantize(quantize(p.z, cfg), cfg)};
}

namespace detail {

// Canonicalize without the emptiness check: swap endpoints into yzx order,
// drop degenerate segments, sort, dedup.
inline SeamSequence canonicalize_segments(std::vector<SeamSegment> segments) {
    std::vector<SeamSegment> kept;
    kept.reserve(segments.size());
    for (SeamSegment s : segments) {
        if (s.degenerate()) continue;
        s.canonicalize();
        kept.push_back(s);
    }
    std::sort(kept.begin(), kept.end(), segment_less);
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    return SeamSequence{std::move(kept)};
}

} // namespace detail

// Deterministic ordering contract: endpoints swapped so head precedes tail in
// yzx order, segments ascending by (head, tail) key, exact duplicates removed.
// Inputs are expected to carry bin-center coordinates (snap first) so that the
// ordering is stable under encode/decode round-trips.
inline SeamSequence canonical_sort(const std::vector<SeamSegment>& segments) {
    if (segments.empty()) throw ValidationError("canonical_sort of empty segment list");
    SeamSequence seq = detail::canonicalize_segments(segments);
    if (seq.empty()) throw ValidationError("all seam segments are degenerate");
    return seq;
}

// Snap raw endpoints to bin centers, then canonicalize. The standard path from
// extracted/model seams to a codec-ready sequence.
inline SeamSequence make_canonical(const std::vector<SeamSegment>& raw,
                                   const CodecConfig& cfg = {}) {
    std::vector<SeamSegment> snapped(raw.size());
    for (size_t i = 0; i < raw.size(); ++i)
        snapped[i] = {snap_to_bins(raw[i].head, cfg), snap_to_bins(raw[i].tail, cfg)};
    return canonical_sort(snapped);
}

// Layout: BOS, then 6 coordinates per segment (x_h,y_h,z_h,x_t,y_t,z_t), EOS.
inline TokenStream encode(const SeamSequence& seq, const CodecConfig& cfg = {}) {
    if (seq.empty()) throw ValidationError("cannot encode an empty seam sequence");
    if (int(seq.count()) > cfg.max_segments)
        throw ValidationError("seam has " + std::to_string(seq.count()) +
                              " segments, exceeding the configured maximum of " +
                              std::to_string(cfg.max_segments));
    TokenStream out;
    out.tokens.reserve(6 * seq.count() + 2);
    out.tokens.push_back(cfg.bos());
    for (const SeamSegment& s : seq.segments) {
        out.tokens.push_back(quantize(s.head.x, cfg));
        out.tokens.push_back(quantize(s.head.y, cfg));
        out.tokens.push_back(quantize(s.head.z, cfg));
        out.tokens.push_back(quantize(s.tail.x, cfg));
        out.tokens.push_back(quantize(s.tail.y, cfg));
        out.tokens.push_back(quantize(s.tail.z, cfg));
    }
    out.tokens.push_back(cfg.eos());
    return out;
}

struct DecodeResult {
    SeamSequence seam;
    int dropped_degenerate = 0;
    bool saw_eos = false;
};

inline DecodeResult decode_verbose(const TokenStream& stream, const CodecConfig& cfg = {}) {
    const auto& t = stream.tokens;
    if (t.empty() || t[0] != cfg.bos())
        throw ValidationError("token stream must begin with the start token");

    std::vector<int> coords;
    DecodeResult result;
    size_t i = 1;
    for (; i < t.size(); ++i) {
        if (t[i] == cfg.eos()) {
            result.saw_eos = true;
            ++i;
            break;
        }
        if (t[i] < 0 || t[i] >= cfg.bins)
            throw ValidationError("control token misplaced at position " + std::to_string(i));
        coords.push_back(t[i]);
    }
    for (; i < t.size(); ++i)
        if (t[i] != cfg.pad())
            throw ValidationError("unexpected token after end token at position " +
                                  std::to_string(i));

    if (coords.size() % 6 != 0)
        throw ValidationError("truncated segment: coordinate run of length " +
                              std::to_string(coords.size()) + " at token index " +
                              std::to_string(1 + coords.size()));

    std::vector<SeamSegment> segments;
    segments.reserve(coords.size() / 6);
    for (size_t k = 0; k < coords.size(); k += 6) {
        SeamSegment s;
        s.head = {dequantize(coords[k], cfg), dequantize(coords[k + 1], cfg),
                  dequantize(coords[k + 2], cfg)};
        s.tail = {dequantize(coords[k + 3], cfg), dequantize(coords[k + 4], cfg),
                  dequantize(coords[k + 5], cfg)};
        if (s.degenerate()) {
            ++result.dropped_degenerate;
            continue;
        }
        segments.push_back(s);
    }
    result.seam = detail::canonicalize_segments(segments);
    return result;
}

inline SeamSequence decode(const TokenStream& stream, const CodecConfig& cfg = {}) {
    return decode_verbose(stream, cfg).seam;
}

// --- serialization -----------------------------------------------------------

inline nlohmann::json seam_to_json(const SeamSequence& seq) {
    nlohmann::json segs = nlohmann::json::array();
    for (const SeamSegment& s : seq.segments)
        segs.push_back({{s.head.x, s.head.y, s.head.z}, {s.tail.x, s.tail.y, s.tail.z}});
    return {{"normalized", true}, {"segments", segs}};
}

inline SeamSequence seam_from_json(const nlohmann::json& j) {
    if (!j.contains("segments") || !j["segments"].is_array())
        throw ValidationError("seam JSON missing 'segments' array");
    if (j.contains("normalized") && !j["normalized"].get<bool>())
        throw ValidationError("seam JSON must carry normalized coordinates");
    SeamSequence seq;
    for (const auto& e : j["segments"]) {
        if (!e.is_array() || e.size() != 2 || e[0].size() != 3 || e[1].size() != 3)
            throw ValidationError("seam JSON segment must be [[x,y,z],[x,y,z]]");
        SeamSegment s;
        s.head = {e[0][0].get<double>(), e[0][1].get<double>(), e[0][2].get<double>()};
        s.tail = {e[1][0].get<double>(), e[1][1].get<double>(), e[1][2].get<double>()};
        seq.segments.push_back(s);
    }
    return seq;
}

inline void save_seam_json(const SeamSequence& seq, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << seam_to_json(seq).dump(2) << "\n";
}

inline SeamSequence load_seam_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed JSON in '" + path + "': " + e.what());
    }
    return seam_from_json(j);
}

inline nlohmann::json tokens_to_json(const TokenStream& stream) {
    return nlohmann::json(stream.tokens);
}

inline TokenStream tokens_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ValidationError("token JSON must be an integer array");
    TokenStream s;
    for (const auto& e : j) s.tokens.push_back(e.get<int>());
    return s;
}

// Raw little-endian 16-bit binary form (flag-selected alternative to JSON).
inline void save_tokens_binary(const TokenStream& stream, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    for (int t : stream.tokens) {
        if (t < 0 || t > 0xFFFF) throw ValidationError("token out of 16-bit range");
        unsigned char lo = t & 0xFF, hi = (t >> 8) & 0xFF;
        out.put(char(lo));
        out.put(char(hi));
    }
}

inline TokenStream load_tokens_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    TokenStream s;
    char lo, hi;
    while (in.get(lo)) {
        if (!in.get(hi)) throw ValidationError("odd byte count in token binary '" + path + "'");
        s.tokens.push_back((unsigned char)(lo) | ((unsigned char)(hi) << 8));
    }
    return s;
}

} // namespace seamkit
