#pragma once

// Model checkpoints: config JSON, named weight blobs, and optional optimizer
// state in one little-endian binary file.

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <seamkit/nn/model.hpp>
#include <seamkit/nn/train.hpp>

namespace seamkit::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace detail {

constexpr char kCkptMagic[8] = {'S', 'E', 'A', 'M', 'M', 'D', 'L', '1'};
constexpr std::uint32_t kCkptVersion = 1;

inline void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
inline std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

inline void write_mat(std::ostream& os, const Mat& m) {
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            double x = m(r, c);
            os.write(reinterpret_cast<const char*>(&x), sizeof x);
        }
}
inline void read_mat(std::istream& is, Mat& m) {
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            double x = 0;
            is.read(reinterpret_cast<char*>(&x), sizeof x);
            m(r, c) = x;
        }
}

} // namespace detail

inline void save_checkpoint(const std::string& path, const SeamModel& model,
                            const Adam* opt = nullptr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open checkpoint for writing: " + path);
    os.write(detail::kCkptMagic, sizeof detail::kCkptMagic);
    detail::write_u32(os, detail::kCkptVersion);

    std::string cfg_json = model.cfg.to_json().dump();
    detail::write_u64(os, cfg_json.size());
    os.write(cfg_json.data(), std::streamsize(cfg_json.size()));

    ParamMap params = model.params();
    detail::write_u32(os, std::uint32_t(params.size()));
    for (const auto& [name, p] : params) {
        detail::write_u32(os, std::uint32_t(name.size()));
        os.write(name.data(), std::streamsize(name.size()));
        detail::write_u32(os, std::uint32_t(p->v.rows()));
        detail::write_u32(os, std::uint32_t(p->v.cols()));
        detail::write_mat(os, p->v);
    }

    os.put(opt ? 1 : 0);
    if (opt) {
        if (opt->m.size() != params.size())
            throw InternalError("optimizer state does not match parameter list");
        detail::write_u64(os, std::uint64_t(opt->steps));
        for (size_t i = 0; i < params.size(); ++i) {
            detail::write_mat(os, opt->m[i]);
            detail::write_mat(os, opt->v[i]);
        }
    }
    if (!os) throw InternalError("checkpoint write failed: " + path);
}

struct LoadedCheckpoint {
    SeamModel model;
    Adam opt;
    bool has_optimizer = false;
};

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open checkpoint: " + path);
    char magic[8] = {};
    is.read(magic, sizeof magic);
    if (!is || !std::equal(magic, magic + 8, detail::kCkptMagic))
        throw ValidationError("not a model checkpoint: " + path);
    if (detail::read_u32(is) != detail::kCkptVersion)
        throw ValidationError("unsupported checkpoint version");

    std::uint64_t jlen = detail::read_u64(is);
    std::string cfg_json(jlen, '\0');
    is.read(cfg_json.data(), std::streamsize(jlen));
    if (!is) throw ValidationError("checkpoint truncated in config block");
    ModelConfig cfg;
    try {
        cfg = ModelConfig::from_json(nlohmann::json::parse(cfg_json));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad checkpoint config: ") + e.what());
    }

    LoadedCheckpoint out{SeamModel(cfg), Adam{}, false};
    ParamMap params = out.model.params();
    std::uint32_t n = detail::read_u32(is);
    if (n != params.size()) throw ValidationError("checkpoint parameter count mismatch");
    for (auto& [name, p] : params) {
        std::uint32_t nl = detail::read_u32(is);
        std::string stored(nl, '\0');
        is.read(stored.data(), nl);
        if (stored != name)
            throw ValidationError("checkpoint parameter order mismatch at " + name);
        std::uint32_t rows = detail::read_u32(is), cols = detail::read_u32(is);
        if (int(rows) != p->v.rows() || int(cols) != p->v.cols())
            throw ValidationError("checkpoint shape mismatch at " + name);
        detail::read_mat(is, p->v);
    }
    if (!is) throw ValidationError("checkpoint truncated in weight block");

    int flag = is.get();
    if (flag == 1) {
        out.has_optimizer = true;
        out.opt.init(params);
        out.opt.steps = (long long)(detail::read_u64(is));
        for (size_t i = 0; i < params.size(); ++i) {
            detail::read_mat(is, out.opt.m[i]);
            detail::read_mat(is, out.opt.v[i]);
        }
        if (!is) throw ValidationError("checkpoint truncated in optimizer block");
    } else if (flag != 0) {
        throw ValidationError("checkpoint truncated before optimizer block");
    }
    return out;
}

} // namespace seamkit::nn
