#pragma once

// Autoregressive seam sampling. A grammar mask keeps every emitted stream
// well-formed: coordinate tokens anywhere, the end token only on a segment
// boundary, start/padding tokens never.

#include <cmath>
#include <string>
#include <vector>

#include <seamkit/codec.hpp>
#include <seamkit/nn/model.hpp>

namespace seamkit::nn {

struct GenerationConfig {
    double ratio = 0.2;       // requested segments per mesh vertex
    double temperature = 0.0; // 0 = greedy argmax
    int top_k = 0;            // 0 = full distribution
    std::uint64_t seed = 0;
    int target_segments = 0; // > 0 overrides the ratio-derived count
    int max_tokens = 0;      // > 0 caps the stream length below the model limit
};

struct GenerationResult {
    TokenStream tokens;
    SeamSequence seam;
    int target_segments = 0;
    int target_bucket = 0;
    bool truncated = false; // hit the length limit before the end token
};

namespace detail {

// Greedy takes the best-scoring permitted token (smallest id on ties); the
// sampled path rescales by temperature, optionally keeps only the top-k
// candidates, and draws from the renormalized softmax.
inline int pick_token(const Eigen::RowVectorXd& logits, const std::vector<char>& allowed,
                      double temperature, int top_k, Rng& rng) {
    if (temperature <= 0.0) {
        int best = -1;
        for (int c = 0; c < logits.size(); ++c) {
            if (!allowed[size_t(c)]) continue;
            if (best < 0 || logits[c] > logits[best]) best = c;
        }
        if (best < 0) throw InternalError("sampling: no permitted token");
        return best;
    }
    std::vector<std::pair<double, int>> cand;
    for (int c = 0; c < logits.size(); ++c)
        if (allowed[size_t(c)]) cand.emplace_back(logits[c] / temperature, c);
    if (cand.empty()) throw InternalError("sampling: no permitted token");
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (top_k > 0 && top_k < int(cand.size())) cand.resize(size_t(top_k));
    double mx = cand.front().first;
    double denom = 0.0;
    for (const auto& [score, id] : cand) denom += std::exp(score - mx);
    double u = rng.u01() * denom;
    double acc = 0.0;
    for (const auto& [score, id] : cand) {
        acc += std::exp(score - mx);
        if (u < acc) return id;
    }
    return cand.back().second;
}

} // namespace detail

inline GenerationResult generate(const SeamModel& model, const std::vector<Vec3>& cloud,
                                 int vertex_count, const GenerationConfig& gc) {
    const ModelConfig& cfg = model.cfg;
    CodecConfig cc;
    cc.bins = cfg.bins;

    GenerationResult res;
    int target = gc.target_segments > 0
                     ? gc.target_segments
                     : int(std::lround(gc.ratio * double(vertex_count)));
    target = std::max(1, std::min(target, cfg.max_segments()));
    res.target_segments = target;
    res.target_bucket = bucket_of(target, cfg);

    Tape tape;
    tape.recording = false;
    ShapeEmbedding emb = model.encoder.encode(tape, cloud, res.target_bucket, nullptr);
    Rng rng = derive_rng(gc.seed, "generate");

    int limit = gc.max_tokens > 0 ? std::min(gc.max_tokens, cfg.max_len) : cfg.max_len;
    std::vector<int>& toks = res.tokens.tokens;
    toks.push_back(cc.bos());
    std::vector<char> allowed(size_t(cfg.vocab), 0);
    bool saw_eos = false;
    while (int(toks.size()) < limit) {
        TPtr logits = model.decoder.forward(tape, toks, emb.cond);
        Eigen::RowVectorXd last = logits->v.row(logits->v.rows() - 1);

        int coords = int(toks.size()) - 1;
        std::fill(allowed.begin(), allowed.end(), 0);
        for (int c = 0; c < cfg.bins; ++c) allowed[size_t(c)] = 1;
        allowed[size_t(cc.eos())] = coords > 0 && coords % 6 == 0;
        // when sampling, refuse to complete a zero-length segment: decoding
        // drops those, so emitting one only wastes stream budget
        if (gc.temperature > 0.0 && coords % 6 == 5) {
            size_t s = size_t(coords) - 5 + 1; // group start, past the start token
            if (toks[s + 3] == toks[s] && toks[s + 4] == toks[s + 1])
                allowed[size_t(toks[s + 2])] = 0;
        }

        int tok = detail::pick_token(last, allowed, gc.temperature, gc.top_k, rng);
        toks.push_back(tok);
        if (tok == cc.eos()) {
            saw_eos = true;
            break;
        }
    }
    res.truncated = !saw_eos;

    // decode whatever complete segments exist, closing a truncated stream
    std::vector<int> coords(toks.begin() + 1, saw_eos ? toks.end() - 1 : toks.end());
    coords.resize(coords.size() - coords.size() % 6);
    TokenStream framed;
    framed.tokens.push_back(cc.bos());
    framed.tokens.insert(framed.tokens.end(), coords.begin(), coords.end());
    framed.tokens.push_back(cc.eos());
    res.seam = decode(framed, cc);
    return res;
}

} // namespace seamkit::nn
