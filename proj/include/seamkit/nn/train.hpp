#pragma once

// Training: teacher-forced next-token cross-entropy plus a KL penalty on the
// variational bottleneck, optimized with Adam under global-norm clipping.
// Every random draw comes from a purpose-keyed stream so runs replay exactly.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <seamkit/codec.hpp>
#include <seamkit/nn/model.hpp>
#include <seamkit/sampler.hpp>

namespace seamkit::nn {

struct TrainExample {
    std::vector<Vec3> cloud;
    SeamSequence seam;  // canonical, codec-ready
    TokenStream tokens; // cached encode of `seam`
    int bucket = 0;
};

inline TrainExample make_train_example(const TriMesh& mesh,
                                       const std::vector<SeamSegment>& segments,
                                       const ModelConfig& cfg, int cloud_budget,
                                       std::uint64_t seed) {
    TrainExample ex;
    MeshTopology topo = build_topology(mesh);
    ex.cloud = sample_condition(mesh, topo, cloud_budget, seed).points;
    CodecConfig cc;
    cc.bins = cfg.bins;
    ex.seam = make_canonical(segments, cc);
    if (int(ex.seam.count()) > cfg.max_segments())
        throw ValidationError("training seam exceeds model sequence capacity");
    ex.tokens = encode(ex.seam, cc);
    ex.bucket = bucket_of(int(ex.seam.count()), cfg);
    return ex;
}

namespace detail {

inline Vec3 rotate_y_scale(const Vec3& p, double c, double s, double k) {
    return {k * (c * p.x + s * p.z), k * p.y, k * (-s * p.x + c * p.z)};
}

inline double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

} // namespace detail

// Random rigid-ish perturbation: uniform scale in [0.95, 1.05] and a rotation
// about y, applied to cloud and seam alike; the cloud additionally gets
// gaussian jitter. Seam endpoints are clamped back into the codec's [-1, 1]
// range and re-encoded, so the targets stay consistent with the condition.
inline TrainExample augment_example(const TrainExample& base, const ModelConfig& cfg, Rng& rng,
                                    double jitter_sigma = 0.01) {
    double scale = rng.uniform(0.95, 1.05);
    double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    double c = std::cos(angle), s = std::sin(angle);

    TrainExample out;
    out.cloud.reserve(base.cloud.size());
    for (const Vec3& p : base.cloud) {
        Vec3 q = detail::rotate_y_scale(p, c, s, scale);
        q.x += jitter_sigma * rng.gaussian();
        q.y += jitter_sigma * rng.gaussian();
        q.z += jitter_sigma * rng.gaussian();
        out.cloud.push_back(q);
    }

    std::vector<SeamSegment> segs;
    segs.reserve(base.seam.count());
    for (const SeamSegment& seg : base.seam.segments) {
        Vec3 h = detail::rotate_y_scale(seg.head, c, s, scale);
        Vec3 t = detail::rotate_y_scale(seg.tail, c, s, scale);
        h = {detail::clamp_unit(h.x), detail::clamp_unit(h.y), detail::clamp_unit(h.z)};
        t = {detail::clamp_unit(t.x), detail::clamp_unit(t.y), detail::clamp_unit(t.z)};
        segs.push_back({h, t});
    }
    CodecConfig cc;
    cc.bins = cfg.bins;
    out.seam = make_canonical(segs, cc);
    out.tokens = encode(out.seam, cc);
    out.bucket = bucket_of(int(out.seam.count()), cfg);
    return out;
}

struct Adam {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long steps = 0;
    std::vector<Mat> m, v;

    void init(const ParamMap& params) {
        m.clear();
        v.clear();
        for (const auto& [name, p] : params) {
            m.push_back(Mat::Zero(p->v.rows(), p->v.cols()));
            v.push_back(Mat::Zero(p->v.rows(), p->v.cols()));
        }
    }

    void step(const ParamMap& params, double lr) {
        if (m.size() != params.size()) throw InternalError("optimizer state out of sync");
        ++steps;
        double bc1 = 1.0 - std::pow(beta1, double(steps));
        double bc2 = 1.0 - std::pow(beta2, double(steps));
        for (size_t i = 0; i < params.size(); ++i) {
            Tensor& p = *params[i].second;
            p.ensure_grad();
            m[i] = beta1 * m[i] + (1.0 - beta1) * p.g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * p.g.cwiseProduct(p.g);
            Mat mhat = m[i] / bc1;
            Mat vhat = v[i] / bc2;
            p.v.array() -= lr * mhat.array() / (vhat.array().sqrt() + eps);
        }
    }
};

inline double global_grad_norm(const ParamMap& params) {
    double sq = 0.0;
    for (const auto& [name, p] : params)
        if (p->g.size() > 0) sq += p->g.squaredNorm();
    return std::sqrt(sq);
}

// returns the pre-clip norm
inline double clip_gradients(const ParamMap& params, double max_norm) {
    double norm = global_grad_norm(params);
    if (max_norm > 0.0 && norm > max_norm) {
        double f = max_norm / norm;
        for (const auto& [name, p] : params)
            if (p->g.size() > 0) p->g *= f;
    }
    return norm;
}

inline void zero_gradients(const ParamMap& params) {
    for (const auto& [name, p] : params) p->zero_grad();
}

struct TrainConfig {
    int steps = 100;
    int batch = 8;
    double lr = 1e-4;
    double clip = 0.5;
    int warmup_steps = 1; // linear ramp; 1 = no warm-up
    std::uint64_t seed = 0;
    bool augment = true;
    double eos_weight = 1.0; // extra loss weight on the end-of-stream token
    int log_every = 0;       // 0 = silent
};

struct LossRow {
    int step = 0;
    double ce = 0.0;
    double kl = 0.0;
};

inline Mat draw_noise(int rows, int cols, Rng& rng) {
    Mat e(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) e(r, c) = rng.gaussian();
    return e;
}

// One gradient-accumulation step over `batch` examples. Gradients are scaled
// by 1/batch as they accumulate, clipped, then applied.
inline LossRow train_step(SeamModel& model, Adam& opt, const ParamMap& params,
                          const std::vector<const TrainExample*>& batch, int step,
                          const TrainConfig& tc) {
    const ModelConfig& cfg = model.cfg;
    Tape tape;
    double ce_sum = 0.0, kl_sum = 0.0;
    for (size_t b = 0; b < batch.size(); ++b) {
        const TrainExample* ex = batch[b];
        TrainExample scratch;
        if (tc.augment) {
            Rng arng = derive_rng(tc.seed, "augment", std::uint64_t(step), std::uint64_t(b));
            scratch = augment_example(*ex, cfg, arng);
            ex = &scratch;
        }
        Rng nrng = derive_rng(tc.seed, "reparam", std::uint64_t(step), std::uint64_t(b));
        Mat eps = draw_noise(cfg.latent_tokens, cfg.latent_dim, nrng);
        ShapeEmbedding emb = model.encoder.encode(tape, ex->cloud, ex->bucket, &eps);

        const std::vector<int>& toks = ex->tokens.tokens;
        std::vector<int> inputs(toks.begin(), toks.end() - 1);
        std::vector<int> targets(toks.begin() + 1, toks.end());
        std::vector<double> weights(targets.size());
        for (size_t i = 0; i < targets.size(); ++i)
            weights[i] = targets[i] == cfg.bins + 2 ? 0.0
                       : targets[i] == cfg.bins + 1 ? tc.eos_weight
                                                    : 1.0;

        TPtr logits = model.decoder.forward(tape, inputs, emb.cond);
        TPtr ce = cross_entropy(tape, logits, targets, weights);
        TPtr kl = kl_divergence(tape, emb.mean, emb.logvar);
        double ce_v = ce->v(0, 0), kl_v = kl->v(0, 0);
        if (!std::isfinite(ce_v) || !std::isfinite(kl_v))
            throw InternalError("loss is not finite at step " + std::to_string(step));
        ce_sum += ce_v;
        kl_sum += kl_v;

        TPtr total = cfg.beta > 0.0 ? add_scaled(tape, ce, kl, cfg.beta) : ce;
        tape.backward(scale(tape, total, 1.0 / double(batch.size())));
    }
    clip_gradients(params, tc.clip);
    double ramp = tc.warmup_steps > 1 ? std::min(1.0, double(step + 1) / tc.warmup_steps) : 1.0;
    opt.step(params, tc.lr * ramp);
    zero_gradients(params);
    return {step, ce_sum / double(batch.size()), kl_sum / double(batch.size())};
}

struct TrainResult {
    std::vector<LossRow> history;
};

inline TrainResult train_model(SeamModel& model, Adam& opt,
                               const std::vector<TrainExample>& data, const TrainConfig& tc,
                               std::ostream* log = nullptr) {
    if (data.empty()) throw ValidationError("training requires at least one example");
    if (tc.steps < 0 || tc.batch < 1) throw ValidationError("bad training schedule");
    ParamMap params = model.params();
    if (opt.m.empty()) opt.init(params);
    TrainResult res;
    res.history.reserve(size_t(tc.steps));
    for (int step = 0; step < tc.steps; ++step) {
        std::vector<const TrainExample*> batch;
        batch.reserve(size_t(tc.batch));
        for (int i = 0; i < tc.batch; ++i)
            batch.push_back(&data[(size_t(step) * tc.batch + i) % data.size()]);
        LossRow row = train_step(model, opt, params, batch, step, tc);
        res.history.push_back(row);
        if (log && tc.log_every > 0 && (step % tc.log_every == 0 || step + 1 == tc.steps))
            *log << "step " << row.step << " ce " << row.ce << " kl " << row.kl << "\n";
    }
    return res;
}

inline void write_loss_csv(const std::vector<LossRow>& history, std::ostream& os) {
    os << "step,ce_loss,kl_loss\n";
    os.precision(17);
    for (const LossRow& r : history) os << r.step << ',' << r.ce << ',' << r.kl << '\n';
}

inline void write_loss_csv(const std::vector<LossRow>& history, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot open loss csv for writing: " + path);
    write_loss_csv(history, f);
}

// Fraction of teacher-forced positions whose argmax matches the target.
inline double teacher_forced_accuracy(const SeamModel& model, const TrainExample& ex) {
    Tape tape;
    tape.recording = false;
    ShapeEmbedding emb = model.encoder.encode(tape, ex.cloud, ex.bucket, nullptr);
    const std::vector<int>& toks = ex.tokens.tokens;
    std::vector<int> inputs(toks.begin(), toks.end() - 1);
    TPtr logits = model.decoder.forward(tape, inputs, emb.cond);
    int hits = 0;
    for (int r = 0; r < logits->v.rows(); ++r) {
        int best = 0;
        for (int c = 1; c < logits->v.cols(); ++c)
            if (logits->v(r, c) > logits->v(r, best)) best = c;
        if (best == toks[size_t(r) + 1]) ++hits;
    }
    return double(hits) / double(logits->v.rows());
}

} // namespace seamkit::nn
