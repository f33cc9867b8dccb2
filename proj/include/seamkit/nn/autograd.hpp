#pragma once

// Reverse-mode autodiff over Eigen matrices, sized for CPU-trainable models.
//
// The forward pass is computed so that row r of every sequence activation is
// a pure function of input rows <= r and never of the total sequence length:
// matmuls over sequence rows run in fixed-size row chunks (zero-padded), and
// attention scores/outputs are accumulated with scalar loops in a fixed
// order. This makes prefix logits bitwise reproducible under extension,
// which the causality tests check literally. Backward passes have no such
// obligation and use plain GEMM.

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include <seamkit/errors.hpp>
#include <seamkit/rng.hpp>

namespace seamkit::nn {

using Mat = Eigen::MatrixXd;

constexpr int kChunkRows = 32; // fixed GEMM row block; do not vary with input

struct Tensor {
    Mat v;
    Mat g;
    bool track = false;

    Tensor() = default;
    Tensor(Mat val, bool track_) : v(std::move(val)), track(track_) {}

    void ensure_grad() {
        if (g.rows() != v.rows() || g.cols() != v.cols()) g = Mat::Zero(v.rows(), v.cols());
    }
    void zero_grad() {
        if (g.size() > 0) g.setZero();
    }
};

using TPtr = std::shared_ptr<Tensor>;

inline TPtr make_tensor(Mat v, bool track = false) {
    return std::make_shared<Tensor>(std::move(v), track);
}

inline TPtr make_param(int rows, int cols, Rng& rng, double std_dev) {
    Mat m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = std_dev == 0.0 ? 0.0 : rng.gaussian() * std_dev;
    return make_tensor(std::move(m), true);
}

class Tape {
public:
    bool recording = true;

    void push(std::function<void()> op) {
        if (recording) ops_.push_back(std::move(op));
    }
    // seed the scalar loss with d(loss)/d(loss) = 1 and sweep backwards
    void backward(const TPtr& loss) {
        loss->ensure_grad();
        loss->g(0, 0) = 1.0;
        for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
        ops_.clear();
    }
    void clear() { ops_.clear(); }
    size_t size() const { return ops_.size(); }

private:
    std::vector<std::function<void()>> ops_;
};

namespace detail {

// X*W with X processed in fixed kChunkRows blocks so each output row's
// arithmetic never depends on how many rows follow it.
inline Mat chunk_mm(const Mat& x, const Mat& w) {
    Mat out(x.rows(), w.cols());
    Mat pad(kChunkRows, x.cols());
    for (int r0 = 0; r0 < x.rows(); r0 += kChunkRows) {
        int rows = std::min<int>(kChunkRows, int(x.rows()) - r0);
        pad.setZero();
        pad.topRows(rows) = x.middleRows(r0, rows);
        Mat prod = pad * w;
        out.middleRows(r0, rows) = prod.topRows(rows);
    }
    return out;
}

} // namespace detail

inline TPtr matmul(Tape& tape, const TPtr& x, const TPtr& w) {
    TPtr out = make_tensor(detail::chunk_mm(x->v, w->v));
    tape.push([x, w, out] {
        out->ensure_grad();
        x->ensure_grad();
        w->ensure_grad();
        x->g.noalias() += out->g * w->v.transpose();
        w->g.noalias() += x->v.transpose() * out->g;
    });
    return out;
}

inline TPtr add(Tape& tape, const TPtr& a, const TPtr& b) {
    TPtr out = make_tensor(a->v + b->v);
    tape.push([a, b, out] {
        out->ensure_grad();
        a->ensure_grad();
        b->ensure_grad();
        a->g += out->g;
        b->g += out->g;
    });
    return out;
}

// x + row-broadcast bias (bias is 1 x cols)
inline TPtr add_rowvec(Tape& tape, const TPtr& x, const TPtr& bias) {
    Mat v = x->v;
    v.rowwise() += bias->v.row(0);
    TPtr out = make_tensor(std::move(v));
    tape.push([x, bias, out] {
        out->ensure_grad();
        x->ensure_grad();
        bias->ensure_grad();
        x->g += out->g;
        bias->g.row(0) += out->g.colwise().sum();
    });
    return out;
}

inline TPtr scale(Tape& tape, const TPtr& x, double s) {
    TPtr out = make_tensor(x->v * s);
    tape.push([x, out, s] {
        out->ensure_grad();
        x->ensure_grad();
        x->g += out->g * s;
    });
    return out;
}

// row-wise layer normalization with learned gain/bias (both 1 x cols)
inline TPtr layer_norm(Tape& tape, const TPtr& x, const TPtr& gain, const TPtr& bias,
                       double eps = 1e-5) {
    int rows = int(x->v.rows()), cols = int(x->v.cols());
    Mat norm(rows, cols);
    Mat inv_std(rows, 1);
    for (int r = 0; r < rows; ++r) {
        double mean = x->v.row(r).mean();
        double var = (x->v.row(r).array() - mean).square().sum() / cols;
        double is = 1.0 / std::sqrt(var + eps);
        inv_std(r, 0) = is;
        norm.row(r) = (x->v.row(r).array() - mean) * is;
    }
    Mat v = norm;
    for (int r = 0; r < rows; ++r)
        v.row(r) = norm.row(r).cwiseProduct(gain->v.row(0)) + bias->v.row(0);
    TPtr out = make_tensor(std::move(v));
    tape.push([x, gain, bias, out, norm, inv_std, cols] {
        out->ensure_grad();
        x->ensure_grad();
        gain->ensure_grad();
        bias->ensure_grad();
        for (int r = 0; r < out->g.rows(); ++r) {
            Eigen::RowVectorXd dn = out->g.row(r).cwiseProduct(gain->v.row(0));
            double m1 = dn.mean();
            double m2 = dn.cwiseProduct(norm.row(r)).mean();
            x->g.row(r) +=
                (dn.array() - m1 - norm.row(r).array() * m2).matrix() * inv_std(r, 0);
            gain->g.row(0) += out->g.row(r).cwiseProduct(norm.row(r));
            bias->g.row(0) += out->g.row(r);
        }
    });
    return out;
}

inline TPtr gelu(Tape& tape, const TPtr& x) {
    const double inv_sqrt2 = 0.7071067811865475244;
    Mat v = x->v.unaryExpr([&](double t) { return 0.5 * t * (1.0 + std::erf(t * inv_sqrt2)); });
    TPtr out = make_tensor(std::move(v));
    tape.push([x, out, inv_sqrt2] {
        out->ensure_grad();
        x->ensure_grad();
        const double inv_sqrt2pi = 0.3989422804014326779;
        for (int c = 0; c < x->v.cols(); ++c)
            for (int r = 0; r < x->v.rows(); ++r) {
                double t = x->v(r, c);
                double cdf = 0.5 * (1.0 + std::erf(t * inv_sqrt2));
                double pdf = inv_sqrt2pi * std::exp(-0.5 * t * t);
                x->g(r, c) += out->g(r, c) * (cdf + t * pdf);
            }
    });
    return out;
}

// rows of `table` selected by token id
inline TPtr embed_rows(Tape& tape, const TPtr& table, const std::vector<int>& ids) {
    Mat v(int(ids.size()), table->v.cols());
    for (size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= table->v.rows())
            throw InternalError("embedding id out of range");
        v.row(int(i)) = table->v.row(ids[i]);
    }
    TPtr out = make_tensor(std::move(v));
    tape.push([table, out, ids] {
        out->ensure_grad();
        table->ensure_grad();
        for (size_t i = 0; i < ids.size(); ++i) table->g.row(ids[i]) += out->g.row(int(i));
    });
    return out;
}

// row gather; id -1 yields a zero row (used by causal shorten/upsample)
inline TPtr gather_rows(Tape& tape, const TPtr& x, const std::vector<int>& ids) {
    Mat v = Mat::Zero(int(ids.size()), x->v.cols());
    for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] >= 0) v.row(int(i)) = x->v.row(ids[i]);
    TPtr out = make_tensor(std::move(v));
    tape.push([x, out, ids] {
        out->ensure_grad();
        x->ensure_grad();
        for (size_t i = 0; i < ids.size(); ++i)
            if (ids[i] >= 0) x->g.row(ids[i]) += out->g.row(int(i));
    });
    return out;
}

inline TPtr vstack(Tape& tape, const TPtr& a, const TPtr& b) {
    Mat v(a->v.rows() + b->v.rows(), a->v.cols());
    v.topRows(a->v.rows()) = a->v;
    v.bottomRows(b->v.rows()) = b->v;
    TPtr out = make_tensor(std::move(v));
    tape.push([a, b, out] {
        out->ensure_grad();
        a->ensure_grad();
        b->ensure_grad();
        a->g += out->g.topRows(a->v.rows());
        b->g += out->g.bottomRows(b->v.rows());
    });
    return out;
}

// Scaled-dot-product attention after projections. q: Lq x d, k/v: Lk x d,
// d = heads * head_dim. With `causal`, query row i sees key rows 0..i.
// Scores and outputs accumulate with scalar loops in fixed order so each
// output row is independent of rows after it.
inline TPtr attention(Tape& tape, const TPtr& q, const TPtr& k, const TPtr& v, int heads,
                      bool causal) {
    int lq = int(q->v.rows()), lk = int(k->v.rows());
    int d = int(q->v.cols());
    if (d % heads != 0) throw InternalError("attention width not divisible by heads");
    int hd = d / heads;
    if (causal && lq != lk) throw InternalError("causal attention needs equal lengths");
    double scale = 1.0 / std::sqrt(double(hd));

    auto probs = std::make_shared<std::vector<Mat>>();
    probs->reserve(heads);
    Mat out_v = Mat::Zero(lq, d);
    std::vector<double> scores(lk);
    for (int h = 0; h < heads; ++h) {
        Mat p = Mat::Zero(lq, lk);
        int c0 = h * hd;
        for (int i = 0; i < lq; ++i) {
            int limit = causal ? i + 1 : lk;
            double max_s = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < limit; ++j) {
                double s = 0.0;
                for (int c = 0; c < hd; ++c) s += q->v(i, c0 + c) * k->v(j, c0 + c);
                scores[j] = s * scale;
                max_s = std::max(max_s, scores[j]);
            }
            double denom = 0.0;
            for (int j = 0; j < limit; ++j) {
                scores[j] = std::exp(scores[j] - max_s);
                denom += scores[j];
            }
            for (int j = 0; j < limit; ++j) {
                double a = scores[j] / denom;
                p(i, j) = a;
                for (int c = 0; c < hd; ++c) out_v(i, c0 + c) += a * v->v(j, c0 + c);
            }
        }
        probs->push_back(std::move(p));
    }
    TPtr out = make_tensor(std::move(out_v));
    tape.push([q, k, v, out, probs, heads, hd, scale] {
        out->ensure_grad();
        q->ensure_grad();
        k->ensure_grad();
        v->ensure_grad();
        for (int h = 0; h < heads; ++h) {
            int c0 = h * hd;
            const Mat& p = (*probs)[h];
            auto qh = q->v.middleCols(c0, hd);
            auto kh = k->v.middleCols(c0, hd);
            auto vh = v->v.middleCols(c0, hd);
            auto doh = out->g.middleCols(c0, hd);
            v->g.middleCols(c0, hd).noalias() += p.transpose() * doh;
            Mat dp = doh * vh.transpose();                              // Lq x Lk
            Eigen::VectorXd rowdot = (dp.cwiseProduct(p)).rowwise().sum();
            Mat ds = p.cwiseProduct(dp.colwise() - rowdot);             // softmax backward
            q->g.middleCols(c0, hd).noalias() += ds * kh * scale;
            k->g.middleCols(c0, hd).noalias() += ds.transpose() * qh * scale;
        }
    });
    return out;
}

// weighted mean token cross-entropy; logits row r scores the token target[r]
// with weight w[r] (0 drops the position from the loss)
inline TPtr cross_entropy(Tape& tape, const TPtr& logits, const std::vector<int>& targets,
                          const std::vector<double>& weights) {
    int rows = int(logits->v.rows()), cols = int(logits->v.cols());
    auto soft = std::make_shared<Mat>(rows, cols);
    double total = 0.0, wsum = 0.0;
    for (int r = 0; r < rows; ++r) {
        double mx = logits->v.row(r).maxCoeff();
        Eigen::RowVectorXd e = (logits->v.row(r).array() - mx).exp();
        double denom = e.sum();
        soft->row(r) = e / denom;
        if (weights[r] == 0.0) continue;
        total += weights[r] * (std::log(denom) + mx - logits->v(r, targets[r]));
        wsum += weights[r];
    }
    if (wsum == 0.0) throw InternalError("cross entropy: empty mask");
    TPtr out = make_tensor(Mat::Constant(1, 1, total / wsum));
    tape.push([logits, out, soft, targets, weights, wsum] {
        out->ensure_grad();
        logits->ensure_grad();
        for (int r = 0; r < logits->v.rows(); ++r) {
            if (weights[r] == 0.0) continue;
            double w = out->g(0, 0) * weights[r] / wsum;
            logits->g.row(r) += w * soft->row(r);
            logits->g(r, targets[r]) -= w;
        }
    });
    return out;
}

inline TPtr cross_entropy(Tape& tape, const TPtr& logits, const std::vector<int>& targets,
                          const std::vector<char>& mask) {
    std::vector<double> w(mask.size());
    for (size_t i = 0; i < mask.size(); ++i) w[i] = mask[i] ? 1.0 : 0.0;
    return cross_entropy(tape, logits, targets, w);
}

// KL(N(mean, exp(logvar)) || N(0,1)), averaged over elements
inline TPtr kl_divergence(Tape& tape, const TPtr& mean, const TPtr& logvar) {
    int n = int(mean->v.size());
    double total = 0.0;
    for (int c = 0; c < mean->v.cols(); ++c)
        for (int r = 0; r < mean->v.rows(); ++r) {
            double mu = mean->v(r, c), lv = logvar->v(r, c);
            total += 0.5 * (mu * mu + std::exp(lv) - 1.0 - lv);
        }
    TPtr out = make_tensor(Mat::Constant(1, 1, total / n));
    tape.push([mean, logvar, out, n] {
        out->ensure_grad();
        mean->ensure_grad();
        logvar->ensure_grad();
        double w = out->g(0, 0) / n;
        mean->g += w * mean->v;
        logvar->g.array() += w * 0.5 * (logvar->v.array().exp() - 1.0);
    });
    return out;
}

// z = mean + exp(logvar/2) .* eps, with eps fixed externally
inline TPtr reparameterize(Tape& tape, const TPtr& mean, const TPtr& logvar, const Mat& eps) {
    Mat std_dev = (logvar->v.array() * 0.5).exp();
    TPtr out = make_tensor(mean->v + std_dev.cwiseProduct(eps));
    tape.push([mean, logvar, out, std_dev, eps] {
        out->ensure_grad();
        mean->ensure_grad();
        logvar->ensure_grad();
        mean->g += out->g;
        logvar->g.array() += out->g.array() * std_dev.array() * eps.array() * 0.5;
    });
    return out;
}

// a + s * b for combining scalar losses
inline TPtr add_scaled(Tape& tape, const TPtr& a, const TPtr& b, double s) {
    TPtr out = make_tensor(a->v + s * b->v);
    tape.push([a, b, out, s] {
        out->ensure_grad();
        a->ensure_grad();
        b->ensure_grad();
        a->g += out->g;
        b->g += s * out->g;
    });
    return out;
}

} // namespace seamkit::nn
