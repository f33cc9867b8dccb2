#pragma once

// Transformer building blocks on top of the autograd tape.

#include <string>
#include <utility>
#include <vector>

#include <seamkit/nn/autograd.hpp>

namespace seamkit::nn {

using ParamMap = std::vector<std::pair<std::string, TPtr>>;

struct Linear {
    TPtr w, b;

    Linear() = default;
    Linear(int in, int out, Rng& rng, double std_dev)
        : w(make_param(in, out, rng, std_dev)), b(make_param(1, out, rng, 0.0)) {}

    TPtr forward(Tape& t, const TPtr& x) const { return add_rowvec(t, matmul(t, x, w), b); }
    void collect(const std::string& name, ParamMap& out) const {
        out.emplace_back(name + ".w", w);
        out.emplace_back(name + ".b", b);
    }
};

struct Norm {
    TPtr gain, bias;

    Norm() = default;
    Norm(int dim, Rng& rng) : gain(make_tensor(Mat::Ones(1, dim), true)), bias(make_param(1, dim, rng, 0.0)) {}

    TPtr forward(Tape& t, const TPtr& x) const { return layer_norm(t, x, gain, bias); }
    void collect(const std::string& name, ParamMap& out) const {
        out.emplace_back(name + ".gain", gain);
        out.emplace_back(name + ".bias", bias);
    }
};

struct AttentionProj {
    Linear q, k, v, o;
    int heads = 1;
    bool causal = false;

    AttentionProj() = default;
    AttentionProj(int dim, int heads_, bool causal_, Rng& rng, double std_dev)
        : q(dim, dim, rng, std_dev), k(dim, dim, rng, std_dev), v(dim, dim, rng, std_dev),
          o(dim, dim, rng, std_dev), heads(heads_), causal(causal_) {}

    // self-attention when keys == queries source; cross otherwise
    TPtr forward(Tape& t, const TPtr& x, const TPtr& context) const {
        TPtr a = attention(t, q.forward(t, x), k.forward(t, context), v.forward(t, context),
                           heads, causal);
        return o.forward(t, a);
    }
    void collect(const std::string& name, ParamMap& out) const {
        q.collect(name + ".q", out);
        k.collect(name + ".k", out);
        v.collect(name + ".v", out);
        o.collect(name + ".o", out);
    }
};

struct Mlp {
    Linear fc1, fc2;

    Mlp() = default;
    Mlp(int dim, int hidden, Rng& rng, double std_dev)
        : fc1(dim, hidden, rng, std_dev), fc2(hidden, dim, rng, std_dev) {}

    TPtr forward(Tape& t, const TPtr& x) const {
        return fc2.forward(t, gelu(t, fc1.forward(t, x)));
    }
    void collect(const std::string& name, ParamMap& out) const {
        fc1.collect(name + ".fc1", out);
        fc2.collect(name + ".fc2", out);
    }
};

// pre-norm block: causal self-attention, cross-attention to the condition,
// then the feed-forward, each with a residual
struct DecoderBlock {
    Norm n1, n2, n3;
    AttentionProj self_attn, cross_attn;
    Mlp mlp;

    DecoderBlock() = default;
    DecoderBlock(int dim, int heads, int mlp_ratio, Rng& rng, double std_dev)
        : n1(dim, rng), n2(dim, rng), n3(dim, rng),
          self_attn(dim, heads, true, rng, std_dev),
          cross_attn(dim, heads, false, rng, std_dev), mlp(dim, dim * mlp_ratio, rng, std_dev) {}

    TPtr forward(Tape& t, TPtr x, const TPtr& cond) const {
        TPtr h = n1.forward(t, x);
        x = add(t, x, self_attn.forward(t, h, h));
        x = add(t, x, cross_attn.forward(t, n2.forward(t, x), cond));
        x = add(t, x, mlp.forward(t, n3.forward(t, x)));
        return x;
    }
    void collect(const std::string& name, ParamMap& out) const {
        n1.collect(name + ".n1", out);
        n2.collect(name + ".n2", out);
        n3.collect(name + ".n3", out);
        self_attn.collect(name + ".self", out);
        cross_attn.collect(name + ".cross", out);
        mlp.collect(name + ".mlp", out);
    }
};

// encoder block: full (non-causal) self-attention + feed-forward
struct EncoderBlock {
    Norm n1, n2;
    AttentionProj self_attn;
    Mlp mlp;

    EncoderBlock() = default;
    EncoderBlock(int dim, int heads, int mlp_ratio, Rng& rng, double std_dev)
        : n1(dim, rng), n2(dim, rng), self_attn(dim, heads, false, rng, std_dev),
          mlp(dim, dim * mlp_ratio, rng, std_dev) {}

    TPtr forward(Tape& t, TPtr x) const {
        TPtr h = n1.forward(t, x);
        x = add(t, x, self_attn.forward(t, h, h));
        x = add(t, x, mlp.forward(t, n2.forward(t, x)));
        return x;
    }
    void collect(const std::string& name, ParamMap& out) const {
        n1.collect(name + ".n1", out);
        n2.collect(name + ".n2", out);
        self_attn.collect(name + ".self", out);
        mlp.collect(name + ".mlp", out);
    }
};

// encoder cross block: latent queries read the point features
struct EncoderCrossBlock {
    Norm n1, n2;
    AttentionProj cross_attn;
    Mlp mlp;

    EncoderCrossBlock() = default;
    EncoderCrossBlock(int dim, int heads, int mlp_ratio, Rng& rng, double std_dev)
        : n1(dim, rng), n2(dim, rng), cross_attn(dim, heads, false, rng, std_dev),
          mlp(dim, dim * mlp_ratio, rng, std_dev) {}

    TPtr forward(Tape& t, TPtr x, const TPtr& context) const {
        x = add(t, x, cross_attn.forward(t, n1.forward(t, x), context));
        x = add(t, x, mlp.forward(t, n2.forward(t, x)));
        return x;
    }
    void collect(const std::string& name, ParamMap& out) const {
        n1.collect(name + ".n1", out);
        n2.collect(name + ".n2", out);
        cross_attn.collect(name + ".cross", out);
        mlp.collect(name + ".mlp", out);
    }
};

} // namespace seamkit::nn
