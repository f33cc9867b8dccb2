#pragma once

// The seam generator: a point-cloud encoder with a variational bottleneck and
// a three-level hourglass decoder over coordinate tokens.
//
// Sequence layout: position 0 is BOS (condition only); coordinate groups of 3
// start at position 1. Shortening keeps the last position of each complete
// group; upsampling hands position p the newest coarse summary whose content
// lies at or before p, so information never flows backwards.

#include <string>
#include <vector>

#include <json.hpp>

#include <seamkit/codec.hpp>
#include <seamkit/geom.hpp>
#include <seamkit/nn/modules.hpp>

namespace seamkit::nn {

struct ModelConfig {
    int width = 128;
    int heads = 4;
    int depth_fine = 1;   // blocks per side at the coordinate level
    int depth_vertex = 1; // blocks per side at the x3-shortened level
    int depth_edge = 2;   // blocks at the coarsest (x6) level
    int vocab = 1027;
    int max_len = 1536;
    int latent_tokens = 16;
    int latent_dim = 64;
    int buckets = 16;
    double beta = 1e-4;
    int bins = 1024;
    int feature_bands = 6;
    int mlp_ratio = 4;
    int encoder_cross = 1;
    int encoder_self = 2;

    static ModelConfig paper_scale() {
        ModelConfig c;
        c.width = 1536;
        c.heads = 16;
        c.depth_fine = 2;
        c.depth_vertex = 4;
        c.depth_edge = 12;
        c.max_len = 36864;
        c.latent_tokens = 3072;
        c.latent_dim = 1024;
        return c;
    }

    int max_segments() const { return (max_len - 2) / 6; }
    int point_feature_dim() const { return 3 + 6 * feature_bands; }
    int total_blocks() const {
        return 2 * (depth_fine + depth_vertex) + depth_edge + encoder_cross + encoder_self;
    }

    void validate() const {
        if (max_len % 6 != 0) throw ValidationError("model: max length must be divisible by 6");
        if (width % heads != 0) throw ValidationError("model: width must divide by head count");
        if (depth_fine < 1 || depth_vertex < 1 || depth_edge < 1)
            throw ValidationError("model: depths must be at least 1");
        if (latent_tokens < 1 || latent_dim < 1 || buckets < 1)
            throw ValidationError("model: bad size field");
        if (vocab != bins + 3)
            throw ValidationError("model: vocab must cover the bins plus three control tokens");
    }

    nlohmann::json to_json() const {
        return {{"width", width},
                {"heads", heads},
                {"depth_fine", depth_fine},
                {"depth_vertex", depth_vertex},
                {"depth_edge", depth_edge},
                {"vocab", vocab},
                {"max_len", max_len},
                {"latent_tokens", latent_tokens},
                {"latent_dim", latent_dim},
                {"buckets", buckets},
                {"beta", beta},
                {"bins", bins},
                {"feature_bands", feature_bands},
                {"mlp_ratio", mlp_ratio},
                {"encoder_cross", encoder_cross},
                {"encoder_self", encoder_self}};
    }
    static ModelConfig from_json(const nlohmann::json& j) {
        ModelConfig c;
        c.width = j.at("width");
        c.heads = j.at("heads");
        c.depth_fine = j.at("depth_fine");
        c.depth_vertex = j.at("depth_vertex");
        c.depth_edge = j.at("depth_edge");
        c.vocab = j.at("vocab");
        c.max_len = j.at("max_len");
        c.latent_tokens = j.at("latent_tokens");
        c.latent_dim = j.at("latent_dim");
        c.buckets = j.at("buckets");
        c.beta = j.at("beta");
        c.bins = j.at("bins");
        c.feature_bands = j.at("feature_bands");
        c.mlp_ratio = j.at("mlp_ratio");
        c.encoder_cross = j.at("encoder_cross");
        c.encoder_self = j.at("encoder_self");
        c.validate();
        return c;
    }
};

// uniform length buckets over segment counts [1, max_segments]
inline int bucket_of(int segment_count, const ModelConfig& cfg) {
    int count = std::max(1, std::min(segment_count, cfg.max_segments()));
    int b = (count - 1) * cfg.buckets / cfg.max_segments();
    return std::min(b, cfg.buckets - 1);
}

// raw position plus sinusoidal features at octave frequencies, per axis
inline Mat point_features(const std::vector<Vec3>& points, const ModelConfig& cfg) {
    Mat f(int(points.size()), cfg.point_feature_dim());
    const double pi = 3.14159265358979323846;
    for (size_t i = 0; i < points.size(); ++i) {
        const Vec3& p = points[i];
        int c = 0;
        f(i, c++) = p.x;
        f(i, c++) = p.y;
        f(i, c++) = p.z;
        for (int b = 0; b < cfg.feature_bands; ++b) {
            double freq = pi * double(1 << b);
            for (int axis = 0; axis < 3; ++axis) {
                double t = freq * p[axis];
                f(i, c++) = std::sin(t);
                f(i, c++) = std::cos(t);
            }
        }
    }
    return f;
}

struct ShapeEmbedding {
    TPtr cond;   // (latent_tokens + 1) x latent_dim; last row is the length token
    TPtr mean;   // latent_tokens x latent_dim
    TPtr logvar; // latent_tokens x latent_dim
};

struct ShapeEncoder {
    ModelConfig cfg;
    Linear feat_proj;
    TPtr latent_query;
    std::vector<EncoderCrossBlock> cross_blocks;
    std::vector<EncoderBlock> self_blocks;
    Norm final_norm;
    Linear mean_head, logvar_head;
    TPtr bucket_emb;

    ShapeEncoder() = default;
    ShapeEncoder(const ModelConfig& c, Rng& rng, double std_dev)
        : cfg(c), feat_proj(c.point_feature_dim(), c.width, rng, 0.02),
          latent_query(make_param(c.latent_tokens, c.width, rng, 0.02)),
          final_norm(c.width, rng), mean_head(c.width, c.latent_dim, rng, 0.02),
          logvar_head(c.width, c.latent_dim, rng, 0.0),
          bucket_emb(make_param(c.buckets, c.latent_dim, rng, 0.02)) {
        for (int i = 0; i < c.encoder_cross; ++i)
            cross_blocks.emplace_back(c.width, c.heads, c.mlp_ratio, rng, std_dev);
        for (int i = 0; i < c.encoder_self; ++i)
            self_blocks.emplace_back(c.width, c.heads, c.mlp_ratio, rng, std_dev);
    }

    // `eps` supplies the reparameterization noise; pass nullptr at inference
    ShapeEmbedding encode(Tape& t, const std::vector<Vec3>& points, int bucket,
                          const Mat* eps) const {
        if (points.empty()) throw ValidationError("encode: empty point cloud");
        if (bucket < 0 || bucket >= cfg.buckets)
            throw ValidationError("encode: bucket out of range");
        TPtr feats = feat_proj.forward(t, make_tensor(point_features(points, cfg)));
        TPtr x = latent_query;
        for (const auto& blk : cross_blocks) x = blk.forward(t, x, feats);
        for (const auto& blk : self_blocks) x = blk.forward(t, x);
        x = final_norm.forward(t, x);
        ShapeEmbedding out;
        out.mean = mean_head.forward(t, x);
        out.logvar = logvar_head.forward(t, x);
        if (!out.mean->v.allFinite() || !out.logvar->v.allFinite())
            throw InternalError("encode: non-finite activations");
        TPtr z = eps ? reparameterize(t, out.mean, out.logvar, *eps) : out.mean;
        out.cond = vstack(t, z, embed_rows(t, bucket_emb, {bucket}));
        return out;
    }

    void collect(ParamMap& out) const {
        feat_proj.collect("enc.feat", out);
        out.emplace_back("enc.query", latent_query);
        for (size_t i = 0; i < cross_blocks.size(); ++i)
            cross_blocks[i].collect("enc.cross" + std::to_string(i), out);
        for (size_t i = 0; i < self_blocks.size(); ++i)
            self_blocks[i].collect("enc.self" + std::to_string(i), out);
        final_norm.collect("enc.norm", out);
        mean_head.collect("enc.mean", out);
        logvar_head.collect("enc.logvar", out);
        out.emplace_back("enc.bucket", bucket_emb);
    }
};

// group arithmetic: input length L includes BOS at position 0
inline int vertex_length(int fine_len) { return (fine_len - 1) / 3; }
inline int edge_length(int fine_len) { return vertex_length(fine_len) / 2; }

struct HourglassDecoder {
    ModelConfig cfg;
    TPtr tok_emb, pos_fine, pos_vertex, pos_edge;
    Linear cond_proj;
    std::vector<DecoderBlock> fine_pre, vertex_pre, edge_blocks, vertex_post, fine_post;
    Norm out_norm;
    Linear head;

    HourglassDecoder() = default;
    HourglassDecoder(const ModelConfig& c, Rng& rng, double std_dev)
        : cfg(c), tok_emb(make_param(c.vocab, c.width, rng, 0.02)),
          pos_fine(make_param(c.max_len, c.width, rng, 0.02)),
          pos_vertex(make_param(c.max_len / 3 + 1, c.width, rng, 0.02)),
          pos_edge(make_param(c.max_len / 6 + 1, c.width, rng, 0.02)),
          cond_proj(c.latent_dim, c.width, rng, 0.02), out_norm(c.width, rng),
          head(c.width, c.vocab, rng, 0.02) {
        for (int i = 0; i < c.depth_fine; ++i) {
            fine_pre.emplace_back(c.width, c.heads, c.mlp_ratio, rng, std_dev);
            fine_post.emplace_back(c.width, c.heads, c.mlp_ratio, rng, std_dev);
        }
        for (int i = 0; i < c.depth_vertex; ++i) {
            vertex_pre.emplace_back(c.width, c.heads, c.mlp_ratio, rng, std_dev);
            vertex_post.emplace_back(c.width, c.heads, c.mlp_ratio, rng, std_dev);
        }
        for (int i = 0; i < c.depth_edge; ++i)
            edge_blocks.emplace_back(c.width, c.heads, c.mlp_ratio, rng, std_dev);
    }

    TPtr forward(Tape& t, const std::vector<int>& tokens, const TPtr& cond_tokens) const {
        int len = int(tokens.size());
        if (len < 1) throw ValidationError("decoder: empty token sequence");
        if (len > cfg.max_len) throw ValidationError("decoder: sequence exceeds max length");
        TPtr cond = cond_proj.forward(t, cond_tokens);

        std::vector<int> iota(len);
        for (int i = 0; i < len; ++i) iota[i] = i;
        TPtr x = add(t, embed_rows(t, tok_emb, tokens), gather_rows(t, pos_fine, iota));
        // the conditioning's last row (the length bucket) also biases every
        // position directly, so stop timing does not rely on cross-attention
        std::vector<int> brow(size_t(len), int(cond->v.rows()) - 1);
        x = add(t, x, gather_rows(t, cond, brow));
        for (const auto& blk : fine_pre) x = blk.forward(t, x, cond);

        int lv = vertex_length(len);
        if (lv > 0) {
            std::vector<int> keep(lv);
            for (int g = 0; g < lv; ++g) keep[g] = 3 * g + 3; // last of each group
            std::vector<int> vpos(lv);
            for (int g = 0; g < lv; ++g) vpos[g] = g;
            TPtr v = add(t, gather_rows(t, x, keep), gather_rows(t, pos_vertex, vpos));
            for (const auto& blk : vertex_pre) v = blk.forward(t, v, cond);

            int le = lv / 2;
            if (le > 0) {
                std::vector<int> keep2(le), epos(le);
                for (int h = 0; h < le; ++h) {
                    keep2[h] = 2 * h + 1;
                    epos[h] = h;
                }
                TPtr e = add(t, gather_rows(t, v, keep2), gather_rows(t, pos_edge, epos));
                for (const auto& blk : edge_blocks) e = blk.forward(t, e, cond);
                std::vector<int> up_v(lv);
                for (int p = 0; p < lv; ++p) up_v[p] = (p + 1) / 2 - 1; // newest legal summary
                v = add(t, v, gather_rows(t, e, up_v));
            }
            for (const auto& blk : vertex_post) v = blk.forward(t, v, cond);

            std::vector<int> up_f(len);
            for (int p = 0; p < len; ++p) up_f[p] = p / 3 - 1;
            x = add(t, x, gather_rows(t, v, up_f));
        }
        for (const auto& blk : fine_post) x = blk.forward(t, x, cond);
        return head.forward(t, out_norm.forward(t, x));
    }

    void collect(ParamMap& out) const {
        out.emplace_back("dec.tok", tok_emb);
        out.emplace_back("dec.pos_f", pos_fine);
        out.emplace_back("dec.pos_v", pos_vertex);
        out.emplace_back("dec.pos_e", pos_edge);
        cond_proj.collect("dec.cond", out);
        auto group = [&](const char* base, const std::vector<DecoderBlock>& blocks) {
            for (size_t i = 0; i < blocks.size(); ++i)
                blocks[i].collect(std::string(base) + std::to_string(i), out);
        };
        group("dec.fpre", fine_pre);
        group("dec.vpre", vertex_pre);
        group("dec.edge", edge_blocks);
        group("dec.vpost", vertex_post);
        group("dec.fpost", fine_post);
        out_norm.collect("dec.norm", out);
        head.collect("dec.head", out);
    }
};

struct SeamModel {
    ModelConfig cfg;
    ShapeEncoder encoder;
    HourglassDecoder decoder;

    SeamModel() = default;
    explicit SeamModel(const ModelConfig& c, std::uint64_t seed = 0) : cfg(c) {
        c.validate();
        Rng rng = derive_rng(seed, "init");
        double std_dev = 0.02 / std::sqrt(2.0 * c.total_blocks());
        encoder = ShapeEncoder(c, rng, std_dev);
        decoder = HourglassDecoder(c, rng, std_dev);
    }

    ParamMap params() const {
        ParamMap out;
        encoder.collect(out);
        decoder.collect(out);
        return out;
    }

    size_t parameter_count() const {
        size_t n = 0;
        for (const auto& [name, p] : params()) n += size_t(p->v.size());
        return n;
    }
};

} // namespace seamkit::nn
