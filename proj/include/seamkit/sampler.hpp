#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "mesh.hpp"
#include "rng.hpp"

namespace seamkit {

enum class PointTag : uint8_t { Vertex = 0, Edge = 1, Surface = 2 };

// Shape-conditioning point cloud: half the budget on vertices (round-robin),
// half on edges (length-proportional interpolation).
struct ConditionCloud {
    std::vector<Vec3> points;
    std::vector<PointTag> tags;
    int budget = 0;
    uint64_t seed = 0;

    size_t size() const { return points.size(); }
};

// Per-edge sample counts: base quota max(1, floor(total * len/sum)), then the
// remainder goes to the longest edges first. When the minimum-one rule
// overshoots the budget, samples are taken back from the shortest edges first,
// dropping an edge to zero only when there are more edges than samples. Ties
// break toward the lower index. Always sums to `total` exactly.
inline std::vector<int> proportional_allocation(const std::vector<double>& lengths, int total) {
    int n = int(lengths.size());
    double sum = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    if (!(sum > 0.0)) throw ValidationError("zero-length total edge measure");

    std::vector<int> counts(n);
    long assigned = 0;
    for (int e = 0; e < n; ++e) {
        counts[e] = std::max(1, int(std::floor(double(total) * lengths[e] / sum)));
        assigned += counts[e];
    }

    std::vector<int> by_length(n);
    std::iota(by_length.begin(), by_length.end(), 0);
    std::stable_sort(by_length.begin(), by_length.end(),
                     [&](int a, int b) { return lengths[a] > lengths[b]; });

    size_t i = 0;
    while (assigned < total) { // deficit: longest first (at most one cycle)
        ++counts[by_length[i % n]];
        ++assigned;
        ++i;
    }
    int floor_limit = total >= n ? 1 : 0;
    i = 0;
    while (assigned > total) { // overshoot: shortest first
        int e = by_length[n - 1 - int(i % n)];
        if (counts[e] > floor_limit) {
            --counts[e];
            --assigned;
        }
        ++i;
    }
    return counts;
}

// Deterministic given (mesh, budget); `jitter` (off by default) perturbs the
// points with gaussian noise drawn from a seed-derived stream.
inline ConditionCloud sample_condition(const TriMesh& mesh, const MeshTopology& topo, int budget,
                                       uint64_t seed = 0, double jitter = 0.0) {
    if (mesh.vertices.empty()) throw ValidationError("cannot sample an empty mesh");
    if (topo.edges.empty()) throw ValidationError("condition sampling requires at least one edge");
    if (budget <= 0 || budget % 2 != 0) throw ValidationError("budget must be even and positive");

    ConditionCloud cloud;
    cloud.budget = budget;
    cloud.seed = seed;
    cloud.points.reserve(budget);
    cloud.tags.reserve(budget);
    int half = budget / 2;

    // Vertex half: round-robin over vertices in index order. Meshes with fewer
    // vertices than the half budget wrap around (repeated over-sampling).
    int nv = int(mesh.vertices.size());
    for (int k = 0; k < half; ++k) {
        cloud.points.push_back(mesh.vertices[k % nv]);
        cloud.tags.push_back(PointTag::Vertex);
    }

    // Edge half: K_e interior samples at parameters (k+0.5)/K_e, emitted in
    // edge index order.
    std::vector<double> lengths(topo.edges.size());
    for (size_t e = 0; e < topo.edges.size(); ++e)
        lengths[e] = (mesh.vertices[topo.edges[e].b] - mesh.vertices[topo.edges[e].a]).norm();
    std::vector<int> counts = proportional_allocation(lengths, half);
    for (size_t e = 0; e < topo.edges.size(); ++e) {
        const Vec3& a = mesh.vertices[topo.edges[e].a];
        const Vec3& b = mesh.vertices[topo.edges[e].b];
        for (int k = 0; k < counts[e]; ++k) {
            double t = (k + 0.5) / counts[e];
            cloud.points.push_back(a + (b - a) * t);
            cloud.tags.push_back(PointTag::Edge);
        }
    }

    if (jitter > 0.0) {
        Rng rng = derive_rng(seed, "sampler-jitter");
        for (Vec3& p : cloud.points)
            p = p + Vec3{rng.gaussian(), rng.gaussian(), rng.gaussian()} * jitter;
    }
    return cloud;
}

// Ablation baseline: area-weighted uniform surface sampling.
inline ConditionCloud sample_uniform_surface(const TriMesh& mesh, int budget, uint64_t seed = 0) {
    ConditionCloud cloud;
    cloud.budget = budget;
    cloud.seed = seed;
    if (budget == 0) return cloud;
    if (mesh.faces.empty()) throw ValidationError("cannot surface-sample a mesh without faces");

    std::vector<double> cum(mesh.faces.size());
    double total = 0.0;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& t = mesh.faces[f];
        total += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
        cum[f] = total;
    }
    if (!(total > 0.0)) throw ValidationError("all faces are degenerate");

    Rng rng = derive_rng(seed, "surface-sample");
    for (int i = 0; i < budget; ++i) {
        double pick = rng.u01() * total;
        size_t f = std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin();
        if (f >= mesh.faces.size()) f = mesh.faces.size() - 1;
        double r1 = std::sqrt(rng.u01()), r2 = rng.u01();
        double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;
        const auto& t = mesh.faces[f];
        cloud.points.push_back(mesh.vertices[t[0]] * wa + mesh.vertices[t[1]] * wb +
                               mesh.vertices[t[2]] * wc);
        cloud.tags.push_back(PointTag::Surface);
    }
    return cloud;
}

// Binary export: per point, little-endian f32 x,y,z then one tag byte.
// A JSON sidecar carries count/budget/seed.
inline void save_cloud(const ConditionCloud& cloud, const std::string& path,
                       const std::string& sidecar_path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    auto put_f32 = [&](double v) {
        float f = float(v);
        uint32_t bits;
        static_assert(sizeof(bits) == sizeof(f));
        std::memcpy(&bits, &f, 4);
        for (int i = 0; i < 4; ++i) out.put(char((bits >> (8 * i)) & 0xFF));
    };
    for (size_t i = 0; i < cloud.points.size(); ++i) {
        put_f32(cloud.points[i].x);
        put_f32(cloud.points[i].y);
        put_f32(cloud.points[i].z);
        out.put(char(uint8_t(cloud.tags[i])));
    }
    out.close();

    nlohmann::json meta = {{"count", cloud.points.size()},
                           {"budget", cloud.budget},
                           {"seed", cloud.seed}};
    std::ofstream side(sidecar_path);
    if (!side) throw ValidationError("cannot open '" + sidecar_path + "' for writing");
    side << meta.dump(2) << "\n";
}

inline ConditionCloud load_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    ConditionCloud cloud;
    std::vector<char> rec(13);
    while (in.read(rec.data(), 13)) {
        Vec3 p;
        for (int c = 0; c < 3; ++c) {
            uint32_t bits = 0;
            for (int i = 0; i < 4; ++i) bits |= uint32_t(uint8_t(rec[4 * c + i])) << (8 * i);
            float f;
            std::memcpy(&f, &bits, 4);
            p[c] = f;
        }
        cloud.points.push_back(p);
        cloud.tags.push_back(PointTag(uint8_t(rec[12])));
    }
    if (in.gcount() != 0) throw ValidationError("truncated point-cloud record in '" + path + "'");
    cloud.budget = int(cloud.points.size());
    return cloud;
}

} // namespace seamkit
