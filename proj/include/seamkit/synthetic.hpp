#pragma once

// Procedural training shapes with canonical seams: subdivided boxes cut by a
// 7-edge corner spanning tree, cylinders cut by a vertical line (plus cap
// rings when capped), and UV spheres cut by a meridian and two pole rings.
// Every sample keeps the seam-per-vertex ratio inside the advisory band by
// redrawing its parameters.

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include <seamkit/errors.hpp>
#include <seamkit/mesh.hpp>
#include <seamkit/rng.hpp>
#include <seamkit/seam.hpp>

namespace seamkit {

struct SyntheticSample {
    TriMesh mesh; // normalized to [-1,1]^3
    SeamSequence seam;
    std::string kind;
};

constexpr double kRatioLow = 0.1;
constexpr double kRatioHigh = 0.35;

inline double seam_ratio(const SyntheticSample& s) {
    return double(s.seam.segments.size()) / double(s.mesh.vertices.size());
}

namespace detail {

inline void push_seam_edge(SyntheticSample& s, int va, int vb) {
    s.seam.segments.push_back({s.mesh.vertices[va], s.mesh.vertices[vb]});
}

// Box subdivided k times per edge, half extents (a,b,c), corner spanning tree.
inline SyntheticSample make_box(int k, double a, double b, double c) {
    SyntheticSample out;
    out.kind = "box";
    std::unordered_map<long long, int> lattice;
    double ext[3] = {a, b, c};
    auto vertex_id = [&](int x, int y, int z) {
        long long key = (static_cast<long long>(x) * (k + 1) + y) * (k + 1) + z;
        auto it = lattice.find(key);
        if (it != lattice.end()) return it->second;
        int id = int(out.mesh.vertices.size());
        lattice.emplace(key, id);
        out.mesh.vertices.emplace_back(ext[0] * (2.0 * x / k - 1.0), ext[1] * (2.0 * y / k - 1.0),
                                       ext[2] * (2.0 * z / k - 1.0));
        return id;
    };
    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side) {
            int bx = (axis + 1) % 3, cx = (axis + 2) % 3;
            auto corner = [&](int i, int j) {
                int p[3];
                p[axis] = side ? k : 0;
                p[bx] = i;
                p[cx] = j;
                return vertex_id(p[0], p[1], p[2]);
            };
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    int p00 = corner(i, j), p10 = corner(i + 1, j);
                    int p11 = corner(i + 1, j + 1), p01 = corner(i, j + 1);
                    if (side) {
                        out.mesh.faces.push_back({p00, p10, p11});
                        out.mesh.faces.push_back({p00, p11, p01});
                    } else {
                        out.mesh.faces.push_back({p00, p01, p11});
                        out.mesh.faces.push_back({p00, p11, p10});
                    }
                }
        }
    normalize_to_unit_cube(out.mesh);

    // spanning tree over the 8 corners; each tree edge is a chain of k segments
    const int corners[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    const int tree[7][2] = {{0, 1}, {0, 3}, {0, 4}, {1, 5}, {3, 2}, {3, 7}, {2, 6}};
    for (const auto& edge : tree) {
        int p[3], q[3];
        for (int d = 0; d < 3; ++d) {
            p[d] = corners[edge[0]][d] * k;
            q[d] = corners[edge[1]][d] * k;
        }
        int axis = p[0] != q[0] ? 0 : (p[1] != q[1] ? 1 : 2);
        int step = q[axis] > p[axis] ? 1 : -1;
        for (int t = 0; t < k; ++t) {
            int r[3] = {p[0], p[1], p[2]}, s[3] = {p[0], p[1], p[2]};
            r[axis] = p[axis] + t * step;
            s[axis] = p[axis] + (t + 1) * step;
            auto key = [&](const int* p) {
                return (static_cast<long long>(p[0]) * (k + 1) + p[1]) * (k + 1) + p[2];
            };
            detail::push_seam_edge(out, lattice.at(key(r)), lattice.at(key(s)));
        }
    }
    return out;
}

// Cylinder along y. Tube vertex (ring j, spoke i) = j*n_r + i. When capped,
// the two cap centers follow the tube vertices and the seam gains both rims.
inline SyntheticSample make_cylinder(int n_r, int n_h, double radius, double height, bool capped) {
    SyntheticSample out;
    out.kind = "cylinder";
    for (int j = 0; j <= n_h; ++j)
        for (int i = 0; i < n_r; ++i) {
            double ang = 2.0 * 3.14159265358979323846 * i / n_r;
            out.mesh.vertices.emplace_back(radius * std::cos(ang), height * (double(j) / n_h - 0.5),
                                           radius * std::sin(ang));
        }
    auto tube = [&](int j, int i) { return j * n_r + (i % n_r); };
    for (int j = 0; j < n_h; ++j)
        for (int i = 0; i < n_r; ++i) {
            out.mesh.faces.push_back({tube(j, i), tube(j + 1, i), tube(j + 1, i + 1)});
            out.mesh.faces.push_back({tube(j, i), tube(j + 1, i + 1), tube(j, i + 1)});
        }
    if (capped) {
        int bottom = int(out.mesh.vertices.size());
        out.mesh.vertices.emplace_back(0.0, -height * 0.5, 0.0);
        int top = int(out.mesh.vertices.size());
        out.mesh.vertices.emplace_back(0.0, height * 0.5, 0.0);
        for (int i = 0; i < n_r; ++i) {
            out.mesh.faces.push_back({bottom, tube(0, i), tube(0, i + 1)});
            out.mesh.faces.push_back({top, tube(n_h, i + 1), tube(n_h, i)});
        }
    }
    normalize_to_unit_cube(out.mesh);

    for (int j = 0; j < n_h; ++j) detail::push_seam_edge(out, tube(j, 0), tube(j + 1, 0));
    if (capped)
        for (int i = 0; i < n_r; ++i) {
            detail::push_seam_edge(out, tube(0, i), tube(0, i + 1));
            detail::push_seam_edge(out, tube(n_h, i), tube(n_h, i + 1));
        }
    return out;
}

// UV sphere: poles 0 and 1, ring vertex (k,i) = 2 + (k-1)*n_lon + i.
inline SyntheticSample make_sphere(int n_lat, int n_lon, double radius) {
    SyntheticSample out;
    out.kind = "sphere";
    out.mesh.vertices.emplace_back(0.0, radius, 0.0);
    out.mesh.vertices.emplace_back(0.0, -radius, 0.0);
    for (int k = 1; k < n_lat; ++k) {
        double phi = 3.14159265358979323846 * k / n_lat;
        for (int i = 0; i < n_lon; ++i) {
            double th = 2.0 * 3.14159265358979323846 * i / n_lon;
            out.mesh.vertices.emplace_back(radius * std::sin(phi) * std::cos(th),
                                           radius * std::cos(phi),
                                           radius * std::sin(phi) * std::sin(th));
        }
    }
    auto ring = [&](int k, int i) { return 2 + (k - 1) * n_lon + (i % n_lon); };
    for (int i = 0; i < n_lon; ++i) {
        out.mesh.faces.push_back({0, ring(1, i + 1), ring(1, i)});
        out.mesh.faces.push_back({1, ring(n_lat - 1, i), ring(n_lat - 1, i + 1)});
    }
    for (int k = 1; k < n_lat - 1; ++k)
        for (int i = 0; i < n_lon; ++i) {
            out.mesh.faces.push_back({ring(k, i), ring(k, i + 1), ring(k + 1, i + 1)});
            out.mesh.faces.push_back({ring(k, i), ring(k + 1, i + 1), ring(k + 1, i)});
        }
    normalize_to_unit_cube(out.mesh);

    // meridian pole-to-pole at spoke 0, plus the two rings adjacent to the poles
    detail::push_seam_edge(out, 0, ring(1, 0));
    for (int k = 1; k < n_lat - 1; ++k) detail::push_seam_edge(out, ring(k, 0), ring(k + 1, 0));
    detail::push_seam_edge(out, ring(n_lat - 1, 0), 1);
    for (int i = 0; i < n_lon; ++i) {
        detail::push_seam_edge(out, ring(1, i), ring(1, i + 1));
        detail::push_seam_edge(out, ring(n_lat - 1, i), ring(n_lat - 1, i + 1));
    }
    return out;
}

} // namespace detail

// One deterministic sample; `index` selects the shape family round-robin.
inline SyntheticSample make_synthetic_sample(std::uint64_t seed, int index) {
    Rng rng = derive_rng(seed, "synth", std::uint64_t(index));
    for (int attempt = 0; attempt < 100; ++attempt) {
        SyntheticSample s;
        switch (index % 3) {
        case 0:
            s = detail::make_box(3 + int(rng.uniform_int(0, 9)), rng.uniform(0.4, 1.0),
                                 rng.uniform(0.4, 1.0), rng.uniform(0.4, 1.0));
            break;
        case 1:
            s = detail::make_cylinder(5 + int(rng.uniform_int(0, 6)), 4 + int(rng.uniform_int(0, 8)),
                                      rng.uniform(0.3, 0.8), rng.uniform(0.8, 1.8),
                                      rng.u01() < 0.5);
            break;
        default:
            s = detail::make_sphere(8 + 2 * int(rng.uniform_int(0, 3)), 10 + int(rng.uniform_int(0, 6)),
                                    rng.uniform(0.5, 1.0));
            break;
        }
        double r = seam_ratio(s);
        if (r >= kRatioLow && r <= kRatioHigh) return s;
    }
    throw InternalError("synthetic: could not reach the advisory seam ratio");
}

inline std::vector<SyntheticSample> make_synthetic_dataset(int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("synthetic: dataset size must be at least 1");
    std::vector<SyntheticSample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(make_synthetic_sample(seed, i));
    return out;
}

} // namespace seamkit
