#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <seamkit/mesh.hpp>

namespace fixtures {

using seamkit::TriMesh;
using seamkit::Vec2;
using seamkit::Vec3;

inline TriMesh single_triangle() {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.faces = {{0, 1, 2}};
    return m;
}

inline TriMesh tetrahedron() {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, 0.5, 1}};
    m.faces = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}};
    return m;
}

// Two triangles sharing exactly one vertex (index 2).
inline TriMesh bowtie() {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {2, 0, 0}, {2, 2, 0}};
    m.faces = {{0, 1, 2}, {2, 3, 4}};
    return m;
}

// Flat quad split along the diagonal. `split_uv` places each triangle in its
// own UV island; otherwise the chart is continuous.
inline TriMesh quad(bool split_uv = false) {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    m.faces = {{0, 1, 2}, {0, 2, 3}};
    if (!split_uv) {
        m.uv_corners = {{0, 0}, {1, 0}, {1, 1}, {0, 0}, {1, 1}, {0, 1}};
    } else {
        m.uv_corners = {{0, 0}, {0.4, 0}, {0.4, 0.4}, {0.6, 0}, {1, 0}, {0.6, 0.4}};
    }
    return m;
}

// Planar grid of (nx+1) x (ny+1) vertices in the xy plane, spanning
// [0,sx] x [0,sy]. Vertex (i,j) has index j*(nx+1)+i.
inline TriMesh grid(int nx, int ny, double sx = 1.0, double sy = 1.0) {
    TriMesh m;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.vertices.emplace_back(sx * i / nx, sy * j / ny, 0.0);
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

// Unit cube triangulated from quads, with UVs laid out as the classic cross
// unfolding: all 6 squares form one chart connected through 5 fold edges, so
// exactly 7 of the 12 cube edges separate UV coordinates. Geometry spans
// [-1,1]^3 so normalization is the identity.
struct CrossCube {
    TriMesh mesh;
    std::vector<seamkit::EdgeKey> cut_edges;  // the 7 seam edges
    std::vector<seamkit::EdgeKey> fold_edges; // the 5 continuous edges
};

inline CrossCube cross_cube() {
    CrossCube cc;
    TriMesh& m = cc.mesh;
    m.vertices = {
        {-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
        {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1},
    };

    // Cross layout on a 5x4 cell grid (scaled into [0,1]^2 at the end):
    // columns: left 0-1, front 1-2, right 2-3, back 3-4; top/bottom above and
    // below the front square. Folds: front-left, front-right, front-top,
    // front-bottom, right-back.
    struct QuadSpec {
        std::array<int, 4> corners;
        Vec2 (*uv)(const Vec3&);
    };
    const QuadSpec quads[6] = {
        {{4, 5, 6, 7}, +[](const Vec3& p) { return Vec2{1 + (p.x + 1) / 2, 1 + (p.y + 1) / 2}; }},
        {{1, 0, 3, 2}, +[](const Vec3& p) { return Vec2{4 - (p.x + 1) / 2, 1 + (p.y + 1) / 2}; }},
        {{0, 4, 7, 3}, +[](const Vec3& p) { return Vec2{(p.z + 1) / 2, 1 + (p.y + 1) / 2}; }},
        {{5, 1, 2, 6}, +[](const Vec3& p) { return Vec2{3 - (p.z + 1) / 2, 1 + (p.y + 1) / 2}; }},
        {{7, 6, 2, 3}, +[](const Vec3& p) { return Vec2{1 + (p.x + 1) / 2, 3 - (p.z + 1) / 2}; }},
        {{0, 1, 5, 4}, +[](const Vec3& p) { return Vec2{1 + (p.x + 1) / 2, (p.z + 1) / 2}; }},
    };

    for (const QuadSpec& q : quads) {
        const auto& c = q.corners;
        m.faces.push_back({c[0], c[1], c[2]});
        m.faces.push_back({c[0], c[2], c[3]});
        for (int idx : {c[0], c[1], c[2], c[0], c[2], c[3]}) {
            Vec2 t = q.uv(m.vertices[idx]);
            m.uv_corners.push_back({t.x / 4.0, t.y / 4.0});
        }
    }

    cc.fold_edges = {{4, 7}, {5, 6}, {6, 7}, {4, 5}, {1, 2}};
    cc.cut_edges = {{0, 1}, {1, 5}, {0, 4}, {2, 3}, {2, 6}, {3, 7}, {0, 3}};
    return cc;
}

// Open cylinder (no caps): n_radial columns, n_height quad rows, radius r,
// height h, axis y. Vertex (i,j) = j*n_radial + i.
inline TriMesh open_cylinder(int n_radial, int n_height, double r = 0.8, double h = 1.6) {
    TriMesh m;
    for (int j = 0; j <= n_height; ++j) {
        double y = -h / 2 + h * j / n_height;
        for (int i = 0; i < n_radial; ++i) {
            double a = 2.0 * 3.14159265358979323846 * i / n_radial;
            m.vertices.emplace_back(r * std::cos(a), y, r * std::sin(a));
        }
    }
    auto id = [&](int i, int j) { return j * n_radial + (i % n_radial); };
    for (int j = 0; j < n_height; ++j)
        for (int i = 0; i < n_radial; ++i) {
            m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

// UV sphere with two pole vertices, n_lat latitude bands, n_lon columns.
// Interior ring k (1..n_lat-1) starts at index 2 + (k-1)*n_lon; poles are 0
// (north, +y) and 1 (south, -y).
inline TriMesh uv_sphere(int n_lat, int n_lon, double r = 0.9) {
    TriMesh m;
    m.vertices.emplace_back(0, r, 0);
    m.vertices.emplace_back(0, -r, 0);
    for (int k = 1; k < n_lat; ++k) {
        double phi = 3.14159265358979323846 * k / n_lat; // from north pole
        for (int i = 0; i < n_lon; ++i) {
            double a = 2.0 * 3.14159265358979323846 * i / n_lon;
            m.vertices.emplace_back(r * std::sin(phi) * std::cos(a), r * std::cos(phi),
                                    r * std::sin(phi) * std::sin(a));
        }
    }
    auto ring = [&](int k, int i) { return 2 + (k - 1) * n_lon + (i % n_lon); };
    for (int i = 0; i < n_lon; ++i) {
        m.faces.push_back({0, ring(1, i + 1), ring(1, i)});
        m.faces.push_back({1, ring(n_lat - 1, i), ring(n_lat - 1, i + 1)});
    }
    for (int k = 1; k + 1 < n_lat; ++k)
        for (int i = 0; i < n_lon; ++i) {
            m.faces.push_back({ring(k, i), ring(k, i + 1), ring(k + 1, i + 1)});
            m.faces.push_back({ring(k, i), ring(k + 1, i + 1), ring(k + 1, i)});
        }
    return m;
}

} // namespace fixtures
