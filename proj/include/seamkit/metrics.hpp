#pragma once

// Conformal distortion of a UV layout: per-face singular values of the
// 3D-tangent -> UV linear map and the energy |ln s1| + |ln s2|.

#include <cmath>
#include <limits>
#include <vector>

#include <seamkit/mesh.hpp>

namespace seamkit {

struct FaceMetric {
    double sigma1 = 0.0; // larger singular value
    double sigma2 = 0.0;
    double e_conf = 0.0;
    bool counted = false; // false when either area is degenerate
};

struct MetricSummary {
    std::vector<FaceMetric> faces; // parallel to the face list passed in
    double mean_e_conf = std::numeric_limits<double>::quiet_NaN();
    int counted = 0;
    int skipped = 0;
};

constexpr double kDegenerateArea = 1e-12;

namespace detail {

// Orthonormal in-plane coordinates of a 3D triangle, origin at p0.
struct TangentFrame {
    Vec2 q1, q2; // p1 and p2 in the frame; p0 maps to the origin
    double area = 0.0;
    bool ok = false;
};

inline TangentFrame tangent_frame(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    TangentFrame fr;
    Vec3 u = p1 - p0;
    Vec3 w = p2 - p0;
    Vec3 n = u.cross(w);
    double n_len = n.norm();
    fr.area = 0.5 * n_len;
    if (fr.area <= kDegenerateArea) return fr;
    Vec3 e1 = u.normalized();
    Vec3 e2 = (n * (1.0 / n_len)).cross(e1);
    fr.q1 = {u.norm(), 0.0};
    fr.q2 = {w.dot(e1), w.dot(e2)};
    fr.ok = true;
    return fr;
}

// Singular values of a 2x2 matrix [[a,b],[c,d]], closed form.
inline void svd_2x2(double a, double b, double c, double d, double& s1, double& s2) {
    double e = (a + d) * 0.5;
    double f = (a - d) * 0.5;
    double g = (c + b) * 0.5;
    double h = (c - b) * 0.5;
    double q = std::hypot(e, h);
    double r = std::hypot(f, g);
    s1 = q + r;
    s2 = std::abs(q - r);
}

} // namespace detail

// Per-face conformal energy of `faces` under the vertex-indexed layout `uv`.
// Faces whose 3D or UV area is at or below kDegenerateArea are skipped.
inline MetricSummary conformal_energy(const TriMesh& mesh, const std::vector<int>& faces,
                                      const std::vector<Vec2>& uv) {
    MetricSummary out;
    out.faces.resize(faces.size());
    double total = 0.0;
    for (size_t i = 0; i < faces.size(); ++i) {
        const auto& t = mesh.faces[faces[i]];
        auto fr = detail::tangent_frame(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                        mesh.vertices[t[2]]);
        Vec2 u1 = uv[t[1]] - uv[t[0]];
        Vec2 u2 = uv[t[2]] - uv[t[0]];
        double uv_area = 0.5 * std::abs(u1.x * u2.y - u1.y * u2.x);
        if (!fr.ok || uv_area <= kDegenerateArea) {
            ++out.skipped;
            continue;
        }
        // J maps frame coordinates to UV: J * [q1 q2] = [u1 u2]
        double det = fr.q1.x * fr.q2.y - fr.q1.y * fr.q2.x; // = 2 * area3d
        double inv = 1.0 / det;
        double a = (u1.x * fr.q2.y - u2.x * fr.q1.y) * inv;
        double b = (u2.x * fr.q1.x - u1.x * fr.q2.x) * inv;
        double c = (u1.y * fr.q2.y - u2.y * fr.q1.y) * inv;
        double d = (u2.y * fr.q1.x - u1.y * fr.q2.x) * inv;
        FaceMetric& fm = out.faces[i];
        detail::svd_2x2(a, b, c, d, fm.sigma1, fm.sigma2);
        fm.e_conf = std::abs(std::log(fm.sigma1)) + std::abs(std::log(fm.sigma2));
        fm.counted = true;
        total += fm.e_conf;
        ++out.counted;
    }
    if (out.counted > 0) out.mean_e_conf = total / out.counted;
    return out;
}

} // namespace seamkit
