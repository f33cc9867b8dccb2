#pragma once

// Least-squares conformal flattening of disk charts.
//
// Per triangle, with complex local coordinates s_j of the corners, the
// anti-conformal derivative of the linear UV map is proportional to
//   sum_j (s_{j+1} - s_{j+2}) * w_j / (2*sqrt(area)),
// where w_j are the (complex) UV values. Stacking these rows over all
// triangles and pinning two vertices gives a sparse least-squares problem.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <seamkit/errors.hpp>
#include <seamkit/mesh.hpp>
#include <seamkit/metrics.hpp>

namespace seamkit {

struct FlattenResult {
    std::vector<int> vertices;  // chart vertices, ascending
    std::vector<Vec2> uv;       // indexed by mesh vertex id; zeros off-chart
    double residual = 0.0;      // relative least-squares residual at exit
    int iterations = 0;
    std::pair<int, int> pins{-1, -1};
};

namespace detail {

// Farthest boundary vertex from `src`, by edge-path distance within the chart.
// Ties resolve to the smallest vertex index.
inline int farthest_boundary_vertex(const std::vector<std::vector<std::pair<int, double>>>& adj,
                                    const std::vector<char>& on_boundary, int src) {
    std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (auto [nb, len] : adj[v])
            if (d + len < dist[nb]) {
                dist[nb] = d + len;
                heap.push({dist[nb], nb});
            }
    }
    int best = -1;
    double best_d = -1.0;
    for (size_t v = 0; v < adj.size(); ++v) {
        if (!on_boundary[v] || std::isinf(dist[v])) continue;
        if (dist[v] > best_d) {
            best_d = dist[v];
            best = int(v);
        }
    }
    return best;
}

} // namespace detail

// Flatten one disk chart. Pins default to the approximate boundary diameter
// (double farthest-point sweep) placed at (0,0) and (1,0); the solved layout
// is then rescaled so total UV area matches total 3D area.
inline FlattenResult flatten_chart(const TriMesh& mesh, const std::vector<int>& chart_faces,
                                   Vec2 pin_pos_a = {0.0, 0.0}, Vec2 pin_pos_b = {1.0, 0.0}) {
    if (chart_faces.empty()) throw ValidationError("flatten: chart has no faces");
    ChartTopologyInfo info = chart_topology(mesh, chart_faces);
    if (!info.is_disk) {
        std::ostringstream msg;
        msg << "flatten: chart is not a disk (genus " << info.genus << ", "
            << info.boundary_loop_count << " boundary loops, euler " << info.euler << ")";
        throw TopologyError(msg.str());
    }

    // chart-local vertex numbering, ascending mesh ids
    std::vector<int> verts;
    {
        std::vector<char> in(mesh.vertices.size(), 0);
        for (int f : chart_faces)
            for (int v : mesh.faces[f]) in[v] = 1;
        for (size_t v = 0; v < in.size(); ++v)
            if (in[v]) verts.push_back(int(v));
    }
    std::unordered_map<int, int> local;
    for (size_t i = 0; i < verts.size(); ++i) local[verts[i]] = int(i);
    int n = int(verts.size());

    // boundary flags and a local edge graph for the pin sweep
    std::unordered_map<EdgeKey, int, EdgeKeyHash> edge_count;
    for (int f : chart_faces) {
        const auto& t = mesh.faces[f];
        for (int c = 0; c < 3; ++c) ++edge_count[EdgeKey(t[c], t[(c + 1) % 3])];
    }
    std::vector<char> on_boundary(n, 0);
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& [e, count] : edge_count) {
        int a = local[e.a], b = local[e.b];
        double len = (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
        adj[a].emplace_back(b, len);
        adj[b].emplace_back(a, len);
        if (count == 1) on_boundary[a] = on_boundary[b] = 1;
    }
    int start = -1;
    for (int v = 0; v < n && start < 0; ++v)
        if (on_boundary[v]) start = v;
    if (start < 0) throw TopologyError("flatten: chart has no boundary");
    int pin_a = detail::farthest_boundary_vertex(adj, on_boundary, start);
    int pin_b = detail::farthest_boundary_vertex(adj, on_boundary, pin_a);
    if (pin_a == pin_b) throw TopologyError("flatten: degenerate boundary");
    if (pin_a > pin_b) std::swap(pin_a, pin_b);

    // unknown columns: 2 per non-pinned vertex
    std::vector<int> col(n, -1);
    int m = 0;
    for (int v = 0; v < n; ++v)
        if (v != pin_a && v != pin_b) col[v] = 2 * (m++);
    auto pin_value = [&](int v) { return v == pin_a ? pin_pos_a : pin_pos_b; };

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(chart_faces.size() * 12);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * int(chart_faces.size()));
    int row = 0;
    for (int f : chart_faces) {
        const auto& t = mesh.faces[f];
        auto fr = detail::tangent_frame(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                        mesh.vertices[t[2]]);
        if (!fr.ok) {
            std::ostringstream msg;
            msg << "flatten: face " << f << " has zero 3D area";
            throw ValidationError(msg.str());
        }
        std::complex<double> s[3] = {{0.0, 0.0}, {fr.q1.x, fr.q1.y}, {fr.q2.x, fr.q2.y}};
        double w = 1.0 / std::sqrt(2.0 * (2.0 * fr.area));
        for (int j = 0; j < 3; ++j) {
            std::complex<double> k = (s[(j + 1) % 3] - s[(j + 2) % 3]) * w;
            int v = local[t[j]];
            if (col[v] >= 0) {
                trips.emplace_back(row, col[v], k.real());
                trips.emplace_back(row, col[v] + 1, -k.imag());
                trips.emplace_back(row + 1, col[v], k.imag());
                trips.emplace_back(row + 1, col[v] + 1, k.real());
            } else {
                Vec2 p = pin_value(v);
                rhs[row] -= k.real() * p.x - k.imag() * p.y;
                rhs[row + 1] -= k.imag() * p.x + k.real() * p.y;
            }
        }
        row += 2;
    }
    Eigen::SparseMatrix<double> A(2 * int(chart_faces.size()), 2 * m);
    A.setFromTriplets(trips.begin(), trips.end());

    FlattenResult out;
    Eigen::VectorXd x;
    if (m > 0) {
        Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> solver;
        solver.setTolerance(1e-10);
        solver.setMaxIterations(10000);
        solver.compute(A);
        x = solver.solve(rhs);
        out.residual = solver.error();
        out.iterations = int(solver.iterations());
        if (solver.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "flatten: solver did not converge (relative residual " << solver.error()
                << " after " << solver.iterations() << " iterations)";
            throw InternalError(msg.str());
        }
    }

    out.vertices = verts;
    out.uv.assign(mesh.vertices.size(), Vec2{0.0, 0.0});
    for (int v = 0; v < n; ++v)
        out.uv[verts[v]] = col[v] >= 0 ? Vec2{x[col[v]], x[col[v] + 1]} : pin_value(v);
    out.pins = {verts[pin_a], verts[pin_b]};

    // uniform rescale so total UV area matches total 3D area
    double area3 = 0.0, area2 = 0.0;
    for (int f : chart_faces) {
        const auto& t = mesh.faces[f];
        area3 += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
        area2 += std::abs(
            triangle_area_2d(out.uv[t[0]], out.uv[t[1]], out.uv[t[2]]));
    }
    if (area2 > kDegenerateArea) {
        double s = std::sqrt(area3 / area2);
        for (int v : verts) out.uv[v] = out.uv[v] * s;
    }
    return out;
}

} // namespace seamkit
