#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "codec.hpp"
#include "mesh.hpp"
#include "seam.hpp"

namespace seamkit {

// Ground-truth seams: boundaries between UV islands, projected back to mesh
// edges. Islands are face components connected through UV-continuous edges.
struct SeamEdgeSet {
    std::vector<EdgeKey> edges; // ascending canonical order
    std::vector<std::vector<int>> islands;
};

namespace detail {

// UV a face assigns to one of its vertices.
inline Vec2 face_uv_at(const TriMesh& mesh, int face, int vertex) {
    const auto& t = mesh.faces[face];
    for (int c = 0; c < 3; ++c)
        if (t[c] == vertex) return mesh.uv(face, c);
    throw InternalError("face does not reference vertex");
}

inline bool uv_close(const Vec2& a, const Vec2& b, double tol) {
    return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol;
}

// An interior edge separates UV islands when its incident faces disagree on
// the UV of either shared endpoint.
inline bool edge_splits_uv(const TriMesh& mesh, const MeshTopology& topo, int edge, double tol) {
    const auto& faces = topo.edge_faces[edge];
    if (faces.size() < 2) return false; // boundary edges are already open
    const EdgeKey& e = topo.edges[edge];
    for (int endpoint : {e.a, e.b}) {
        Vec2 ref = face_uv_at(mesh, faces[0], endpoint);
        for (size_t i = 1; i < faces.size(); ++i)
            if (!uv_close(ref, face_uv_at(mesh, faces[i], endpoint), tol)) return true;
    }
    return false;
}

} // namespace detail

struct ExtractResult {
    SeamEdgeSet seam_set;
    SeamSequence seam; // bin-centered normalized segments, canonical order
};

// Mesh coordinates must already live in [-1,1] (normalize first); segment
// endpoints are snapped to quantization bin centers so downstream encoding is
// an exact round-trip.
inline ExtractResult extract_seams(const TriMesh& mesh, const MeshTopology& topo,
                                   double uv_tol = 1e-7, const CodecConfig& cfg = {}) {
    if (!mesh.has_uvs()) throw ValidationError("seam extraction requires per-corner UVs");
    mesh.validate();

    ExtractResult out;
    std::vector<char> is_seam(topo.edges.size(), 0);
    for (size_t e = 0; e < topo.edges.size(); ++e) {
        if (detail::edge_splits_uv(mesh, topo, int(e), uv_tol)) {
            is_seam[e] = 1;
            out.seam_set.edges.push_back(topo.edges[e]);
        }
    }
    std::sort(out.seam_set.edges.begin(), out.seam_set.edges.end());

    out.seam_set.islands = face_components(mesh, topo, [&](int e) { return !is_seam[e]; });

    if (!out.seam_set.edges.empty()) {
        std::vector<SeamSegment> segs;
        segs.reserve(out.seam_set.edges.size());
        for (const EdgeKey& e : out.seam_set.edges)
            segs.push_back({mesh.vertices[e.a], mesh.vertices[e.b]});
        out.seam = make_canonical(segs, cfg);
    }
    return out;
}

// --- layout validation --------------------------------------------------------

struct UvValidationReport {
    std::vector<int> degenerate_uv_faces;          // zero or negative signed UV area
    std::vector<std::pair<int, int>> overlap_pairs; // same-island UV triangle overlaps
    std::vector<int> non_disk_islands;
    bool clean() const {
        return degenerate_uv_faces.empty() && overlap_pairs.empty() && non_disk_islands.empty();
    }
};

namespace detail {

// Strict overlap (positive-area intersection) via separating axes; triangles
// that merely touch along an edge or vertex do not overlap.
inline bool triangles_overlap_2d(const std::array<Vec2, 3>& A, const std::array<Vec2, 3>& B,
                                 double eps = 1e-12) {
    auto separated_on = [&](Vec2 axis) {
        double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
        for (const Vec2& p : A) {
            double d = p.dot(axis);
            amin = std::min(amin, d);
            amax = std::max(amax, d);
        }
        for (const Vec2& p : B) {
            double d = p.dot(axis);
            bmin = std::min(bmin, d);
            bmax = std::max(bmax, d);
        }
        return amax <= bmin + eps || bmax <= amin + eps;
    };
    for (const auto& tri : {A, B})
        for (int i = 0; i < 3; ++i) {
            Vec2 e = tri[(i + 1) % 3] - tri[i];
            double len = e.norm();
            if (len <= 0) continue;
            if (separated_on(Vec2{-e.y / len, e.x / len})) return false;
        }
    return true;
}

// Cluster face corners per vertex by UV proximity, producing "UV vertex" ids.
// Faces rebuilt on these ids describe the layout's intrinsic (cut) topology.
inline std::vector<std::array<int, 3>> uv_faces(const TriMesh& mesh, double tol) {
    std::vector<std::array<int, 3>> out(mesh.faces.size());
    std::unordered_map<int, std::vector<std::pair<Vec2, int>>> clusters; // vertex -> (uv, id)
    int next_id = 0;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            int v = mesh.faces[f][c];
            Vec2 t = mesh.uv(int(f), c);
            auto& list = clusters[v];
            int id = -1;
            for (const auto& [uv, cid] : list)
                if (uv_close(uv, t, tol)) {
                    id = cid;
                    break;
                }
            if (id < 0) {
                id = next_id++;
                list.emplace_back(t, id);
            }
            out[f][c] = id;
        }
    }
    return out;
}

} // namespace detail

inline UvValidationReport validate_uv_layout(const TriMesh& mesh, const MeshTopology& topo,
                                             double uv_tol = 1e-7) {
    if (!mesh.has_uvs()) throw ValidationError("layout validation requires per-corner UVs");
    UvValidationReport report;

    int nf = int(mesh.faces.size());
    std::vector<std::array<Vec2, 3>> tri_uv(nf);
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (int f = 0; f < nf; ++f) {
        for (int c = 0; c < 3; ++c) {
            tri_uv[f][c] = mesh.uv(f, c);
            lo.x = std::min(lo.x, tri_uv[f][c].x);
            lo.y = std::min(lo.y, tri_uv[f][c].y);
            hi.x = std::max(hi.x, tri_uv[f][c].x);
            hi.y = std::max(hi.y, tri_uv[f][c].y);
        }
        if (triangle_area_2d(tri_uv[f][0], tri_uv[f][1], tri_uv[f][2]) <= 0.0)
            report.degenerate_uv_faces.push_back(f);
    }

    ExtractResult ex = [&] {
        ExtractResult r;
        std::vector<char> is_seam(topo.edges.size(), 0);
        for (size_t e = 0; e < topo.edges.size(); ++e)
            is_seam[e] = detail::edge_splits_uv(mesh, topo, int(e), uv_tol);
        r.seam_set.islands = face_components(mesh, topo, [&](int e) { return !is_seam[e]; });
        return r;
    }();
    std::vector<int> island_of(nf, -1);
    for (size_t k = 0; k < ex.seam_set.islands.size(); ++k)
        for (int f : ex.seam_set.islands[k]) island_of[f] = int(k);

    // Broad phase: uniform grid over the UV bbox, 64 cells across the longer
    // side, so candidate pairs stay near-linear in face count.
    double extent = std::max(hi.x - lo.x, hi.y - lo.y);
    double cell = extent > 0 ? extent / 64.0 : 1.0;
    std::unordered_map<int64_t, std::vector<int>> grid_cells;
    auto cell_key = [](int ix, int iy) { return (int64_t(ix) << 32) | uint32_t(iy); };
    std::vector<char> degenerate(nf, 0);
    for (int f : report.degenerate_uv_faces) degenerate[f] = 1;
    for (int f = 0; f < nf; ++f) {
        if (degenerate[f]) continue;
        Vec2 flo{1e300, 1e300}, fhi{-1e300, -1e300};
        for (const Vec2& p : tri_uv[f]) {
            flo.x = std::min(flo.x, p.x);
            flo.y = std::min(flo.y, p.y);
            fhi.x = std::max(fhi.x, p.x);
            fhi.y = std::max(fhi.y, p.y);
        }
        int x0 = int(std::floor((flo.x - lo.x) / cell)), x1 = int(std::floor((fhi.x - lo.x) / cell));
        int y0 = int(std::floor((flo.y - lo.y) / cell)), y1 = int(std::floor((fhi.y - lo.y) / cell));
        for (int ix = x0; ix <= x1; ++ix)
            for (int iy = y0; iy <= y1; ++iy) grid_cells[cell_key(ix, iy)].push_back(f);
    }
    std::set<std::pair<int, int>> overlap;
    for (const auto& [_, faces] : grid_cells)
        for (size_t i = 0; i < faces.size(); ++i)
            for (size_t j = i + 1; j < faces.size(); ++j) {
                int a = std::min(faces[i], faces[j]), b = std::max(faces[i], faces[j]);
                if (island_of[a] != island_of[b] || overlap.count({a, b})) continue;
                if (detail::triangles_overlap_2d(tri_uv[a], tri_uv[b])) overlap.insert({a, b});
            }
    report.overlap_pairs.assign(overlap.begin(), overlap.end());

    // Island topology in UV space (corner clustering splits seam-glued verts).
    auto uvf = detail::uv_faces(mesh, uv_tol);
    for (size_t k = 0; k < ex.seam_set.islands.size(); ++k) {
        std::vector<std::array<int, 3>> tris;
        tris.reserve(ex.seam_set.islands[k].size());
        for (int f : ex.seam_set.islands[k]) tris.push_back(uvf[f]);
        if (!chart_topology_from_triples(tris).is_disk) report.non_disk_islands.push_back(int(k));
    }
    return report;
}

// --- serialization -----------------------------------------------------------

inline nlohmann::json seam_edge_set_to_json(const SeamEdgeSet& s) {
    nlohmann::json edges = nlohmann::json::array();
    for (const EdgeKey& e : s.edges) edges.push_back({e.a, e.b});
    return {{"seam_edges", edges}, {"islands", s.islands}};
}

inline SeamEdgeSet seam_edge_set_from_json(const nlohmann::json& j) {
    SeamEdgeSet s;
    for (const auto& e : j.at("seam_edges")) s.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    for (const auto& isl : j.at("islands")) s.islands.push_back(isl.get<std::vector<int>>());
    return s;
}

} // namespace seamkit
