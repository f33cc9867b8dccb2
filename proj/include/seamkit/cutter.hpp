#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "extract.hpp"
#include "mesh.hpp"
#include "seam.hpp"

namespace seamkit {

// --- nearest-vertex snapping ---------------------------------------------------

// Uniform spatial hash over the vertex set; expanding-shell queries return the
// exact nearest vertex with ties broken toward the lowest index.
class VertexGrid {
public:
    explicit VertexGrid(const std::vector<Vec3>& verts) : verts_(verts) {
        if (verts.empty()) throw ValidationError("cannot index an empty vertex set");
        lo_ = hi_ = verts[0];
        for (const Vec3& v : verts)
            for (int i = 0; i < 3; ++i) {
                lo_[i] = std::min(lo_[i], v[i]);
                hi_[i] = std::max(hi_[i], v[i]);
            }
        double extent = std::max({hi_.x - lo_.x, hi_.y - lo_.y, hi_.z - lo_.z});
        int cells_per_axis = std::max(1, int(std::cbrt(double(verts.size()))));
        h_ = extent > 0 ? extent / cells_per_axis : 1.0;
        span_ = cells_per_axis + 1;
        for (size_t i = 0; i < verts.size(); ++i) cells_[key_of(verts[i])].push_back(int(i));
    }

    int nearest(const Vec3& p) const {
        int cx, cy, cz;
        cell_of(p, cx, cy, cz);
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        auto consider = [&](int idx) {
            double d2 = (verts_[idx] - p).squared_norm();
            if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
                best_d2 = d2;
                best = idx;
            }
        };
        for (int d = 0;; ++d) {
            // cells at Chebyshev shell distance d contain nothing closer than
            // (d-1)*h, so the search can stop once a winner is certain
            if (best >= 0) {
                double lower = double(d - 1) * h_;
                if (lower > 0 && lower * lower > best_d2) break;
            }
            if (d > 2 * span_ + 2) break; // everything has been visited
            for (int ix = cx - d; ix <= cx + d; ++ix)
                for (int iy = cy - d; iy <= cy + d; ++iy)
                    for (int iz = cz - d; iz <= cz + d; ++iz) {
                        int cheb = std::max({std::abs(ix - cx), std::abs(iy - cy),
                                             std::abs(iz - cz)});
                        if (cheb != d) continue;
                        auto it = cells_.find(key(ix, iy, iz));
                        if (it == cells_.end()) continue;
                        for (int idx : it->second) consider(idx);
                    }
        }
        if (best < 0) // points far outside the bbox can outrun the shell cap
            for (size_t i = 0; i < verts_.size(); ++i) consider(int(i));
        return best;
    }

private:
    static int64_t key(int x, int y, int z) {
        return (int64_t(x) & 0x1FFFFF) | ((int64_t(y) & 0x1FFFFF) << 21) |
               ((int64_t(z) & 0x1FFFFF) << 42);
    }
    void cell_of(const Vec3& p, int& x, int& y, int& z) const {
        x = int(std::floor((p.x - lo_.x) / h_));
        y = int(std::floor((p.y - lo_.y) / h_));
        z = int(std::floor((p.z - lo_.z) / h_));
    }
    int64_t key_of(const Vec3& p) const {
        int x, y, z;
        cell_of(p, x, y, z);
        return key(x, y, z);
    }

    const std::vector<Vec3>& verts_;
    Vec3 lo_, hi_;
    double h_ = 1.0;
    int span_ = 1;
    std::unordered_map<int64_t, std::vector<int>> cells_;
};

struct SnapResult {
    std::vector<std::pair<int, int>> pairs;
    int dropped = 0; // both endpoints snapped to the same vertex
};

inline SnapResult snap_to_vertices(const SeamSequence& seam, const TriMesh& mesh) {
    if (mesh.vertices.empty()) throw ValidationError("cannot snap onto an empty mesh");
    VertexGrid grid(mesh.vertices);
    SnapResult out;
    for (const SeamSegment& s : seam.segments) {
        int a = grid.nearest(s.head);
        int b = grid.nearest(s.tail);
        if (a == b) {
            ++out.dropped;
            continue;
        }
        out.pairs.emplace_back(a, b);
    }
    return out;
}

// --- shortest paths along edges -------------------------------------------------

using EdgeAdjacency = std::vector<std::vector<std::pair<int, double>>>; // (neighbor, length)

inline EdgeAdjacency build_edge_adjacency(const TriMesh& mesh, const MeshTopology& topo) {
    EdgeAdjacency adj(mesh.vertices.size());
    for (const EdgeKey& e : topo.edges) {
        double len = (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
        adj[e.a].emplace_back(e.b, len);
        adj[e.b].emplace_back(e.a, len);
    }
    return adj;
}

// Dijkstra over the edge graph. Returns the vertex path src..dst, or empty if
// unreachable. Ties pop in (distance, vertex index) order, so equal-cost
// routing is deterministic.
inline std::vector<int> shortest_edge_path(const EdgeAdjacency& adj, int src, int dst) {
    int n = int(adj.size());
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> pred(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        if (v == dst) break;
        for (auto [nb, len] : adj[v]) {
            double nd = d + len;
            if (nd < dist[nb]) {
                dist[nb] = nd;
                pred[nb] = v;
                heap.push({nd, nb});
            }
        }
    }
    if (!std::isfinite(dist[dst])) return {};
    std::vector<int> path;
    for (int v = dst; v != -1; v = pred[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

inline double path_length(const TriMesh& mesh, const std::vector<int>& path) {
    double len = 0.0;
    for (size_t i = 1; i < path.size(); ++i)
        len += (mesh.vertices[path[i]] - mesh.vertices[path[i - 1]]).norm();
    return len;
}

struct ConnectResult {
    SeamEdgeSet seam_set; // union of path edges, ascending order; islands unset
    int skipped_pairs = 0;
};

inline ConnectResult connect_geodesic(const std::vector<std::pair<int, int>>& pairs,
                                      const TriMesh& mesh, const MeshTopology& topo) {
    EdgeAdjacency adj = build_edge_adjacency(mesh, topo);
    std::set<EdgeKey> edges;
    ConnectResult out;
    for (auto [a, b] : pairs) {
        std::vector<int> path = shortest_edge_path(adj, a, b);
        if (path.empty()) {
            ++out.skipped_pairs;
            continue;
        }
        for (size_t i = 1; i < path.size(); ++i) edges.insert(EdgeKey(path[i - 1], path[i]));
    }
    out.seam_set.edges.assign(edges.begin(), edges.end());
    return out;
}

// --- topological cutting ---------------------------------------------------------

struct CutReport {
    int dropped_pairs = 0;
    int skipped_pairs = 0;
    int duplicated_vertices = 0;
    std::vector<EdgeKey> boundary_noop_edges; // requested seams already open
    std::vector<EdgeKey> unopened_edges;      // isolated edges no duplication can open
};

struct CutResult {
    TriMesh cut_mesh;
    std::vector<std::vector<int>> charts;
    std::vector<int> vertex_origin;          // cut-mesh vertex -> source vertex
    std::vector<EdgeKey> applied_seam_edges; // interior seam edges that opened
    CutReport report;
};

// Duplicate each seam vertex once per fan sector, where sectors are the
// components of its incident faces connected through non-seam edges at that
// vertex. Slit tips (one sector) keep a single copy.
inline CutResult cut_along_edges(const TriMesh& mesh, const std::vector<EdgeKey>& seam_edges) {
    mesh.validate();
    MeshTopology topo = build_topology(mesh);

    CutResult out;
    std::unordered_set<int> interior_seam; // edge ids
    for (const EdgeKey& e : seam_edges) {
        int idx = topo.find_edge(e);
        if (idx < 0)
            throw ValidationError("seam edge (" + std::to_string(e.a) + "," +
                                  std::to_string(e.b) + ") is not a mesh edge");
        if (topo.edge_faces[idx].size() < 2)
            out.report.boundary_noop_edges.push_back(e);
        else
            interior_seam.insert(idx);
    }

    // faces incident to each seam vertex
    std::unordered_map<int, std::vector<int>> vertex_faces;
    for (int e : interior_seam) {
        vertex_faces[topo.edges[e].a];
        vertex_faces[topo.edges[e].b];
    }
    for (size_t f = 0; f < mesh.faces.size(); ++f)
        for (int c = 0; c < 3; ++c) {
            auto it = vertex_faces.find(mesh.faces[f][c]);
            if (it != vertex_faces.end()) it->second.push_back(int(f));
        }

    out.cut_mesh = mesh;
    out.vertex_origin.resize(mesh.vertices.size());
    std::iota(out.vertex_origin.begin(), out.vertex_origin.end(), 0);

    // deterministic processing order
    std::vector<int> seam_verts;
    seam_verts.reserve(vertex_faces.size());
    for (const auto& [v, _] : vertex_faces) seam_verts.push_back(v);
    std::sort(seam_verts.begin(), seam_verts.end());

    // per (vertex, face) sector id, used afterwards to detect opened edges
    std::unordered_map<int64_t, int> sector_of;
    auto vf_key = [](int v, int f) { return (int64_t(v) << 32) | uint32_t(f); };

    for (int v : seam_verts) {
        const auto& faces = vertex_faces[v];
        if (faces.empty()) continue;
        std::unordered_map<int, int> local; // face -> local index
        for (size_t i = 0; i < faces.size(); ++i) local[faces[i]] = int(i);
        DisjointSet ds(int(faces.size()));
        for (int f : faces) {
            const auto& t = mesh.faces[f];
            for (int c = 0; c < 3; ++c) {
                EdgeKey ek(t[c], t[(c + 1) % 3]);
                if (ek.a != v && ek.b != v) continue;
                int e = topo.find_edge(ek);
                if (interior_seam.count(e)) continue; // seam separates sectors
                for (int other : topo.edge_faces[e]) {
                    auto it = local.find(other);
                    if (it != local.end()) ds.unite(local[f], it->second);
                }
            }
        }
        // sectors keyed by their smallest face; the first sector keeps v
        std::unordered_map<int, int> root_min_face;
        for (size_t i = 0; i < faces.size(); ++i) {
            int r = ds.find(int(i));
            auto it = root_min_face.find(r);
            if (it == root_min_face.end() || faces[i] < it->second) root_min_face[r] = faces[i];
        }
        std::map<int, int> order; // min face -> root
        for (const auto& [r, mf] : root_min_face) order[mf] = r;
        std::unordered_map<int, int> root_sector;
        int s = 0;
        for (const auto& [mf, r] : order) root_sector[r] = s++;

        int nsec = int(order.size());
        std::vector<int> copy_of(nsec);
        copy_of[0] = v;
        for (int k = 1; k < nsec; ++k) {
            copy_of[k] = int(out.cut_mesh.vertices.size());
            out.cut_mesh.vertices.push_back(mesh.vertices[v]);
            out.vertex_origin.push_back(v);
            ++out.report.duplicated_vertices;
        }
        for (size_t i = 0; i < faces.size(); ++i) {
            int sec = root_sector[ds.find(int(i))];
            sector_of[vf_key(v, faces[i])] = sec;
            if (sec == 0) continue;
            for (int c = 0; c < 3; ++c)
                if (out.cut_mesh.faces[faces[i]][c] == v)
                    out.cut_mesh.faces[faces[i]][c] = copy_of[sec];
        }
    }

    // an interior seam edge opened iff its faces landed in different sectors
    // at either endpoint
    for (int e : interior_seam) {
        const EdgeKey& ek = topo.edges[e];
        const auto& ef = topo.edge_faces[e];
        bool opened = false;
        for (int v : {ek.a, ek.b}) {
            int ref = sector_of[vf_key(v, ef[0])];
            for (size_t i = 1; i < ef.size(); ++i)
                if (sector_of[vf_key(v, ef[i])] != ref) opened = true;
        }
        if (opened)
            out.applied_seam_edges.push_back(ek);
        else
            out.report.unopened_edges.push_back(ek);
    }
    std::sort(out.applied_seam_edges.begin(), out.applied_seam_edges.end());
    std::sort(out.report.unopened_edges.begin(), out.report.unopened_edges.end());

    MeshTopology cut_topo = build_topology(out.cut_mesh);
    out.charts = face_components(out.cut_mesh, cut_topo);
    return out;
}

// snap -> connect -> cut composition.
inline CutResult apply_seams(const TriMesh& mesh, const SeamSequence& seam) {
    MeshTopology topo = build_topology(mesh);
    SnapResult snapped = snap_to_vertices(seam, mesh);
    ConnectResult connected = connect_geodesic(snapped.pairs, mesh, topo);
    CutResult out = cut_along_edges(mesh, connected.seam_set.edges);
    out.report.dropped_pairs = snapped.dropped;
    out.report.skipped_pairs = connected.skipped_pairs;
    return out;
}

// --- cut completion (optional fallback) ------------------------------------------

// Extend a seam set until every chart is a disk: closed charts get a two-edge
// slit, multi-loop charts get a joining path between boundary loops. Charts
// with genus > 0 cannot be repaired here and are reported.
struct CompleteCutsResult {
    CutResult cut;
    std::vector<EdgeKey> final_seam_edges;
    std::vector<int> unfixable_charts;
    int added_edges = 0;
    int iterations = 0;
};

namespace detail {

// boundary loops of a chart in the cut mesh, as vertex lists
inline std::vector<std::vector<int>> chart_boundary_loops(const TriMesh& mesh,
                                                          const std::vector<int>& faces) {
    std::unordered_map<EdgeKey, int, EdgeKeyHash> count;
    for (int f : faces) {
        const auto& t = mesh.faces[f];
        for (int c = 0; c < 3; ++c) ++count[EdgeKey(t[c], t[(c + 1) % 3])];
    }
    std::unordered_map<int, std::vector<int>> adj;
    for (const auto& [e, n] : count)
        if (n == 1) {
            adj[e.a].push_back(e.b);
            adj[e.b].push_back(e.a);
        }
    std::vector<std::vector<int>> loops;
    std::unordered_set<int> seen;
    for (const auto& [v, _] : adj) {
        if (seen.count(v)) continue;
        std::vector<int> loop, stack{v};
        seen.insert(v);
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            loop.push_back(cur);
            for (int nb : adj[cur])
                if (seen.insert(nb).second) stack.push_back(nb);
        }
        std::sort(loop.begin(), loop.end());
        loops.push_back(std::move(loop));
    }
    std::sort(loops.begin(), loops.end());
    return loops;
}

} // namespace detail

inline CompleteCutsResult complete_cuts(const TriMesh& mesh, std::vector<EdgeKey> seam_edges,
                                        int max_iterations = 64) {
    CompleteCutsResult out;
    std::set<EdgeKey> edges(seam_edges.begin(), seam_edges.end());

    while (true) {
        ++out.iterations;
        out.cut = cut_along_edges(mesh, {edges.begin(), edges.end()});
        const TriMesh& cm = out.cut.cut_mesh;

        std::vector<EdgeKey> proposals;
        out.unfixable_charts.clear();
        for (size_t k = 0; k < out.cut.charts.size(); ++k) {
            const auto& faces = out.cut.charts[k];
            ChartTopologyInfo info = chart_topology(cm, faces);
            if (info.is_disk) continue;

            if (info.boundary_edge_count == 0 && info.genus == 0) {
                // closed chart: two-edge slit from its smallest vertex
                int v0 = std::numeric_limits<int>::max();
                std::map<int, std::set<int>> nbrs;
                for (int f : faces) {
                    const auto& t = cm.faces[f];
                    for (int c = 0; c < 3; ++c) {
                        v0 = std::min(v0, t[c]);
                        nbrs[t[c]].insert(t[(c + 1) % 3]);
                        nbrs[t[c]].insert(t[(c + 2) % 3]);
                    }
                }
                int v1 = *nbrs[v0].begin();
                int v2 = -1;
                for (int cand : nbrs[v1])
                    if (cand != v0) {
                        v2 = cand;
                        break;
                    }
                if (v2 < 0) continue;
                proposals.emplace_back(out.cut.vertex_origin[v0], out.cut.vertex_origin[v1]);
                proposals.emplace_back(out.cut.vertex_origin[v1], out.cut.vertex_origin[v2]);
            } else if (info.boundary_loop_count > 1 && info.genus == 0) {
                // join the first two boundary loops with a multi-source
                // shortest path restricted to chart edges
                auto loops = detail::chart_boundary_loops(cm, faces);
                if (loops.size() < 2) continue;
                EdgeAdjacency adj(cm.vertices.size());
                std::map<EdgeKey, int> chart_edges;
                for (int f : faces) {
                    const auto& t = cm.faces[f];
                    for (int c = 0; c < 3; ++c) ++chart_edges[EdgeKey(t[c], t[(c + 1) % 3])];
                }
                for (const auto& [e, n] : chart_edges) {
                    if (n != 2) continue; // route through interior edges only
                    double len = (cm.vertices[e.b] - cm.vertices[e.a]).norm();
                    adj[e.a].emplace_back(e.b, len);
                    adj[e.b].emplace_back(e.a, len);
                }
                std::vector<double> dist(cm.vertices.size(),
                                         std::numeric_limits<double>::infinity());
                std::vector<int> pred(cm.vertices.size(), -1);
                using Item = std::pair<double, int>;
                std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
                for (int src : loops[0]) {
                    dist[src] = 0.0;
                    heap.push({0.0, src});
                }
                std::unordered_set<int> targets(loops[1].begin(), loops[1].end());
                int hit = -1;
                while (!heap.empty()) {
                    auto [d, v] = heap.top();
                    heap.pop();
                    if (d > dist[v]) continue;
                    if (targets.count(v)) {
                        hit = v;
                        break;
                    }
                    for (auto [nb, len] : adj[v]) {
                        if (dist[v] + len < dist[nb]) {
                            dist[nb] = dist[v] + len;
                            pred[nb] = v;
                            heap.push({dist[nb], nb});
                        }
                    }
                }
                for (int v = hit; v != -1 && pred[v] != -1; v = pred[v])
                    proposals.emplace_back(out.cut.vertex_origin[v],
                                           out.cut.vertex_origin[pred[v]]);
            } else {
                out.unfixable_charts.push_back(int(k));
            }
        }

        if (proposals.empty()) break;
        size_t before = edges.size();
        for (const EdgeKey& e : proposals) edges.insert(e);
        out.added_edges += int(edges.size() - before);
        if (edges.size() == before) break; // no progress
        if (out.iterations >= max_iterations) {
            out.cut = cut_along_edges(mesh, {edges.begin(), edges.end()});
            break;
        }
    }
    out.final_seam_edges.assign(edges.begin(), edges.end());
    return out;
}

} // namespace seamkit
