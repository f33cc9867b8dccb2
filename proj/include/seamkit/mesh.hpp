#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "geom.hpp"

namespace seamkit {

// Undirected edge in canonical form (a < b).
struct EdgeKey {
    int a = -1, b = -1;

    EdgeKey() = default;
    EdgeKey(int u, int v) : a(std::min(u, v)), b(std::max(u, v)) {}

    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
    bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

struct EdgeKeyHash {
    size_t operator()(const EdgeKey& e) const {
        return std::hash<uint64_t>()((uint64_t(uint32_t(e.a)) << 32) | uint32_t(e.b));
    }
};

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    // Per-corner UVs: 3 per face (index 3*f + corner), empty when absent.
    std::vector<Vec2> uv_corners;

    bool has_uvs() const { return !uv_corners.empty(); }

    const Vec2& uv(int face, int corner) const { return uv_corners[3 * face + corner]; }
    Vec2& uv(int face, int corner) { return uv_corners[3 * face + corner]; }

    void validate() const {
        int nv = int(vertices.size());
        for (size_t f = 0; f < faces.size(); ++f) {
            const auto& t = faces[f];
            for (int c = 0; c < 3; ++c) {
                if (t[c] < 0 || t[c] >= nv)
                    throw ValidationError("face " + std::to_string(f) + " references vertex " +
                                          std::to_string(t[c]) + " out of range");
            }
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
                throw ValidationError("face " + std::to_string(f) + " repeats a vertex");
        }
        if (!uv_corners.empty() && uv_corners.size() != 3 * faces.size())
            throw ValidationError("uv_corners length must be 3 x face count");
    }
};

// Derived edge list with incidence. Edge order follows first encounter while
// scanning faces, so it is deterministic for a given face ordering.
struct MeshTopology {
    std::vector<EdgeKey> edges;
    std::vector<std::vector<int>> edge_faces;
    std::unordered_map<EdgeKey, int, EdgeKeyHash> edge_index;

    int find_edge(const EdgeKey& e) const {
        auto it = edge_index.find(e);
        return it == edge_index.end() ? -1 : it->second;
    }

    bool is_boundary(int e) const { return edge_faces[e].size() == 1; }

    int boundary_edge_count() const {
        int n = 0;
        for (const auto& ef : edge_faces)
            if (ef.size() == 1) ++n;
        return n;
    }
};

inline MeshTopology build_topology(const TriMesh& mesh) {
    MeshTopology topo;
    topo.edges.reserve(mesh.faces.size() * 3 / 2);
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& t = mesh.faces[f];
        for (int c = 0; c < 3; ++c) {
            EdgeKey key(t[c], t[(c + 1) % 3]);
            auto [it, inserted] = topo.edge_index.try_emplace(key, int(topo.edges.size()));
            if (inserted) {
                topo.edges.push_back(key);
                topo.edge_faces.emplace_back();
            }
            topo.edge_faces[it->second].push_back(int(f));
        }
    }
    return topo;
}

struct NormalizeTransform {
    Vec3 center;
    double scale = 1.0; // applied as p' = (p - center) * scale

    Vec3 apply(const Vec3& p) const { return (p - center) * scale; }
    Vec3 invert(const Vec3& p) const { return p / scale + center; }
};

// Uniform scale into [-1,1]^3: single factor 2 / (largest bbox extent),
// centered at the bbox center. Returns the transform so results map back.
inline NormalizeTransform normalize_to_unit_cube(TriMesh& mesh) {
    if (mesh.vertices.empty()) throw ValidationError("cannot normalize an empty mesh");
    Vec3 lo = mesh.vertices[0], hi = mesh.vertices[0];
    for (const Vec3& v : mesh.vertices) {
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
        }
    }
    double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    if (extent <= 0.0) throw ValidationError("mesh has zero extent in all axes");
    NormalizeTransform t;
    t.center = (lo + hi) * 0.5;
    t.scale = 2.0 / extent;
    for (Vec3& v : mesh.vertices) v = t.apply(v);
    return t;
}

// Incident faces/edges of one vertex. `faces`/`edges` are in cyclic fan order
// when the star is manifold (open fans start at a boundary edge); otherwise
// the star is flagged and entries keep discovery order.
struct VertexStar {
    std::vector<int> faces;
    std::vector<int> edges;
    bool manifold = true;
};

inline std::vector<VertexStar> vertex_adjacency(const TriMesh& mesh, const MeshTopology& topo) {
    int nv = int(mesh.vertices.size());
    std::vector<VertexStar> stars(nv);
    std::vector<std::vector<int>> vert_edges(nv);
    for (size_t e = 0; e < topo.edges.size(); ++e) {
        vert_edges[topo.edges[e].a].push_back(int(e));
        vert_edges[topo.edges[e].b].push_back(int(e));
    }

    std::vector<std::vector<int>> vert_faces(nv);
    for (size_t f = 0; f < mesh.faces.size(); ++f)
        for (int c = 0; c < 3; ++c) vert_faces[mesh.faces[f][c]].push_back(int(f));

    for (int v = 0; v < nv; ++v) {
        VertexStar& star = stars[v];
        const auto& vf = vert_faces[v];
        const auto& ve = vert_edges[v];
        star.faces = vf;
        star.edges = ve;
        if (vf.empty()) continue;

        // Local wing map: for each incident edge, the incident faces that also
        // touch v. Manifold stars have <= 2 wings everywhere and form one fan.
        std::unordered_map<int, std::vector<int>> edge_wings;
        std::unordered_map<int, std::array<int, 2>> face_local_edges;
        bool ok = true;
        for (int f : vf) {
            const auto& t = mesh.faces[f];
            int others[2], n = 0;
            for (int c = 0; c < 3; ++c)
                if (t[c] != v) others[n++] = t[c];
            int e0 = topo.find_edge(EdgeKey(v, others[0]));
            int e1 = topo.find_edge(EdgeKey(v, others[1]));
            face_local_edges[f] = {e0, e1};
            edge_wings[e0].push_back(f);
            edge_wings[e1].push_back(f);
        }
        for (int e : ve) {
            auto it = edge_wings.find(e);
            size_t wings = it == edge_wings.end() ? 0 : it->second.size();
            if (wings > 2 || wings == 0) ok = false; // dangling edge or fin
        }
        if (!ok) {
            star.manifold = false;
            continue;
        }

        // Walk the fan. Start from a local-boundary edge if one exists
        // (open fan), else from the lowest-index face (closed fan).
        int start_edge = -1;
        for (int e : ve)
            if (edge_wings[e].size() == 1) {
                if (start_edge == -1 || topo.edges[e] < topo.edges[start_edge]) start_edge = e;
            }
        std::vector<int> order_f, order_e;
        std::unordered_set<int> seen;
        int cur_e, cur_f;
        if (start_edge >= 0) {
            cur_e = start_edge;
            cur_f = edge_wings[start_edge][0];
        } else {
            cur_f = *std::min_element(vf.begin(), vf.end());
            cur_e = face_local_edges[cur_f][0];
        }
        order_e.push_back(cur_e);
        while (cur_f >= 0 && !seen.count(cur_f)) {
            seen.insert(cur_f);
            order_f.push_back(cur_f);
            auto [ea, eb] = face_local_edges[cur_f];
            int next_e = (ea == cur_e) ? eb : ea;
            order_e.push_back(next_e);
            const auto& wings = edge_wings[next_e];
            int next_f = -1;
            for (int f : wings)
                if (f != cur_f) next_f = f;
            cur_e = next_e;
            cur_f = next_f;
        }
        if (order_f.size() != vf.size()) {
            star.manifold = false; // disconnected fan (e.g. bowtie vertex)
            continue;
        }
        if (start_edge < 0) order_e.pop_back(); // closed fan repeats the start edge
        star.faces = order_f;
        star.edges = order_e;
    }
    return stars;
}

class DisjointSet {
public:
    explicit DisjointSet(int n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<int> parent_;
    std::vector<int> rank_;
};

// Connected components of faces linked through shared edges for which
// `edge_connects` is true. Components are listed by smallest contained face
// index, faces ascending within each.
template <class Pred>
std::vector<std::vector<int>> face_components(const TriMesh& mesh, const MeshTopology& topo,
                                              Pred edge_connects) {
    int nf = int(mesh.faces.size());
    DisjointSet ds(nf);
    for (size_t e = 0; e < topo.edges.size(); ++e) {
        const auto& ef = topo.edge_faces[e];
        if (ef.size() < 2 || !edge_connects(int(e))) continue;
        for (size_t i = 1; i < ef.size(); ++i) ds.unite(ef[0], ef[i]);
    }
    std::unordered_map<int, int> root_to_comp;
    std::vector<std::vector<int>> comps;
    for (int f = 0; f < nf; ++f) {
        int r = ds.find(f);
        auto [it, inserted] = root_to_comp.try_emplace(r, int(comps.size()));
        if (inserted) comps.emplace_back();
        comps[it->second].push_back(f);
    }
    return comps;
}

inline std::vector<std::vector<int>> face_components(const TriMesh& mesh,
                                                     const MeshTopology& topo) {
    return face_components(mesh, topo, [](int) { return true; });
}

// Topology summary of a face subset (chart): Euler characteristic, boundary
// structure, and the disk test V - E + F = 1 with at least one boundary edge.
struct ChartTopologyInfo {
    int vertex_count = 0;
    int edge_count = 0;
    int face_count = 0;
    int boundary_edge_count = 0;
    int boundary_loop_count = 0;
    int euler = 0;
    bool connected = false;
    bool is_disk = false;
    int genus = -1; // from euler = 2 - 2g - loops when orientable; diagnostic only
};

inline ChartTopologyInfo chart_topology_from_triples(const std::vector<std::array<int, 3>>& tris) {
    ChartTopologyInfo info;
    info.face_count = int(tris.size());
    if (tris.empty()) return info;

    std::unordered_set<int> verts;
    std::unordered_map<EdgeKey, int, EdgeKeyHash> edge_count;
    for (const auto& t : tris) {
        for (int c = 0; c < 3; ++c) {
            verts.insert(t[c]);
            ++edge_count[EdgeKey(t[c], t[(c + 1) % 3])];
        }
    }
    info.vertex_count = int(verts.size());
    info.edge_count = int(edge_count.size());
    info.euler = info.vertex_count - info.edge_count + info.face_count;

    std::unordered_map<int, std::vector<int>> boundary_adj;
    for (const auto& [e, cnt] : edge_count) {
        if (cnt == 1) {
            ++info.boundary_edge_count;
            boundary_adj[e.a].push_back(e.b);
            boundary_adj[e.b].push_back(e.a);
        }
    }

    // Boundary loops: components of the boundary-edge graph.
    std::unordered_set<int> visited;
    for (const auto& [v, _] : boundary_adj) {
        if (visited.count(v)) continue;
        ++info.boundary_loop_count;
        std::vector<int> stack{v};
        visited.insert(v);
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int nb : boundary_adj[cur])
                if (visited.insert(nb).second) stack.push_back(nb);
        }
    }

    // Connectivity of the chart via shared edges.
    std::unordered_map<EdgeKey, std::vector<int>, EdgeKeyHash> local_edge_faces;
    for (size_t i = 0; i < tris.size(); ++i) {
        const auto& t = tris[i];
        for (int c = 0; c < 3; ++c)
            local_edge_faces[EdgeKey(t[c], t[(c + 1) % 3])].push_back(int(i));
    }
    DisjointSet ds(info.face_count);
    for (const auto& [e, fs] : local_edge_faces)
        for (size_t i = 1; i < fs.size(); ++i) ds.unite(fs[0], fs[i]);
    int root = ds.find(0);
    info.connected = true;
    for (int i = 1; i < info.face_count; ++i)
        if (ds.find(i) != root) {
            info.connected = false;
            break;
        }

    info.is_disk = info.connected && info.euler == 1 && info.boundary_edge_count > 0;
    int g2 = 2 - info.euler - info.boundary_loop_count;
    info.genus = (g2 >= 0 && g2 % 2 == 0) ? g2 / 2 : -1;
    return info;
}

inline ChartTopologyInfo chart_topology(const TriMesh& mesh, const std::vector<int>& chart_faces) {
    std::vector<std::array<int, 3>> tris;
    tris.reserve(chart_faces.size());
    for (int f : chart_faces) tris.push_back(mesh.faces[f]);
    return chart_topology_from_triples(tris);
}

} // namespace seamkit
