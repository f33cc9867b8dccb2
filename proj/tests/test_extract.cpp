#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include <seamkit/extract.hpp>
#include <seamkit/obj_io.hpp>
#include <seamkit/rng.hpp>

#include "support/fixtures.hpp"

using namespace seamkit;

namespace {

std::set<std::pair<int, int>> edge_set(const std::vector<EdgeKey>& edges) {
    std::set<std::pair<int, int>> s;
    for (const EdgeKey& e : edges) s.insert({e.a, e.b});
    return s;
}

std::set<std::set<int>> island_sets(const std::vector<std::vector<int>>& islands) {
    std::set<std::set<int>> s;
    for (const auto& isl : islands) s.insert(std::set<int>(isl.begin(), isl.end()));
    return s;
}

// Independent island computation: cluster corners into UV-vertices, then BFS
// over faces sharing a full UV-edge.
std::set<std::set<int>> islands_by_uv_clustering(const TriMesh& mesh, double tol) {
    int nf = int(mesh.faces.size());
    std::map<int, std::vector<std::pair<Vec2, int>>> clusters;
    int next = 0;
    std::vector<std::array<int, 3>> cid(nf);
    for (int f = 0; f < nf; ++f)
        for (int c = 0; c < 3; ++c) {
            int v = mesh.faces[f][c];
            Vec2 t = mesh.uv(f, c);
            int id = -1;
            for (auto& [uv, k] : clusters[v])
                if (std::abs(uv.x - t.x) <= tol && std::abs(uv.y - t.y) <= tol) id = k;
            if (id < 0) {
                id = next++;
                clusters[v].emplace_back(t, id);
            }
            cid[f][c] = id;
        }
    std::map<std::pair<int, int>, std::vector<int>> uv_edge_faces;
    for (int f = 0; f < nf; ++f)
        for (int c = 0; c < 3; ++c) {
            int a = cid[f][c], b = cid[f][(c + 1) % 3];
            uv_edge_faces[{std::min(a, b), std::max(a, b)}].push_back(f);
        }
    std::vector<int> comp(nf, -1);
    int nc = 0;
    for (int f = 0; f < nf; ++f) {
        if (comp[f] >= 0) continue;
        std::vector<int> stack{f};
        comp[f] = nc;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int c = 0; c < 3; ++c) {
                int a = cid[cur][c], b = cid[cur][(c + 1) % 3];
                for (int nb : uv_edge_faces[{std::min(a, b), std::max(a, b)}])
                    if (comp[nb] < 0) {
                        comp[nb] = nc;
                        stack.push_back(nb);
                    }
            }
        }
        ++nc;
    }
    std::vector<std::vector<int>> islands(nc);
    for (int f = 0; f < nf; ++f) islands[comp[f]].push_back(f);
    return island_sets(islands);
}

} // namespace

TEST_CASE("continuous quad has no seams") {
    TriMesh m = fixtures::quad(false);
    auto res = extract_seams(m, build_topology(m));
    REQUIRE(res.seam_set.edges.empty());
    REQUIRE(res.seam_set.islands.size() == 1);
    REQUIRE(res.seam.empty());
}

TEST_CASE("split quad yields the diagonal seam") {
    TriMesh m = fixtures::quad(true);
    auto res = extract_seams(m, build_topology(m));
    REQUIRE(res.seam_set.edges.size() == 1);
    REQUIRE(res.seam_set.edges[0] == EdgeKey(0, 2));
    REQUIRE(res.seam_set.islands.size() == 2);
    REQUIRE(res.seam.count() == 1);
}

TEST_CASE("cross-layout cube has exactly 7 seam edges") {
    auto cc = fixtures::cross_cube();
    MeshTopology topo = build_topology(cc.mesh);
    auto res = extract_seams(cc.mesh, topo);

    REQUIRE(edge_set(res.seam_set.edges) == edge_set(cc.cut_edges));
    REQUIRE(res.seam_set.islands.size() == 1);
    REQUIRE(res.seam_set.islands[0].size() == 12);
    REQUIRE(res.seam.count() == 7);

    // Oracle: brute-force per-edge UV comparison, written independently.
    std::set<std::pair<int, int>> oracle;
    for (size_t e = 0; e < topo.edges.size(); ++e) {
        if (topo.edge_faces[e].size() != 2) continue;
        int f0 = topo.edge_faces[e][0], f1 = topo.edge_faces[e][1];
        bool mismatch = false;
        for (int v : {topo.edges[e].a, topo.edges[e].b}) {
            Vec2 u0, u1;
            for (int c = 0; c < 3; ++c) {
                if (cc.mesh.faces[f0][c] == v) u0 = cc.mesh.uv(f0, c);
                if (cc.mesh.faces[f1][c] == v) u1 = cc.mesh.uv(f1, c);
            }
            if (std::abs(u0.x - u1.x) > 1e-7 || std::abs(u0.y - u1.y) > 1e-7) mismatch = true;
        }
        if (mismatch) oracle.insert({topo.edges[e].a, topo.edges[e].b});
    }
    REQUIRE(edge_set(res.seam_set.edges) == oracle);

    // Fold edges stay continuous.
    for (const EdgeKey& fold : cc.fold_edges) REQUIRE_FALSE(oracle.count({fold.a, fold.b}));
}

TEST_CASE("seam set is invariant under face permutation") {
    auto cc = fixtures::cross_cube();
    Rng rng(99);
    std::vector<int> perm(cc.mesh.faces.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.uniform_int(0, int(i) - 1)]);

    TriMesh shuffled;
    shuffled.vertices = cc.mesh.vertices;
    for (int f : perm) {
        shuffled.faces.push_back(cc.mesh.faces[f]);
        for (int c = 0; c < 3; ++c) shuffled.uv_corners.push_back(cc.mesh.uv(f, c));
    }

    auto a = extract_seams(cc.mesh, build_topology(cc.mesh));
    auto b = extract_seams(shuffled, build_topology(shuffled));
    REQUIRE(edge_set(a.seam_set.edges) == edge_set(b.seam_set.edges));
    REQUIRE(a.seam == b.seam);

    // islands compared through the permutation
    std::set<std::set<int>> remapped;
    for (const auto& isl : b.seam_set.islands) {
        std::set<int> s;
        for (int f : isl) s.insert(perm[f]);
        remapped.insert(s);
    }
    REQUIRE(remapped == island_sets(a.seam_set.islands));
}

TEST_CASE("islands agree with an independent UV-clustering computation") {
    for (const auto& cc : {fixtures::cross_cube()}) {
        auto res = extract_seams(cc.mesh, build_topology(cc.mesh));
        REQUIRE(island_sets(res.seam_set.islands) == islands_by_uv_clustering(cc.mesh, 1e-7));
    }
    TriMesh split = fixtures::quad(true);
    auto res = extract_seams(split, build_topology(split));
    REQUIRE(island_sets(res.seam_set.islands) == islands_by_uv_clustering(split, 1e-7));
}

TEST_CASE("extraction requires UVs") {
    TriMesh m = fixtures::single_triangle();
    REQUIRE_THROWS_AS(extract_seams(m, build_topology(m)), ValidationError);
}

TEST_CASE("extracted seam segments are codec-exact") {
    auto cc = fixtures::cross_cube();
    auto res = extract_seams(cc.mesh, build_topology(cc.mesh));
    REQUIRE(decode(encode(res.seam)) == res.seam);
}

TEST_CASE("layout validation") {
    SECTION("cross cube is clean") {
        auto cc = fixtures::cross_cube();
        auto report = validate_uv_layout(cc.mesh, build_topology(cc.mesh));
        REQUIRE(report.clean());
    }
    SECTION("stacked UV triangles in one island overlap") {
        // Open 4-face fan whose UV wedges advance 120 degrees each: the last
        // face lands exactly on the first one (identical coordinates) while
        // every UV edge along the fan stays continuous (single island).
        TriMesh m;
        m.vertices.emplace_back(0, 0, 0);
        for (int i = 0; i < 5; ++i) {
            double a = 2.0 * 3.14159265358979323846 * i / 5;
            m.vertices.emplace_back(std::cos(a), std::sin(a), 0.1 * i);
        }
        auto uv_at = [](int k) {
            double a = 2.0 * 3.14159265358979323846 * (k * 120.0 / 360.0);
            return Vec2{std::cos(a), std::sin(a)};
        };
        for (int k = 0; k < 4; ++k) {
            m.faces.push_back({0, 1 + k, 2 + k});
            m.uv_corners.push_back({0, 0});
            m.uv_corners.push_back(uv_at(k));
            m.uv_corners.push_back(uv_at(k + 1));
        }
        auto report = validate_uv_layout(m, build_topology(m));
        REQUIRE(report.degenerate_uv_faces.empty());
        REQUIRE(report.overlap_pairs == std::vector<std::pair<int, int>>{{0, 3}});
    }
    SECTION("stacked triangles in different islands are not an overlap defect") {
        TriMesh m = fixtures::quad(false);
        // identical UV triangles, but the shared edge splits, so two islands
        m.uv_corners = {{0, 0}, {1, 0}, {1, 1}, {0, 0}, {1, 0}, {1, 1}};
        auto res = extract_seams(m, build_topology(m));
        REQUIRE(res.seam_set.islands.size() == 2);
        auto report = validate_uv_layout(m, build_topology(m));
        REQUIRE(report.overlap_pairs.empty());
    }
    SECTION("adjacent triangles sharing an edge do not overlap") {
        TriMesh m = fixtures::quad(false);
        auto report = validate_uv_layout(m, build_topology(m));
        REQUIRE(report.overlap_pairs.empty());
    }
    SECTION("zero-area UV triangle flagged") {
        TriMesh m = fixtures::quad(false);
        m.uv_corners[0] = m.uv_corners[1] = m.uv_corners[2] = Vec2{0.5, 0.5};
        auto report = validate_uv_layout(m, build_topology(m));
        REQUIRE(report.degenerate_uv_faces == std::vector<int>{0});
    }
    SECTION("flipped UV triangle flagged") {
        TriMesh m = fixtures::quad(false);
        std::swap(m.uv_corners[0], m.uv_corners[1]);
        auto report = validate_uv_layout(m, build_topology(m));
        REQUIRE(report.degenerate_uv_faces == std::vector<int>{0});
    }
    SECTION("annulus island is not a disk") {
        TriMesh g = fixtures::grid(3, 3);
        TriMesh m;
        m.vertices = g.vertices;
        for (int f = 0; f < int(g.faces.size()); ++f) {
            if (f == 8 || f == 9) continue; // remove center cell
            m.faces.push_back(g.faces[f]);
            for (int c = 0; c < 3; ++c) {
                const Vec3& p = g.vertices[g.faces[f][c]];
                m.uv_corners.push_back({p.x, p.y});
            }
        }
        auto report = validate_uv_layout(m, build_topology(m));
        REQUIRE(report.non_disk_islands == std::vector<int>{0});
        REQUIRE(report.overlap_pairs.empty());
    }
}

TEST_CASE("seam edge set JSON round-trip") {
    auto cc = fixtures::cross_cube();
    auto res = extract_seams(cc.mesh, build_topology(cc.mesh));
    auto j = seam_edge_set_to_json(res.seam_set);
    auto back = seam_edge_set_from_json(j);
    REQUIRE(edge_set(back.edges) == edge_set(res.seam_set.edges));
    REQUIRE(back.islands == res.seam_set.islands);
}
