#include <catch2/catch_amalgamated.hpp>

#include <seamkit/atlas.hpp>
#include <seamkit/codec.hpp>
#include <seamkit/cutter.hpp>
#include <seamkit/synthetic.hpp>

using namespace seamkit;

TEST_CASE("synthetic dataset basics") {
    auto data = make_synthetic_dataset(30, 42);
    REQUIRE(data.size() == 30);
    SECTION("deterministic for a fixed seed") {
        auto again = make_synthetic_dataset(30, 42);
        for (size_t i = 0; i < data.size(); ++i) {
            REQUIRE(data[i].kind == again[i].kind);
            REQUIRE(data[i].mesh.vertices == again[i].mesh.vertices);
            REQUIRE(data[i].mesh.faces == again[i].mesh.faces);
            REQUIRE(data[i].seam == again[i].seam);
        }
        auto other = make_synthetic_dataset(5, 43);
        REQUIRE(other[0].mesh.vertices != data[0].mesh.vertices);
    }
    SECTION("families rotate and ratios stay in the advisory band") {
        REQUIRE(data[0].kind == "box");
        REQUIRE(data[1].kind == "cylinder");
        REQUIRE(data[2].kind == "sphere");
        for (const auto& s : data) {
            double r = seam_ratio(s);
            REQUIRE(r >= kRatioLow);
            REQUIRE(r <= kRatioHigh);
        }
    }
    SECTION("meshes are valid and normalized") {
        for (const auto& s : data) {
            s.mesh.validate();
            for (const auto& v : s.mesh.vertices) {
                REQUIRE(std::abs(v.x) <= 1.0 + 1e-12);
                REQUIRE(std::abs(v.y) <= 1.0 + 1e-12);
                REQUIRE(std::abs(v.z) <= 1.0 + 1e-12);
            }
        }
    }
    SECTION("every seam lies on mesh edges and applies cleanly") {
        for (const auto& s : data) {
            CutResult cut = apply_seams(s.mesh, s.seam);
            REQUIRE(cut.report.dropped_pairs == 0);
            REQUIRE(cut.report.skipped_pairs == 0);
            REQUIRE(cut.report.unopened_edges.empty());
            REQUIRE(cut.applied_seam_edges.size() == s.seam.segments.size());
        }
    }
    SECTION("token stream length follows the segment count") {
        for (const auto& s : data) {
            TokenStream ts = encode(make_canonical(s.seam.segments));
            REQUIRE(ts.tokens.size() == 6 * s.seam.segments.size() + 2);
        }
    }
}

TEST_CASE("box seam opens the box into one disk") {
    for (int i : {0, 3, 6, 9}) {
        SyntheticSample s = make_synthetic_sample(7, i);
        REQUIRE(s.kind == "box");
        CutResult cut = apply_seams(s.mesh, s.seam);
        REQUIRE(cut.charts.size() == 1);
        ChartTopologyInfo info = chart_topology(cut.cut_mesh, cut.charts[0]);
        REQUIRE(info.euler == 1);
        REQUIRE(info.is_disk);
    }
}

TEST_CASE("cylinder charts flatten nearly isometrically") {
    int seen = 0;
    for (int i = 1; i < 40 && seen < 4; i += 3) {
        SyntheticSample s = make_synthetic_sample(11, i);
        REQUIRE(s.kind == "cylinder");
        CutResult cut = apply_seams(s.mesh, s.seam);
        bool capped = build_topology(s.mesh).boundary_edge_count() == 0;
        REQUIRE(cut.charts.size() == (capped ? 3 : 1));
        UVAtlas atlas = flatten_atlas(cut.cut_mesh, cut.charts);
        REQUIRE(atlas.mean_e_conf <= 0.05);
        ++seen;
    }
    REQUIRE(seen == 4);
}

TEST_CASE("sphere seam produces two pole caps and a band, all disks") {
    SyntheticSample s = make_synthetic_sample(3, 2);
    REQUIRE(s.kind == "sphere");
    CutResult cut = apply_seams(s.mesh, s.seam);
    REQUIRE(cut.charts.size() == 3);
    for (const auto& chart : cut.charts)
        REQUIRE(chart_topology(cut.cut_mesh, chart).is_disk);
}

TEST_CASE("dataset size must be positive") {
    REQUIRE_THROWS_AS(make_synthetic_dataset(0, 1), ValidationError);
}
