#pragma once

// Whole-mesh UV atlas: flatten every chart, record distortion metrics on the
// raw (unpacked) layouts, then shelf-pack all charts into [0,1]^2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include <seamkit/lscm.hpp>
#include <seamkit/metrics.hpp>

namespace seamkit {

struct UVAtlas {
    std::vector<std::vector<int>> charts;  // face ids per chart
    std::vector<Vec2> uv;                  // one coordinate per mesh vertex
    std::vector<FaceMetric> face_metrics;  // per mesh face
    std::vector<double> chart_mean;        // mean energy per chart (NaN if none counted)
    double mean_e_conf = std::numeric_limits<double>::quiet_NaN();
    int counted_faces = 0;
    int skipped_faces = 0;
    double pack_scale = 1.0;
};

struct PackPlacement {
    double scale = 1.0;
    std::vector<Vec2> offsets; // per chart, UV-space position of the bbox min
};

constexpr double kAtlasGutter = 1.0 / 512.0;

namespace detail {

struct ChartBox {
    int chart;
    double w, h;
};

// Shelf placement at a fixed scale. Returns false when [0,1]^2 is exceeded.
inline bool try_shelves(const std::vector<ChartBox>& boxes, double scale,
                        std::vector<Vec2>& offsets) {
    double g = kAtlasGutter;
    double x = g, y = g, shelf_h = 0.0;
    for (const auto& b : boxes) {
        double w = b.w * scale, h = b.h * scale;
        if (x + w + g > 1.0 && x > g) { // start a new shelf
            y += shelf_h + g;
            x = g;
            shelf_h = 0.0;
        }
        if (x + w + g > 1.0 || y + h + g > 1.0) return false;
        offsets[b.chart] = {x, y};
        x += w + g;
        shelf_h = std::max(shelf_h, h);
    }
    return true;
}

} // namespace detail

// Scale all charts by one global factor and shelf-pack them with gutters.
// Charts are placed tallest-first; the scale is the largest fitting one found
// by bisection.
inline PackPlacement pack_atlas(const std::vector<Vec2>& bbox_sizes) {
    PackPlacement out;
    out.offsets.assign(bbox_sizes.size(), Vec2{0.0, 0.0});
    if (bbox_sizes.empty()) return out;

    std::vector<detail::ChartBox> boxes;
    double max_dim = 0.0;
    for (size_t i = 0; i < bbox_sizes.size(); ++i) {
        if (!std::isfinite(bbox_sizes[i].x) || !std::isfinite(bbox_sizes[i].y))
            throw ValidationError("pack: chart bbox is not finite");
        boxes.push_back({int(i), bbox_sizes[i].x, bbox_sizes[i].y});
        max_dim = std::max({max_dim, bbox_sizes[i].x, bbox_sizes[i].y});
    }
    std::stable_sort(boxes.begin(), boxes.end(),
                     [](const auto& a, const auto& b) { return a.h > b.h; });

    if (max_dim <= 0.0) { // all charts degenerate to points; grid them
        double g = kAtlasGutter;
        for (auto& b : boxes) out.offsets[b.chart] = {g, g};
        out.scale = 1.0;
        return out;
    }

    double lo = 0.0, hi = (1.0 - 2.0 * kAtlasGutter) / max_dim;
    std::vector<Vec2> offsets(bbox_sizes.size());
    if (!detail::try_shelves(boxes, 0.0, offsets))
        throw InternalError("pack: charts do not fit even at zero scale");
    for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lo + hi);
        if (detail::try_shelves(boxes, mid, offsets))
            lo = mid;
        else
            hi = mid;
    }
    detail::try_shelves(boxes, lo, out.offsets);
    out.scale = lo;
    return out;
}

// Flatten every chart of (an already cut) mesh, compute metrics on the raw
// layouts, then pack into [0,1]^2.
inline UVAtlas flatten_atlas(const TriMesh& mesh, const std::vector<std::vector<int>>& charts) {
    UVAtlas atlas;
    atlas.charts = charts;
    atlas.uv.assign(mesh.vertices.size(), Vec2{0.0, 0.0});
    atlas.face_metrics.assign(mesh.faces.size(), FaceMetric{});

    std::vector<char> claimed(mesh.vertices.size(), 0);
    std::vector<Vec2> bbox_min(charts.size()), bbox_size(charts.size());
    double total = 0.0;
    for (size_t c = 0; c < charts.size(); ++c) {
        FlattenResult flat = flatten_chart(mesh, charts[c]);
        for (int v : flat.vertices) {
            if (claimed[v])
                throw TopologyError("flatten: charts share a vertex (non-manifold connection)");
            claimed[v] = 1;
            atlas.uv[v] = flat.uv[v];
        }
        MetricSummary ms = conformal_energy(mesh, charts[c], flat.uv);
        for (size_t i = 0; i < charts[c].size(); ++i)
            atlas.face_metrics[charts[c][i]] = ms.faces[i];
        atlas.chart_mean.push_back(ms.mean_e_conf);
        atlas.counted_faces += ms.counted;
        atlas.skipped_faces += ms.skipped;
        for (size_t i = 0; i < ms.faces.size(); ++i)
            if (ms.faces[i].counted) total += ms.faces[i].e_conf;

        Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        Vec2 hi{-lo.x, -lo.y};
        for (int v : flat.vertices) {
            lo.x = std::min(lo.x, atlas.uv[v].x);
            lo.y = std::min(lo.y, atlas.uv[v].y);
            hi.x = std::max(hi.x, atlas.uv[v].x);
            hi.y = std::max(hi.y, atlas.uv[v].y);
        }
        bbox_min[c] = lo;
        bbox_size[c] = {hi.x - lo.x, hi.y - lo.y};
    }
    if (atlas.counted_faces > 0) atlas.mean_e_conf = total / atlas.counted_faces;

    PackPlacement place = pack_atlas(bbox_size);
    atlas.pack_scale = place.scale;
    for (size_t c = 0; c < charts.size(); ++c) {
        std::vector<char> in(mesh.vertices.size(), 0);
        for (int f : charts[c])
            for (int v : mesh.faces[f]) in[v] = 1;
        for (size_t v = 0; v < in.size(); ++v)
            if (in[v])
                atlas.uv[v] = (atlas.uv[v] - bbox_min[c]) * place.scale + place.offsets[c];
    }
    return atlas;
}

// Attach packed coordinates as per-corner UVs so the mesh can be saved with vt.
inline void attach_atlas_uvs(TriMesh& mesh, const UVAtlas& atlas) {
    mesh.uv_corners.clear();
    mesh.uv_corners.reserve(mesh.faces.size() * 3);
    for (const auto& t : mesh.faces)
        for (int c = 0; c < 3; ++c) mesh.uv_corners.push_back(atlas.uv[t[c]]);
}

inline nlohmann::json metrics_report_json(const UVAtlas& atlas) {
    nlohmann::json charts = nlohmann::json::array();
    for (size_t c = 0; c < atlas.charts.size(); ++c) {
        nlohmann::json entry;
        entry["faces"] = atlas.charts[c].size();
        entry["mean_conformal_energy"] =
            std::isfinite(atlas.chart_mean[c]) ? atlas.chart_mean[c] : -1.0;
        charts.push_back(entry);
    }
    return nlohmann::json{{"chart_count", atlas.charts.size()},
                          {"charts", charts},
                          {"mean_conformal_energy",
                           std::isfinite(atlas.mean_e_conf) ? atlas.mean_e_conf : -1.0},
                          {"counted_faces", atlas.counted_faces},
                          {"skipped_faces", atlas.skipped_faces},
                          {"pack_scale", atlas.pack_scale}};
}

} // namespace seamkit
