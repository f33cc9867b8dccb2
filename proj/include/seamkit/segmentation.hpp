#pragma once

// Patch-based part labeling: each seam-induced patch takes the majority label
// of its faces, which forces label boundaries onto patch borders.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <seamkit/errors.hpp>
#include <seamkit/mesh.hpp>

namespace seamkit {

struct PatchLabeling {
    std::vector<int> patch_labels;          // winning label per patch
    std::vector<std::map<int, int>> counts; // per patch: label -> face count
    std::vector<int> refined;               // per face: its patch's label
};

// Majority vote per patch; ties go to the smallest label id.
inline PatchLabeling refine_labels(const std::vector<std::vector<int>>& charts,
                                   const std::vector<int>& labels) {
    std::vector<int> patch_of(labels.size(), -1);
    size_t covered = 0;
    for (size_t k = 0; k < charts.size(); ++k)
        for (int f : charts[k]) {
            if (f < 0 || f >= int(labels.size())) {
                std::ostringstream msg;
                msg << "labels: patch face " << f << " out of range";
                throw ValidationError(msg.str());
            }
            if (patch_of[f] != -1) {
                std::ostringstream msg;
                msg << "labels: face " << f << " appears in more than one patch";
                throw ValidationError(msg.str());
            }
            patch_of[f] = int(k);
            ++covered;
        }
    if (covered != labels.size())
        throw ValidationError("labels: patches do not cover every face");
    for (size_t f = 0; f < labels.size(); ++f)
        if (labels[f] < 0) {
            std::ostringstream msg;
            msg << "labels: face " << f << " has negative label " << labels[f];
            throw ValidationError(msg.str());
        }

    PatchLabeling out;
    out.counts.resize(charts.size());
    out.patch_labels.resize(charts.size());
    for (size_t f = 0; f < labels.size(); ++f) ++out.counts[patch_of[f]][labels[f]];
    for (size_t k = 0; k < charts.size(); ++k) {
        int best = -1, best_count = -1;
        for (const auto& [label, count] : out.counts[k]) // map order = ascending label
            if (count > best_count) {
                best = label;
                best_count = count;
            }
        out.patch_labels[k] = best;
    }
    out.refined.resize(labels.size());
    for (size_t f = 0; f < labels.size(); ++f) out.refined[f] = out.patch_labels[patch_of[f]];
    return out;
}

// Fraction of label-transition edges that lie on patch borders; 1.0 when
// there are no transitions at all.
inline double boundary_cleanliness(const TriMesh& mesh, const MeshTopology& topo,
                                   const std::vector<std::vector<int>>& charts,
                                   const std::vector<int>& labels) {
    if (labels.size() != mesh.faces.size())
        throw ValidationError("labels: need one label per face");
    std::vector<int> patch_of(mesh.faces.size(), -1);
    for (size_t k = 0; k < charts.size(); ++k)
        for (int f : charts[k]) patch_of[f] = int(k);

    int transitions = 0, on_border = 0;
    for (size_t e = 0; e < topo.edges.size(); ++e) {
        const auto& faces = topo.edge_faces[e];
        bool label_jump = false, patch_jump = false;
        for (size_t i = 1; i < faces.size(); ++i) {
            if (labels[faces[i]] != labels[faces[0]]) label_jump = true;
            if (patch_of[faces[i]] != patch_of[faces[0]]) patch_jump = true;
        }
        if (label_jump) {
            ++transitions;
            if (patch_jump) ++on_border;
        }
    }
    return transitions == 0 ? 1.0 : double(on_border) / transitions;
}

inline std::vector<int> labels_from_json(const nlohmann::json& j) {
    if (!j.contains("labels") || !j["labels"].is_array())
        throw ValidationError("labels: expected a JSON object with a \"labels\" array");
    std::vector<int> out;
    for (const auto& v : j["labels"]) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ValidationError("labels: entries must be nonnegative integers");
        out.push_back(v.get<int>());
    }
    return out;
}

inline nlohmann::json labels_report_json(const PatchLabeling& refined) {
    nlohmann::json patches = nlohmann::json::array();
    for (size_t k = 0; k < refined.patch_labels.size(); ++k) {
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& [label, count] : refined.counts[k])
            counts[std::to_string(label)] = count;
        patches.push_back({{"label", refined.patch_labels[k]}, {"counts", counts}});
    }
    return nlohmann::json{{"labels", refined.refined}, {"patches", patches}};
}

} // namespace seamkit
