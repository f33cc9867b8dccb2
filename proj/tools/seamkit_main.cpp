// Command-line front end: wires the seam toolkit into runnable pipelines
// (extract / unwrap / segment / synth / train / generate / eval), each leaving
// a JSON report next to its outputs.
//
// Exit codes: 0 success, 1 internal error, 2 input/validation error,
// 3 topological failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <seamkit/atlas.hpp>
#include <seamkit/codec.hpp>
#include <seamkit/cutter.hpp>
#include <seamkit/extract.hpp>
#include <seamkit/mesh.hpp>
#include <seamkit/nn/checkpoint.hpp>
#include <seamkit/nn/generate.hpp>
#include <seamkit/nn/train.hpp>
#include <seamkit/obj_io.hpp>
#include <seamkit/report.hpp>
#include <seamkit/sampler.hpp>
#include <seamkit/segmentation.hpp>
#include <seamkit/synthetic.hpp>
#include <seamkit/version.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace seamkit;

namespace {

std::string sibling_path(const std::string& input, const std::string& suffix) {
    fs::path p(input);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "' for reading");
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed JSON in '" + path + "': " + e.what());
    }
}

json uv_validation_json(const UvValidationReport& rep) {
    json overlaps = json::array();
    for (const auto& [a, b] : rep.overlap_pairs) overlaps.push_back({a, b});
    return {{"degenerate_uv_faces", rep.degenerate_uv_faces},
            {"overlapping_uv_faces", overlaps},
            {"non_disk_islands", rep.non_disk_islands},
            {"clean", rep.clean()}};
}

json cut_counts_json(const CutResult& cut) {
    return {{"charts", cut.charts.size()},
            {"applied_seam_edges", cut.applied_seam_edges.size()},
            {"duplicated_vertices", cut.report.duplicated_vertices},
            {"dropped_pairs", cut.report.dropped_pairs},
            {"skipped_pairs", cut.report.skipped_pairs},
            {"boundary_noop_edges", cut.report.boundary_noop_edges.size()},
            {"unopened_edges", cut.report.unopened_edges.size()}};
}

// charts that no flattening can accept, with their diagnostics
json non_disk_charts_json(const TriMesh& cut_mesh, const std::vector<std::vector<int>>& charts,
                          std::vector<int>& bad) {
    json entries = json::array();
    for (size_t i = 0; i < charts.size(); ++i) {
        ChartTopologyInfo info = chart_topology(cut_mesh, charts[i]);
        if (info.is_disk) continue;
        bad.push_back(int(i));
        entries.push_back({{"chart", i},
                           {"euler", info.euler},
                           {"genus", info.genus},
                           {"boundary_loops", info.boundary_loop_count}});
    }
    return entries;
}

void warn_ratio(double ratio) {
    if (ratio < kRatioLow || ratio > kRatioHigh)
        std::fprintf(stderr, "warning: --ratio %.3f is outside the advisory range [%.2f, %.2f]\n",
                     ratio, kRatioLow, kRatioHigh);
}

// ---------------------------------------------------------------- extract ---

struct ExtractArgs {
    std::string input;
    std::string seams, islands, report;
    int bins = 1024;
    bool validate = false;
};

int cmd_extract(const ExtractArgs& a) {
    PipelineReport rep;
    rep.command = "extract";
    rep.inputs["mesh"] = a.input;
    std::string seams_path = a.seams.empty() ? sibling_path(a.input, ".seams.json") : a.seams;
    std::string islands_path =
        a.islands.empty() ? sibling_path(a.input, ".islands.json") : a.islands;
    std::string report_path =
        a.report.empty() ? sibling_path(a.input, ".extract.report.json") : a.report;

    StageClock clock;
    TriMesh mesh = load_obj(a.input);
    rep.add_stage("load", clock.lap(),
                  {{"vertices", mesh.vertices.size()}, {"faces", mesh.faces.size()}});

    NormalizeTransform tf = normalize_to_unit_cube(mesh);
    MeshTopology topo = build_topology(mesh);
    CodecConfig cc;
    cc.bins = a.bins;
    ExtractResult ex = extract_seams(mesh, topo, 1e-7, cc);
    rep.add_stage("extract", clock.lap(),
                  {{"seam_edges", ex.seam_set.edges.size()},
                   {"islands", ex.seam_set.islands.size()},
                   {"segments", ex.seam.count()},
                   {"tokens", ex.seam.empty() ? 0 : 6 * ex.seam.count() + 2},
                   {"normalize_scale", tf.scale}});

    if (a.validate) {
        UvValidationReport uv = validate_uv_layout(mesh, topo);
        rep.add_stage("validate_uv", clock.lap(), uv_validation_json(uv));
    }

    save_seam_json(ex.seam, seams_path);
    {
        std::ofstream out(islands_path);
        if (!out) throw ValidationError("cannot open '" + islands_path + "' for writing");
        out << json{{"islands", ex.seam_set.islands},
                    {"seam_edges", seam_edge_set_to_json(ex.seam_set)["seam_edges"]}}
                   .dump(2)
            << "\n";
    }
    rep.outputs["seams"] = seams_path;
    rep.outputs["islands"] = islands_path;
    rep.outputs["report"] = report_path;
    rep.add_stage("write", clock.lap());
    rep.save(report_path);
    std::printf("extract: %zu seam edges, %zu islands -> %s\n", ex.seam_set.edges.size(),
                ex.seam_set.islands.size(), seams_path.c_str());
    return 0;
}

// ----------------------------------------------------------------- unwrap ---

struct UnwrapArgs {
    std::string input;
    std::string seams, out, report;
    bool validate = false;
};

int cmd_unwrap(const UnwrapArgs& a) {
    PipelineReport rep;
    rep.command = "unwrap";
    rep.inputs["mesh"] = a.input;
    std::string seams_path = a.seams.empty() ? sibling_path(a.input, ".seams.json") : a.seams;
    std::string out_path = a.out.empty() ? sibling_path(a.input, ".unwrapped.obj") : a.out;
    std::string report_path =
        a.report.empty() ? sibling_path(a.input, ".unwrap.report.json") : a.report;
    rep.inputs["seams"] = seams_path;

    StageClock clock;
    TriMesh mesh = load_obj(a.input);
    NormalizeTransform tf = normalize_to_unit_cube(mesh);
    SeamSequence seam = load_seam_json(seams_path);
    rep.add_stage("load", clock.lap(),
                  {{"vertices", mesh.vertices.size()},
                   {"faces", mesh.faces.size()},
                   {"segments", seam.count()}});

    CutResult cut = apply_seams(mesh, seam);
    rep.add_stage("cut", clock.lap(), cut_counts_json(cut));

    std::vector<int> bad;
    json bad_entries = non_disk_charts_json(cut.cut_mesh, cut.charts, bad);
    if (!bad.empty()) {
        std::string ids;
        for (int i : bad) ids += (ids.empty() ? "" : ", ") + std::to_string(i);
        throw TopologyError("unwrap: " + std::to_string(bad.size()) +
                            " chart(s) are not disks after cutting: [" + ids +
                            "]; supply seams that open them (details: " + bad_entries.dump() +
                            ")");
    }

    UVAtlas atlas = flatten_atlas(cut.cut_mesh, cut.charts);
    attach_atlas_uvs(cut.cut_mesh, atlas);
    rep.add_stage("flatten", clock.lap(), metrics_report_json(atlas));

    if (a.validate) {
        MeshTopology cut_topo = build_topology(cut.cut_mesh);
        UvValidationReport uv = validate_uv_layout(cut.cut_mesh, cut_topo);
        rep.add_stage("validate_uv", clock.lap(), uv_validation_json(uv));
    }

    for (Vec3& v : cut.cut_mesh.vertices) v = tf.invert(v);
    save_obj(cut.cut_mesh, out_path);
    rep.outputs["mesh"] = out_path;
    rep.outputs["report"] = report_path;
    rep.add_stage("write", clock.lap());
    rep.save(report_path);
    std::printf("unwrap: %zu charts, mean conformal energy %.6f -> %s\n", cut.charts.size(),
                atlas.mean_e_conf, out_path.c_str());
    return 0;
}

// ---------------------------------------------------------------- segment ---

struct SegmentArgs {
    std::string input;
    std::string seams, labels, out, report;
};

int cmd_segment(const SegmentArgs& a) {
    PipelineReport rep;
    rep.command = "segment";
    rep.inputs["mesh"] = a.input;
    std::string seams_path = a.seams.empty() ? sibling_path(a.input, ".seams.json") : a.seams;
    std::string labels_path = a.labels.empty() ? sibling_path(a.input, ".labels.json") : a.labels;
    std::string out_path =
        a.out.empty() ? sibling_path(a.input, ".refined_labels.json") : a.out;
    std::string report_path =
        a.report.empty() ? sibling_path(a.input, ".segment.report.json") : a.report;
    rep.inputs["seams"] = seams_path;
    rep.inputs["labels"] = labels_path;

    StageClock clock;
    TriMesh mesh = load_obj(a.input);
    normalize_to_unit_cube(mesh);
    SeamSequence seam = load_seam_json(seams_path);
    std::vector<int> labels = labels_from_json(load_json_file(labels_path));
    rep.add_stage("load", clock.lap(),
                  {{"faces", mesh.faces.size()}, {"labels", labels.size()}});

    CutResult cut = apply_seams(mesh, seam);
    rep.add_stage("cut", clock.lap(), cut_counts_json(cut));

    MeshTopology cut_topo = build_topology(cut.cut_mesh);
    double raw = boundary_cleanliness(cut.cut_mesh, cut_topo, cut.charts, labels);
    PatchLabeling refined = refine_labels(cut.charts, labels);
    double clean = boundary_cleanliness(cut.cut_mesh, cut_topo, cut.charts, refined.refined);
    rep.add_stage("refine", clock.lap(),
                  {{"patches", cut.charts.size()},
                   {"cleanliness_raw", raw},
                   {"cleanliness_refined", clean},
                   {"cleanliness_improved", clean >= raw}});

    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot open '" + out_path + "' for writing");
    out << labels_report_json(refined).dump(2) << "\n";
    rep.outputs["labels"] = out_path;
    rep.outputs["report"] = report_path;
    rep.add_stage("write", clock.lap());
    rep.save(report_path);
    std::printf("segment: %zu patches, boundary cleanliness %.4f -> %.4f -> %s\n",
                cut.charts.size(), raw, clean, out_path.c_str());
    return 0;
}

// ------------------------------------------------------------------ synth ---

struct SynthArgs {
    std::string out_dir = "synth_out";
    int count = 20;
    std::uint64_t seed = 0;
    std::string report;
};

int cmd_synth(const SynthArgs& a) {
    PipelineReport rep;
    rep.command = "synth";
    rep.seed = a.seed;

    StageClock clock;
    std::vector<SyntheticSample> samples = make_synthetic_dataset(a.count, a.seed);
    rep.add_stage("generate", clock.lap(), {{"count", samples.size()}});

    fs::create_directories(a.out_dir);
    json manifest = {{"count", a.count}, {"seed", a.seed}, {"samples", json::array()}};
    for (size_t i = 0; i < samples.size(); ++i) {
        char base[32];
        std::snprintf(base, sizeof base, "sample_%03zu", i);
        std::string mesh_name = std::string(base) + ".obj";
        std::string seam_name = std::string(base) + ".seams.json";
        save_obj(samples[i].mesh, (fs::path(a.out_dir) / mesh_name).string());
        save_seam_json(samples[i].seam, (fs::path(a.out_dir) / seam_name).string());
        manifest["samples"].push_back({{"mesh", mesh_name},
                                       {"seams", seam_name},
                                       {"kind", samples[i].kind},
                                       {"vertices", samples[i].mesh.vertices.size()},
                                       {"faces", samples[i].mesh.faces.size()},
                                       {"segments", samples[i].seam.count()},
                                       {"ratio", seam_ratio(samples[i])}});
    }
    std::string manifest_path = (fs::path(a.out_dir) / "manifest.json").string();
    std::ofstream mf(manifest_path);
    if (!mf) throw ValidationError("cannot open '" + manifest_path + "' for writing");
    mf << manifest.dump(2) << "\n";
    rep.outputs["dir"] = a.out_dir;
    rep.outputs["manifest"] = manifest_path;
    rep.add_stage("write", clock.lap());

    std::string report_path =
        a.report.empty() ? (fs::path(a.out_dir) / "synth.report.json").string() : a.report;
    rep.outputs["report"] = report_path;
    rep.save(report_path);
    std::printf("synth: %d samples -> %s\n", a.count, a.out_dir.c_str());
    return 0;
}

// ------------------------------------------------------------------ train ---

struct TrainArgs {
    std::string data_dir;
    std::string out = "model.ckpt";
    std::string loss_csv, resume, report;
    int steps = 100;
    int batch = 8;
    double lr = 1e-4;
    double clip = 0.5;
    int warmup = 1;
    int budget = 4096;
    int bins = 1024;
    std::uint64_t seed = 0;
    bool augment = true;
    bool paper_scale = false;
};

int cmd_train(const TrainArgs& a) {
    PipelineReport rep;
    rep.command = "train";
    rep.seed = a.seed;
    rep.inputs["data"] = a.data_dir;
    std::string loss_path =
        a.loss_csv.empty() ? fs::path(a.out).replace_extension(".loss.csv").string() : a.loss_csv;
    std::string report_path =
        a.report.empty() ? fs::path(a.out).replace_extension(".train.report.json").string()
                         : a.report;

    nn::SeamModel model;
    nn::Adam opt;
    if (!a.resume.empty()) {
        nn::LoadedCheckpoint lc = nn::load_checkpoint(a.resume);
        model = std::move(lc.model);
        if (lc.has_optimizer) opt = std::move(lc.opt);
        rep.inputs["resume"] = a.resume;
    } else {
        nn::ModelConfig cfg = a.paper_scale ? nn::ModelConfig::paper_scale() : nn::ModelConfig{};
        cfg.bins = a.bins;
        cfg.vocab = a.bins + 3;
        cfg.validate();
        model = nn::SeamModel(cfg, a.seed);
    }

    StageClock clock;
    json manifest = load_json_file((fs::path(a.data_dir) / "manifest.json").string());
    std::vector<nn::TrainExample> data;
    int budget = a.budget > 0 ? a.budget : (a.paper_scale ? 61440 : 4096);
    for (const auto& entry : manifest.at("samples")) {
        TriMesh mesh = load_obj((fs::path(a.data_dir) / entry.at("mesh").get<std::string>()).string());
        normalize_to_unit_cube(mesh);
        SeamSequence seam =
            load_seam_json((fs::path(a.data_dir) / entry.at("seams").get<std::string>()).string());
        data.push_back(nn::make_train_example(mesh, seam.segments, model.cfg, budget, a.seed));
    }
    rep.add_stage("load", clock.lap(), {{"examples", data.size()}, {"cloud_budget", budget}});

    nn::TrainConfig tc;
    tc.steps = a.steps;
    tc.batch = a.batch;
    tc.lr = a.lr;
    tc.clip = a.clip;
    tc.warmup_steps = a.warmup;
    tc.seed = a.seed;
    tc.augment = a.augment;
    tc.log_every = std::max(1, a.steps / 20);
    nn::TrainResult res = nn::train_model(model, opt, data, tc, &std::cout);
    json train_detail = {{"steps", a.steps},
                         {"batch", a.batch},
                         {"lr", a.lr},
                         {"augment", a.augment},
                         {"parameters", model.parameter_count()}};
    if (!res.history.empty()) {
        train_detail["final_ce"] = res.history.back().ce;
        train_detail["final_kl"] = res.history.back().kl;
    }
    rep.add_stage("train", clock.lap(), train_detail);

    nn::save_checkpoint(a.out, model, &opt);
    nn::write_loss_csv(res.history, loss_path);
    rep.outputs["checkpoint"] = a.out;
    rep.outputs["loss_csv"] = loss_path;
    rep.outputs["report"] = report_path;
    rep.add_stage("write", clock.lap());
    rep.save(report_path);
    if (!res.history.empty())
        std::printf("train: %d steps, final ce %.4f kl %.4f -> %s\n", a.steps,
                    res.history.back().ce, res.history.back().kl, a.out.c_str());
    else
        std::printf("train: 0 steps -> %s\n", a.out.c_str());
    return 0;
}

// --------------------------------------------------------------- generate ---

struct GenerateArgs {
    std::string input;
    std::string ckpt;
    std::string out, report;
    double ratio = 0.2;
    double temperature = 0.7;
    int top_k = 50;
    int budget = 4096;
    int max_segments = 0;
    std::uint64_t seed = 0;
};

nn::GenerationResult run_generation(const nn::SeamModel& model, const TriMesh& raw_mesh,
                                    const GenerateArgs& a, std::uint64_t seed,
                                    ConditionCloud* cloud_out) {
    TriMesh mesh = raw_mesh;
    normalize_to_unit_cube(mesh);
    MeshTopology topo = build_topology(mesh);
    ConditionCloud cloud = sample_condition(mesh, topo, a.budget, seed);
    nn::GenerationConfig gc;
    gc.ratio = a.ratio;
    gc.temperature = a.temperature;
    gc.top_k = a.top_k;
    gc.seed = seed;
    if (a.max_segments > 0) gc.max_tokens = 6 * a.max_segments + 2;
    nn::GenerationResult res =
        nn::generate(model, cloud.points, int(mesh.vertices.size()), gc);
    if (cloud_out) *cloud_out = std::move(cloud);
    return res;
}

int cmd_generate(const GenerateArgs& a) {
    PipelineReport rep;
    rep.command = "generate";
    rep.seed = a.seed;
    rep.inputs["mesh"] = a.input;
    rep.inputs["checkpoint"] = a.ckpt;
    std::string out_path = a.out.empty() ? sibling_path(a.input, ".seams.json") : a.out;
    std::string report_path =
        a.report.empty() ? sibling_path(a.input, ".generate.report.json") : a.report;

    warn_ratio(a.ratio);
    StageClock clock;
    nn::LoadedCheckpoint lc = nn::load_checkpoint(a.ckpt);
    rep.add_stage("load_model", clock.lap(),
                  {{"parameters", lc.model.parameter_count()},
                   {"width", lc.model.cfg.width},
                   {"max_len", lc.model.cfg.max_len}});

    TriMesh mesh = load_obj(a.input);
    rep.add_stage("load_mesh", clock.lap(),
                  {{"vertices", mesh.vertices.size()}, {"faces", mesh.faces.size()}});

    nn::GenerationResult res = run_generation(lc.model, mesh, a, a.seed, nullptr);
    rep.add_stage("generate", clock.lap(),
                  {{"ratio", a.ratio},
                   {"ratio_in_advisory_range", a.ratio >= kRatioLow && a.ratio <= kRatioHigh},
                   {"temperature", a.temperature},
                   {"top_k", a.top_k},
                   {"cloud_budget", a.budget},
                   {"target_segments", res.target_segments},
                   {"target_bucket", res.target_bucket},
                   {"segments", res.seam.count()},
                   {"tokens", res.tokens.size()},
                   {"truncated", res.truncated}});

    save_seam_json(res.seam, out_path);
    rep.outputs["seams"] = out_path;
    rep.outputs["report"] = report_path;
    rep.add_stage("write", clock.lap());
    rep.save(report_path);
    std::printf("generate: %zu segments (target %d%s) -> %s\n", res.seam.count(),
                res.target_segments, res.truncated ? ", truncated" : "", out_path.c_str());
    return 0;
}

// ------------------------------------------------------------------- eval ---

struct EvalArgs {
    GenerateArgs gen; // input unused; ckpt + sampling knobs shared
    std::string dir;
    std::string out, out_dir, report;
};

int cmd_eval(const EvalArgs& a) {
    PipelineReport rep;
    rep.command = "eval";
    rep.seed = a.gen.seed;
    rep.inputs["dir"] = a.dir;
    rep.inputs["checkpoint"] = a.gen.ckpt;
    std::string csv_path = a.out.empty() ? (fs::path(a.dir) / "eval.csv").string() : a.out;
    std::string out_dir = a.out_dir.empty() ? a.dir : a.out_dir;
    std::string report_path =
        a.report.empty() ? (fs::path(a.dir) / "eval.report.json").string() : a.report;

    warn_ratio(a.gen.ratio);
    StageClock clock;
    nn::LoadedCheckpoint lc = nn::load_checkpoint(a.gen.ckpt);
    rep.add_stage("load_model", clock.lap(), {{"parameters", lc.model.parameter_count()}});

    std::vector<std::string> meshes;
    for (const auto& entry : fs::directory_iterator(a.dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".obj") continue;
        if (entry.path().string().ends_with(".unwrapped.obj")) continue;
        meshes.push_back(entry.path().string());
    }
    std::sort(meshes.begin(), meshes.end());
    if (meshes.empty()) throw ValidationError("eval: no .obj meshes in '" + a.dir + "'");

    fs::create_directories(out_dir);
    std::ofstream csv(csv_path);
    if (!csv) throw ValidationError("cannot open '" + csv_path + "' for writing");
    csv << "mesh,segments,charts,mean_e_conf,truncated\n";
    csv.precision(12);

    json rows = json::array();
    for (size_t i = 0; i < meshes.size(); ++i) {
        TriMesh raw = load_obj(meshes[i]);
        std::uint64_t mesh_seed = a.gen.seed + i;
        nn::GenerationResult gen = run_generation(lc.model, raw, a.gen, mesh_seed, nullptr);

        // cut along the generated seam; add cuts until every chart is a disk
        TriMesh mesh = raw;
        NormalizeTransform tf = normalize_to_unit_cube(mesh);
        CutResult first = apply_seams(mesh, gen.seam);
        CompleteCutsResult completed = complete_cuts(mesh, first.applied_seam_edges);
        if (!completed.unfixable_charts.empty())
            throw TopologyError("eval: mesh '" + meshes[i] + "' has unfixable charts");

        UVAtlas atlas = flatten_atlas(completed.cut.cut_mesh, completed.cut.charts);
        attach_atlas_uvs(completed.cut.cut_mesh, atlas);
        for (Vec3& v : completed.cut.cut_mesh.vertices) v = tf.invert(v);
        std::string obj_out =
            (fs::path(out_dir) / (fs::path(meshes[i]).stem().string() + ".unwrapped.obj"))
                .string();
        save_obj(completed.cut.cut_mesh, obj_out);

        std::string name = fs::path(meshes[i]).filename().string();
        csv << name << ',' << gen.seam.count() << ',' << completed.cut.charts.size() << ','
            << atlas.mean_e_conf << ',' << (gen.truncated ? 1 : 0) << '\n';
        rows.push_back({{"mesh", name},
                        {"seed", mesh_seed},
                        {"segments", gen.seam.count()},
                        {"charts", completed.cut.charts.size()},
                        {"added_cut_edges", completed.added_edges},
                        {"mean_e_conf", atlas.mean_e_conf},
                        {"truncated", gen.truncated},
                        {"obj", obj_out}});
        std::printf("eval: %s -> %zu segments, %zu charts, mean conformal energy %.6f\n",
                    name.c_str(), gen.seam.count(), completed.cut.charts.size(),
                    atlas.mean_e_conf);
    }
    rep.add_stage("evaluate", clock.lap(), {{"meshes", meshes.size()}, {"rows", rows}});
    rep.outputs["csv"] = csv_path;
    rep.outputs["report"] = report_path;
    rep.save(report_path);
    std::printf("eval: %zu meshes -> %s\n", meshes.size(), csv_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kToolName) + " " + kToolVersion +
                 " - seam-driven cutting, flattening, and seam generation"};
    app.require_subcommand(1);

    ExtractArgs xa;
    CLI::App* sx = app.add_subcommand("extract", "extract UV-island seams from a mesh");
    sx->add_option("input", xa.input, "input OBJ with per-corner UVs")->required();
    sx->add_option("--seams", xa.seams, "output seam JSON (default: <stem>.seams.json)");
    sx->add_option("--islands", xa.islands, "output island JSON (default: <stem>.islands.json)");
    sx->add_option("--report", xa.report, "report JSON path");
    sx->add_option("--bins", xa.bins, "quantization bins")->check(CLI::PositiveNumber);
    sx->add_flag("--validate", xa.validate, "also run UV layout validation");

    UnwrapArgs ua;
    CLI::App* su = app.add_subcommand("unwrap", "cut along seams and flatten to a UV atlas");
    su->add_option("input", ua.input, "input OBJ")->required();
    su->add_option("--seams", ua.seams, "seam JSON (default: <stem>.seams.json)");
    su->add_option("--out", ua.out, "output OBJ (default: <stem>.unwrapped.obj)");
    su->add_option("--report", ua.report, "report JSON path");
    su->add_flag("--validate", ua.validate, "validate the produced UV layout");

    SegmentArgs ga;
    CLI::App* sg = app.add_subcommand("segment", "refine face labels to whole seam patches");
    sg->add_option("input", ga.input, "input OBJ")->required();
    sg->add_option("--seams", ga.seams, "seam JSON (default: <stem>.seams.json)");
    sg->add_option("--labels", ga.labels, "face label JSON (default: <stem>.labels.json)");
    sg->add_option("--out", ga.out, "output labels (default: <stem>.refined_labels.json)");
    sg->add_option("--report", ga.report, "report JSON path");

    SynthArgs na;
    CLI::App* sn = app.add_subcommand("synth", "write a synthetic training dataset");
    sn->add_option("--out", na.out_dir, "output directory");
    sn->add_option("--count", na.count, "number of samples")->check(CLI::PositiveNumber);
    sn->add_option("--seed", na.seed, "dataset seed");
    sn->add_option("--report", na.report, "report JSON path");

    TrainArgs ta;
    CLI::App* st = app.add_subcommand("train", "train the seam generator");
    st->add_option("--data", ta.data_dir, "dataset directory (from synth)")->required();
    st->add_option("--out", ta.out, "checkpoint path");
    st->add_option("--loss-csv", ta.loss_csv, "loss curve CSV (default: <ckpt>.loss.csv)");
    st->add_option("--resume", ta.resume, "resume from an existing checkpoint");
    st->add_option("--report", ta.report, "report JSON path");
    st->add_option("--steps", ta.steps, "optimizer steps")->check(CLI::NonNegativeNumber);
    st->add_option("--batch", ta.batch, "examples per step")->check(CLI::PositiveNumber);
    st->add_option("--lr", ta.lr, "learning rate");
    st->add_option("--clip", ta.clip, "global gradient-norm limit");
    st->add_option("--warmup", ta.warmup, "linear warm-up steps");
    st->add_option("--budget", ta.budget, "condition cloud points per example");
    st->add_option("--bins", ta.bins, "coordinate bins (vocab follows)");
    st->add_option("--seed", ta.seed, "training seed");
    st->add_flag("--augment,!--no-augment", ta.augment, "random scale/rotation augmentation");
    st->add_flag("--paper-scale", ta.paper_scale,
                 "use the full-scale model constants (needs workstation memory)");

    GenerateArgs ra;
    CLI::App* sr = app.add_subcommand("generate", "sample a seam for a mesh");
    sr->add_option("input", ra.input, "input OBJ")->required();
    sr->add_option("--ckpt", ra.ckpt, "model checkpoint")->required();
    sr->add_option("--out", ra.out, "output seam JSON (default: <stem>.seams.json)");
    sr->add_option("--report", ra.report, "report JSON path");
    sr->add_option("--ratio", ra.ratio, "requested segments per vertex");
    sr->add_option("--temperature", ra.temperature, "sampling temperature (0 = greedy)");
    sr->add_option("--top-k", ra.top_k, "sample from the k best tokens (0 = all)");
    sr->add_option("--budget", ra.budget, "condition cloud points");
    sr->add_option("--max-segments", ra.max_segments, "hard cap on generated segments");
    sr->add_option("--seed", ra.seed, "sampling seed");

    EvalArgs ea;
    CLI::App* se = app.add_subcommand("eval", "generate + unwrap a directory of meshes");
    se->add_option("dir", ea.dir, "directory of .obj meshes")->required();
    se->add_option("--ckpt", ea.gen.ckpt, "model checkpoint")->required();
    se->add_option("--out", ea.out, "output CSV (default: <dir>/eval.csv)");
    se->add_option("--out-dir", ea.out_dir, "directory for unwrapped OBJs (default: <dir>)");
    se->add_option("--report", ea.report, "report JSON path");
    se->add_option("--ratio", ea.gen.ratio, "requested segments per vertex");
    se->add_option("--temperature", ea.gen.temperature, "sampling temperature (0 = greedy)");
    se->add_option("--top-k", ea.gen.top_k, "sample from the k best tokens (0 = all)");
    se->add_option("--budget", ea.gen.budget, "condition cloud points");
    se->add_option("--max-segments", ea.gen.max_segments, "hard cap on generated segments");
    se->add_option("--seed", ea.gen.seed, "base sampling seed (per-mesh offset added)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sx) return cmd_extract(xa);
        if (*su) return cmd_unwrap(ua);
        if (*sg) return cmd_segment(ga);
        if (*sn) return cmd_synth(na);
        if (*st) return cmd_train(ta);
        if (*sr) return cmd_generate(ra);
        if (*se) return cmd_eval(ea);
        std::fprintf(stderr, "error: no command selected\n");
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const TopologyError& e) {
        std::fprintf(stderr, "topology error: %s\n", e.what());
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
