#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include <seamkit/codec.hpp>
#include <seamkit/obj_io.hpp>

#include "support/fixtures.hpp"

using namespace seamkit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string output; // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    fs::path capture = dir / "cli_capture.txt";
    std::string cmd = std::string(SEAMKIT_CLI_PATH) + " " + args + " > " +
                      capture.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("seamkit_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

bool same_file_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

} // namespace

TEST_CASE("cli extract finds the cube's seven seam edges") {
    fs::path dir = fresh_dir("extract");
    fixtures::CrossCube cc = fixtures::cross_cube();
    fs::path mesh = dir / "cube.obj";
    save_obj(cc.mesh, mesh.string());

    RunResult r = run_cli(mesh.string() + " --validate", dir);
    INFO(r.output);
    REQUIRE(r.code == 2); // extract is a subcommand, bare invocation fails

    r = run_cli("extract " + mesh.string() + " --validate", dir);
    INFO(r.output);
    REQUIRE(r.code == 0);

    SeamSequence seam = load_seam_json((dir / "cube.seams.json").string());
    REQUIRE(seam.count() == 7);
    json islands = load_json(dir / "cube.islands.json");
    REQUIRE(islands.at("islands").size() == 1);

    json rep = load_json(dir / "cube.extract.report.json");
    REQUIRE(rep.at("command") == "extract");
    REQUIRE(rep.at("version").is_string());
    REQUIRE(rep.at("stages").is_array());
    bool saw_validate = false;
    for (const auto& st : rep.at("stages")) {
        REQUIRE(st.at("seconds").is_number());
        if (st.at("name") == "extract") {
            REQUIRE(st.at("seam_edges") == 7);
            REQUIRE(st.at("tokens") == 6 * 7 + 2);
        }
        if (st.at("name") == "validate_uv") {
            saw_validate = true;
            REQUIRE(st.at("clean") == true);
        }
    }
    REQUIRE(saw_validate);
}

TEST_CASE("cli extract rejects a mesh without uvs") {
    fs::path dir = fresh_dir("extract_nouv");
    fs::path mesh = dir / "plain.obj";
    std::ofstream(mesh) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
    RunResult r = run_cli("extract " + mesh.string(), dir);
    INFO(r.output);
    REQUIRE(r.code == 2);
    REQUIRE(r.output.find("UV") != std::string::npos);
}

TEST_CASE("cli unwrap round-trips the cube and validates its layout") {
    fs::path dir = fresh_dir("unwrap");
    fixtures::CrossCube cc = fixtures::cross_cube();
    fs::path mesh = dir / "cube.obj";
    save_obj(cc.mesh, mesh.string());
    REQUIRE(run_cli("extract " + mesh.string(), dir).code == 0);

    RunResult r = run_cli("unwrap " + mesh.string() + " --validate", dir);
    INFO(r.output);
    REQUIRE(r.code == 0);

    TriMesh out = load_obj((dir / "cube.unwrapped.obj").string());
    REQUIRE(out.has_uvs());
    REQUIRE(out.faces.size() == cc.mesh.faces.size());

    json rep = load_json(dir / "cube.unwrap.report.json");
    for (const auto& st : rep.at("stages")) {
        if (st.at("name") == "flatten") {
            REQUIRE(st.at("chart_count") == 1);
            REQUIRE(st.at("mean_conformal_energy").get<double>() < 1e-6);
        }
        if (st.at("name") == "validate_uv") REQUIRE(st.at("clean") == true);
    }
}

TEST_CASE("cli unwrap refuses a closed surface with no seams") {
    fs::path dir = fresh_dir("unwrap_sphere");
    fs::path mesh = dir / "sphere.obj";
    save_obj(fixtures::uv_sphere(6, 8), mesh.string());
    std::ofstream(dir / "empty.seams.json") << R"({"normalized": true, "segments": []})";
    RunResult r = run_cli("unwrap " + mesh.string() + " --seams " +
                              (dir / "empty.seams.json").string(),
                          dir);
    INFO(r.output);
    REQUIRE(r.code == 3);
    REQUIRE(r.output.find("disk") != std::string::npos);
}

TEST_CASE("cli segment refines labels and reports cleanliness") {
    fs::path dir = fresh_dir("segment");
    fixtures::CrossCube cc = fixtures::cross_cube();
    fs::path mesh = dir / "cube.obj";
    save_obj(cc.mesh, mesh.string());
    REQUIRE(run_cli("extract " + mesh.string(), dir).code == 0);

    json labels = json::object();
    labels["labels"] = json::array();
    for (size_t f = 0; f < cc.mesh.faces.size(); ++f)
        labels["labels"].push_back(f % 3 == 0 ? 1 : 0); // noisy two-label field
    std::ofstream(dir / "cube.labels.json") << labels.dump();

    RunResult r = run_cli("segment " + mesh.string(), dir);
    INFO(r.output);
    REQUIRE(r.code == 0);

    json refined = load_json(dir / "cube.refined_labels.json");
    REQUIRE(refined.at("labels").size() == cc.mesh.faces.size());
    json rep = load_json(dir / "cube.segment.report.json");
    for (const auto& st : rep.at("stages"))
        if (st.at("name") == "refine") {
            REQUIRE(st.at("cleanliness_refined").get<double>() >=
                    st.at("cleanliness_raw").get<double>());
            REQUIRE(st.at("cleanliness_improved") == true);
        }

    SECTION("missing labels file fails validation") {
        RunResult miss = run_cli("segment " + mesh.string() + " --labels " +
                                     (dir / "nope.json").string(),
                                 dir);
        REQUIRE(miss.code == 2);
    }
}

TEST_CASE("cli neural pipeline: synth, train, generate, eval") {
    fs::path dir = fresh_dir("neural");
    fs::path data = dir / "data";
    std::string cli_seed = " --seed 5";

    RunResult r = run_cli("synth --out " + data.string() + " --count 3" + cli_seed, dir);
    INFO(r.output);
    REQUIRE(r.code == 0);
    json manifest = load_json(data / "manifest.json");
    REQUIRE(manifest.at("samples").size() == 3);
    for (const auto& s : manifest.at("samples")) {
        REQUIRE(fs::exists(data / s.at("mesh").get<std::string>()));
        REQUIRE(fs::exists(data / s.at("seams").get<std::string>()));
        double ratio = s.at("ratio").get<double>();
        REQUIRE(ratio >= 0.1);
        REQUIRE(ratio <= 0.35);
    }

    fs::path ckpt = dir / "model.ckpt";
    r = run_cli("train --data " + data.string() + " --steps 2 --batch 2 --budget 64 --out " +
                    ckpt.string() + cli_seed,
                dir);
    INFO(r.output);
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(ckpt));
    {
        std::ifstream csv(dir / "model.loss.csv");
        std::string header;
        REQUIRE(std::getline(csv, header));
        REQUIRE(header == "step,ce_loss,kl_loss");
        int rows = 0;
        for (std::string line; std::getline(csv, line);) ++rows;
        REQUIRE(rows == 2);
    }

    fs::path target = data / "sample_000.obj";
    std::string gen_flags = " --ckpt " + ckpt.string() +
                            " --ratio 0.2 --seed 7 --max-segments 15 --budget 64";
    r = run_cli("generate " + target.string() + gen_flags + " --out " +
                    (dir / "a.seams.json").string(),
                dir);
    INFO(r.output);
    REQUIRE(r.code == 0);
    r = run_cli("generate " + target.string() + gen_flags + " --out " +
                    (dir / "b.seams.json").string(),
                dir);
    REQUIRE(r.code == 0);
    REQUIRE(same_file_bytes(dir / "a.seams.json", dir / "b.seams.json"));

    SECTION("out-of-range ratio warns but proceeds") {
        RunResult warn = run_cli("generate " + target.string() + " --ckpt " + ckpt.string() +
                                     " --ratio 0.5 --max-segments 5 --budget 64 --out " +
                                     (dir / "warn.seams.json").string(),
                                 dir);
        REQUIRE(warn.code == 0);
        REQUIRE(warn.output.find("advisory range") != std::string::npos);
    }

    SECTION("a corrupt checkpoint is an input error") {
        std::ofstream(dir / "bad.ckpt") << "junk";
        RunResult bad = run_cli("generate " + target.string() + " --ckpt " +
                                    (dir / "bad.ckpt").string(),
                                dir);
        REQUIRE(bad.code == 2);
    }

    SECTION("eval writes one finite row per mesh and parseable atlases") {
        fs::path csv_path = dir / "eval.csv";
        RunResult ev = run_cli("eval " + data.string() + " --ckpt " + ckpt.string() +
                                   " --ratio 0.15 --max-segments 12 --budget 64 --seed 3 --out " +
                                   csv_path.string(),
                               dir);
        INFO(ev.output);
        REQUIRE(ev.code == 0);

        std::ifstream csv(csv_path);
        std::string header;
        REQUIRE(std::getline(csv, header));
        REQUIRE(header == "mesh,segments,charts,mean_e_conf,truncated");
        int rows = 0;
        for (std::string line; std::getline(csv, line);) {
            if (line.empty()) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream fields(line);
            std::string name;
            int segments, charts, truncated;
            double mean;
            REQUIRE((fields >> name >> segments >> charts >> mean >> truncated));
            REQUIRE(std::isfinite(mean));
            REQUIRE(mean >= 0.0);
            REQUIRE(charts >= 1);
            TriMesh unwrapped =
                load_obj((data / (fs::path(name).stem().string() + ".unwrapped.obj")).string());
            REQUIRE(unwrapped.has_uvs());
            ++rows;
        }
        REQUIRE(rows == 3);
    }
}
