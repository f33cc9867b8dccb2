#pragma once

// Machine-readable run reports: every command writes one JSON sidecar with
// per-stage timings and counts so pipelines can be scripted and audited.

#include <chrono>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <seamkit/errors.hpp>
#include <seamkit/version.hpp>

namespace seamkit {

class StageClock {
public:
    StageClock() : start_(std::chrono::steady_clock::now()) {}

    // seconds since construction or the previous lap
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct PipelineReport {
    std::string command;
    std::uint64_t seed = 0;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json outputs = nlohmann::json::object();
    std::vector<std::pair<std::string, nlohmann::json>> stages;

    nlohmann::json& add_stage(const std::string& name, double seconds,
                              nlohmann::json details = nlohmann::json::object()) {
        for (const auto& [n, d] : stages)
            if (n == name) throw InternalError("report stage repeated: " + name);
        details["seconds"] = seconds;
        stages.emplace_back(name, std::move(details));
        return stages.back().second;
    }

    nlohmann::json to_json() const {
        nlohmann::json st = nlohmann::json::array();
        for (const auto& [name, details] : stages) {
            nlohmann::json entry = details;
            entry["name"] = name;
            st.push_back(std::move(entry));
        }
        return {{"tool", kToolName},     {"version", kToolVersion}, {"command", command},
                {"seed", seed},          {"inputs", inputs},        {"outputs", outputs},
                {"stages", st}};
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ValidationError("cannot open '" + path + "' for writing");
        out << to_json().dump(2) << "\n";
    }
};

} // namespace seamkit
