#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "fracheat/errors.hpp"

namespace fracheat {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int report_schema_version = 1;

struct RunConfig {
    std::string command;
    std::optional<double> L;
    std::optional<long long> n;
    std::optional<int> M;
    std::optional<double> tol;
    std::vector<double> s_values;
    std::vector<double> p_values;
    std::vector<double> N_list;
    std::vector<int> dims{1};
    std::vector<std::string> pipelines;
    std::vector<double> probes{10.0, 20.0, 40.0};
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int jobs = 1;
    double r_max = 20.0;
    int samples = 400;
    bool moments = false;
    std::string function = "random";  // torus: random | single_mode
    int functions = 1;                // torus: random functions per (s, p)
    double t_max = 1.0;
    int n_times = 21;
};

// key = value lines, '#' comments, lists comma separated
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
// one override, "key=value"
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
nlohmann::json config_to_json(const RunConfig& cfg);
// throws Error(config) with the offending key
void validate_config(const RunConfig& cfg);

struct CommandOutput {
    nlohmann::json envelope;
    std::vector<std::pair<std::string, std::string>> files;  // name, content (besides report.json)
    int exit_code = 0;
};

// validates, runs the sweep on cfg.jobs workers, results in parameter order
CommandOutput run_command(const RunConfig& cfg);

// report.json with the timestamp on its own line, then the extra files
void write_outputs(const CommandOutput& out, const std::string& dir);
std::string render_report(const nlohmann::json& envelope);

int exit_code_for(ErrorKind kind);
nlohmann::json error_record(ErrorKind kind, const std::string& message);

struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    std::vector<std::pair<double, double>> shaded;  // x intervals
    bool zero_line = true;
};

std::string render_svg(const PlotSpec& spec);

}  // namespace fracheat
