// runner.hpp: run / sweep / compare orchestration, CSV output and JSON reports
#pragma once

#include "nanosr/config.hpp"
#include "nanosr/pulse.hpp"
#include "nanosr/trajectory.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nanosr {

struct RunnerOptions {
    std::filesystem::path out_dir = "out";
    std::optional<SolverKind> solver;  ///< overrides the config
    std::optional<double> tol_abs;
    std::optional<double> tol_rel;
    unsigned threads = 0;              ///< sweep workers; 0 picks the hardware concurrency
};

/// Trajectory CSV columns, in order. Populations follow as P_0 .. P_{N-1}.
inline constexpr const char* trajectory_columns[] = {"t_fs", "total", "individual", "interference", "Ax", "Ay",
                                                     "Az", "J_bar", "M_bar"};

/// Everything derived from one solver run.
struct RunResult {
    int n = 0;
    SolverKind solver = SolverKind::cumulant2;
    Trajectory trajectory;
    RadiationSeries radiation;
    SpinSeries spin;
    std::vector<Eigen::VectorXd> populations;
    PulseMetrics pulse;
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
};

/// Solves one scenario and evaluates radiation, spin and pulse metrics on the analysis window.
RunResult execute(const RunConfig& cfg, const RunnerOptions& opts, std::optional<int> n_override = std::nullopt,
                  std::optional<SolverKind> solver = std::nullopt);

void write_trajectory_csv(const std::filesystem::path& path, const RunResult& r);

/// Each command writes its files plus report.json into opts.out_dir and returns the report.
/// Failures propagate as exceptions after whatever was finished has been written.
nlohmann::json run_command(const RunConfig& cfg, const RunnerOptions& opts);
nlohmann::json sweep_command(const RunConfig& cfg, const std::vector<int>& n_list, const RunnerOptions& opts);
nlohmann::json compare_command(const RunConfig& cfg, const RunnerOptions& opts);

/// "4..9", "4,6,8" or a single number.
std::vector<int> parse_n_list(const std::string& text);

} // namespace nanosr
