// nanosr: run, sweep and compare superradiance scenarios from TOML/JSON files
//
// exit codes: 0 ok, 1 usage/other, 2 config or invalid scenario, 3 solver failure, 4 resource guard

#include "nanosr/config.hpp"
#include "nanosr/errors.hpp"
#include "nanosr/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace nanosr;

namespace {

enum Exit { ok = 0, other = 1, config = 2, solver = 3, guard = 4 };

struct Common {
    std::string config_path;
    std::string out_dir = "out";
    std::string solver;
    std::optional<double> tol_abs, tol_rel;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("config", c.config_path, "scenario file (.toml or .json)")->required();
    cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--solver", c.solver, "override the configured solver")
        ->check(CLI::IsMember({"exact", "mf1", "mf2"}));
    cmd->add_option("--tol-abs", c.tol_abs, "absolute integrator tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-rel", c.tol_rel, "relative integrator tolerance")->check(CLI::PositiveNumber);
}

RunnerOptions options_from(const Common& c) {
    RunnerOptions o;
    o.out_dir = c.out_dir;
    if (!c.solver.empty()) o.solver = parse_solver(c.solver);
    o.tol_abs = c.tol_abs;
    o.tol_rel = c.tol_rel;
    o.threads = c.threads;
    return o;
}

void summarise(const nlohmann::json& report) {
    for (const auto& r : report["runs"]) {
        std::cout << "N=" << r["n"] << " " << r["solver"].get<std::string>();
        const auto& p = r["pulse"];
        if (p["valid"].get<bool>())
            std::cout << "  I_max=" << p["i_max"] << "  t=" << p["t_center_fs"] << " fs  FWHM=" << p["width_fs"]
                      << " fs";
        std::cout << "  (" << r["wall_seconds"] << " s)\n";
    }
    if (report.contains("fit") && !report["fit"].is_null()) {
        const auto& f = report["fit"];
        std::cout << "fit: I_max = " << f["a"] << " + " << f["b"] << " N^2 (R^2 " << f["r_squared_quadratic"]
                  << "), width = " << f["c"] << " + " << f["d"] << " / N\n";
    }
    if (report.contains("fit_error")) std::cout << "fit refused: " << report["fit_error"].get<std::string>() << "\n";
    for (const auto& w : report["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective emission of molecules coupled through plasmonic and free-space fields"};
    app.require_subcommand(1);

    Common run_opts, sweep_opts, compare_opts;
    std::string n_list;
    auto* run = app.add_subcommand("run", "solve one scenario, write trajectory.csv and report.json");
    add_common(run, run_opts);
    auto* sweep = app.add_subcommand("sweep", "solve over N, write per-N trajectories, summary.csv and a fit");
    add_common(sweep, sweep_opts);
    sweep->add_option("--n", n_list, "emitter counts, e.g. 4..9 or 4,6,8 (default: sweep.n)");
    sweep->add_option("--threads", sweep_opts.threads, "worker threads (0 = all cores)");
    auto* compare = app.add_subcommand("compare", "exact vs order-2 vs order-1 deviation table");
    add_common(compare, compare_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : other;
    }

    try {
        nlohmann::json report;
        if (run->parsed()) {
            report = run_command(load_config(run_opts.config_path), options_from(run_opts));
        } else if (sweep->parsed()) {
            const RunConfig cfg = load_config(sweep_opts.config_path);
            report = sweep_command(cfg, n_list.empty() ? cfg.sweep_n : parse_n_list(n_list), options_from(sweep_opts));
        } else {
            report = compare_command(load_config(compare_opts.config_path), options_from(compare_opts));
        }
        summarise(report);
        return ok;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return config;
    } catch (const ResourceGuardError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return guard;
    } catch (const IntegrationError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return solver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return other;
    }
}
