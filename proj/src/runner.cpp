#include "nanosr/runner.hpp"

#include "nanosr/errors.hpp"
#include "nanosr/observables.hpp"
#include "nanosr/solve.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <thread>

namespace nanosr {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* solver_name(SolverKind k) {
    switch (k) {
    case SolverKind::exact: return "exact";
    case SolverKind::cumulant1: return "mf1";
    case SolverKind::cumulant2: return "mf2";
    }
    return "?";
}

json pulse_json(const PulseMetrics& p) {
    if (!p.valid) return {{"valid", false}, {"i_max", p.i_max}, {"t_center_fs", p.t_center}};
    return {{"valid", true}, {"i_max", p.i_max}, {"t_center_fs", p.t_center}, {"width_fs", p.width}};
}

json run_json(const RunResult& r) {
    const auto& d = r.trajectory.diagnostics;
    json diag = {{"max_trace_error", d.max_trace_error},
                 {"max_hermiticity_error", d.max_hermiticity_error},
                 {"min_density_eigenvalue", finite_or_null(d.min_density_eigenvalue)},
                 {"min_gram_eigenvalue", finite_or_null(d.min_gram_eigenvalue)},
                 {"max_population_excursion", d.max_population_excursion},
                 {"steps_accepted", d.stats.accepted},
                 {"steps_rejected", d.stats.rejected},
                 {"rhs_evaluations", d.stats.rhs_evals}};
    json last = nullptr;
    if (!r.radiation.times.empty())
        last = {{"t_fs", r.radiation.times.back()},
                {"total", r.radiation.total.back()},
                {"individual", r.radiation.individual.back()},
                {"interference", r.radiation.interference.back()}};
    return {{"n", r.n},          {"solver", solver_name(r.solver)}, {"pulse", pulse_json(r.pulse)},
            {"final_radiation", last}, {"diagnostics", diag},        {"warnings", r.warnings},
            {"wall_seconds", r.wall_seconds}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

json finish_report(json report, const RunnerOptions& opts, Clock::time_point start) {
    report["timings"] = {{"total_seconds", seconds_since(start)}};
    json warnings = json::array();
    for (const auto& run : report["runs"])
        for (const auto& w : run["warnings"]) warnings.push_back("N=" + std::to_string(run["n"].get<int>()) + " " +
                                                                 run["solver"].get<std::string>() + ": " +
                                                                 w.get<std::string>());
    report["warnings"] = warnings;
    report["outputs"].push_back("report.json");
    write_text(opts.out_dir / "report.json", report.dump(2) + "\n");
    return report;
}

json report_header(const char* command, const RunConfig& cfg, const RunnerOptions& opts) {
    json h = {{"command", command}, {"label", cfg.label}, {"config", cfg.echo}, {"seed", cfg.seed},
              {"outputs", json::array()}, {"runs", json::array()}};
    json ov = json::object();
    if (opts.solver) ov["solver"] = solver_name(*opts.solver);
    if (opts.tol_abs) ov["tol_abs"] = *opts.tol_abs;
    if (opts.tol_rel) ov["tol_rel"] = *opts.tol_rel;
    h["overrides"] = ov;
    return h;
}

std::string csv_name(const char* stem, const RunResult& r) {
    return std::string(stem) + "_N" + std::to_string(r.n) + "_" + solver_name(r.solver) + ".csv";
}

// Runs jobs 0..count-1 on a pool. After the first failure no new jobs start; the failure of the
// lowest index is rethrown once every worker has stopped.
template <class Job>
std::vector<std::exception_ptr> run_pool(std::size_t count, unsigned threads, Job job) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= count || abort) return;
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
                abort = true;
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return errors;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace

RunResult execute(const RunConfig& cfg, const RunnerOptions& opts, std::optional<int> n_override,
                  std::optional<SolverKind> solver) {
    const auto start = Clock::now();
    Scenario sc = build_scenario(cfg, n_override);
    sc.solver = solver.value_or(opts.solver.value_or(cfg.solver));

    SolveOptions so;
    so.output_dt = cfg.output_dt;
    so.tol_abs = opts.tol_abs ? opts.tol_abs : cfg.tol_abs;
    so.tol_rel = opts.tol_rel ? opts.tol_rel : cfg.tol_rel;

    RunResult r;
    r.n = static_cast<int>(sc.ensemble.size());
    r.solver = sc.solver;
    r.trajectory = solve_scenario(sc, so);
    r.radiation = far_field_intensity(r.trajectory, sc.couplings.k_factors);
    r.spin = collective_spin(r.trajectory);
    for (const auto& y : r.trajectory.states) r.populations.push_back(moment_reductions(*r.trajectory.layout, y).P);

    r.warnings = r.trajectory.diagnostics.warnings;
    if (r.spin.warnings.size() > 3) {
        r.warnings.push_back(r.spin.warnings.front() + " (and " + std::to_string(r.spin.warnings.size() - 1) +
                             " more samples)");
    } else {
        r.warnings.insert(r.warnings.end(), r.spin.warnings.begin(), r.spin.warnings.end());
    }
    const double t_end = cfg.analysis_end.value_or(cfg.t_final);
    try {
        r.pulse = pulse_metrics(r.radiation, cfg.analysis_start, t_end);
        if (!r.pulse.valid) r.warnings.push_back("no complete radiation pulse inside the analysis window");
    } catch (const std::invalid_argument& e) {
        r.warnings.push_back(std::string("pulse analysis skipped: ") + e.what());
    }
    r.wall_seconds = seconds_since(start);
    return r;
}

void write_trajectory_csv(const std::filesystem::path& path, const RunResult& r) {
    std::string out;
    for (const char* c : trajectory_columns) out += std::string(out.empty() ? "" : ",") + c;
    for (int s = 0; s < r.n; ++s) out += ",P_" + std::to_string(s);
    out += "\n";
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
        out += fmt("%.6g", r.trajectory.times[i]);
        for (double v : {r.radiation.total[i], r.radiation.individual[i], r.radiation.interference[i],
                         r.spin.A[i].x(), r.spin.A[i].y(), r.spin.A[i].z(), r.spin.J_bar[i], r.spin.M_bar[i]})
            out += "," + fmt("%.12g", v);
        for (int s = 0; s < r.n; ++s) out += "," + fmt("%.12g", r.populations[i][s]);
        out += "\n";
    }
    write_text(path, out);
}

json run_command(const RunConfig& cfg, const RunnerOptions& opts) {
    const auto start = Clock::now();
    std::filesystem::create_directories(opts.out_dir);
    json report = report_header("run", cfg, opts);
    const RunResult r = execute(cfg, opts);
    write_trajectory_csv(opts.out_dir / "trajectory.csv", r);
    report["outputs"].push_back("trajectory.csv");
    report["runs"].push_back(run_json(r));
    return finish_report(report, opts, start);
}

json sweep_command(const RunConfig& cfg, const std::vector<int>& n_list, const RunnerOptions& opts) {
    const auto start = Clock::now();
    if (n_list.empty()) throw ConfigError("config error: sweep needs a list of N (sweep.n or --n)");
    if (std::holds_alternative<Continuous>(cfg.drive.envelope))
        throw ConfigError("config error: drive.envelope: a sweep needs a pulsed (rectangular or gaussian) drive");
    if (!cfg.drive.amplitudes.empty())
        throw ConfigError("config error: drive.amplitudes_mev: per-emitter amplitudes cannot be swept over N");
    std::filesystem::create_directories(opts.out_dir);
    json report = report_header("sweep", cfg, opts);

    std::vector<std::optional<RunResult>> results(n_list.size());
    const auto errors = run_pool(n_list.size(), opts.threads, [&](std::size_t i) {
        RunResult r = execute(cfg, opts, n_list[i]);
        write_trajectory_csv(opts.out_dir / csv_name("trajectory", r), r);
        results[i] = std::move(r);
    });

    std::string summary = "n,solver,valid,i_max,t_center_fs,width_fs\n";
    std::vector<std::pair<int, PulseMetrics>> points;
    for (const auto& r : results) {
        if (!r) continue;
        report["outputs"].push_back(csv_name("trajectory", *r));
        report["runs"].push_back(run_json(*r));
        points.emplace_back(r->n, r->pulse);
        summary += std::to_string(r->n) + "," + solver_name(r->solver) + "," + (r->pulse.valid ? "1" : "0") + "," +
                   fmt("%.12g", r->pulse.i_max) + "," + fmt("%.6g", r->pulse.t_center) + "," +
                   fmt("%.6g", r->pulse.width) + "\n";
    }
    write_text(opts.out_dir / "summary.csv", summary);
    report["outputs"].push_back("summary.csv");

    const auto failed = std::find_if(errors.begin(), errors.end(), [](const auto& e) { return bool(e); });
    if (failed != errors.end()) {
        try {
            std::rethrow_exception(*failed);
        } catch (const std::exception& e) {
            report["error"] = "N=" + std::to_string(n_list[std::size_t(failed - errors.begin())]) + ": " + e.what();
        }
        finish_report(report, opts, start);
        std::rethrow_exception(*failed);
    }

    try {
        const ScalingFit fit = scaling_fit(points);
        report["fit"] = {{"a", fit.quadratic.intercept},     {"b", fit.quadratic.slope},
                         {"r_squared_quadratic", fit.quadratic.r_squared},
                         {"c", fit.inverse.intercept},       {"d", fit.inverse.slope},
                         {"r_squared_inverse", fit.inverse.r_squared}, {"n_used", fit.n_used}};
    } catch (const std::invalid_argument& e) {
        report["fit"] = nullptr;
        report["fit_error"] = e.what();
    }
    return finish_report(report, opts, start);
}

json compare_command(const RunConfig& cfg, const RunnerOptions& opts) {
    const auto start = Clock::now();
    const int n = static_cast<int>(build_ensemble(cfg).size());
    if (n > 10) throw ConfigError("config error: compare is limited to N <= 10 (config has " + std::to_string(n) + ")");
    std::filesystem::create_directories(opts.out_dir);
    json report = report_header("compare", cfg, opts);

    const SolverKind kinds[] = {SolverKind::exact, SolverKind::cumulant2, SolverKind::cumulant1};
    std::vector<std::optional<RunResult>> results(3);
    const auto errors = run_pool(3, opts.threads, [&](std::size_t i) {
        RunResult r = execute(cfg, opts, std::nullopt, kinds[i]);
        write_trajectory_csv(opts.out_dir / csv_name("trajectory", r), r);
        results[i] = std::move(r);
    });
    for (const auto& r : results)
        if (r) {
            report["outputs"].push_back(csv_name("trajectory", *r));
            report["runs"].push_back(run_json(*r));
        }
    for (std::size_t i = 0; i < 3; ++i)
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                report["error"] = std::string(solver_name(kinds[i])) + ": " + e.what();
            }
            finish_report(report, opts, start);
            std::rethrow_exception(errors[i]);
        }

    struct Observable {
        const char* name;
        std::function<std::vector<double>(const RunResult&)> series;
    };
    const std::vector<Observable> observables = {
        {"total", [](const RunResult& r) { return r.radiation.total; }},
        {"individual", [](const RunResult& r) { return r.radiation.individual; }},
        {"interference", [](const RunResult& r) { return r.radiation.interference; }},
        {"J_bar", [](const RunResult& r) { return r.spin.J_bar; }},
        {"M_bar", [](const RunResult& r) { return r.spin.M_bar; }},
    };
    const std::pair<int, int> pairs[] = {{0, 1}, {0, 2}, {1, 2}};
    const char* pair_names[] = {"exact_vs_mf2", "exact_vs_mf1", "mf2_vs_mf1"};

    auto population_gap = [](const RunResult& a, const RunResult& b) {
        double worst = 0.0;
        for (std::size_t i = 0; i < std::min(a.populations.size(), b.populations.size()); ++i)
            worst = std::max(worst, (a.populations[i] - b.populations[i]).cwiseAbs().maxCoeff());
        return worst;
    };
    // relative deviation of the radiation maximum in the analysis window
    auto peak_gap = [](const RunResult& ref, const RunResult& other) -> json {
        if (!(ref.pulse.i_max > 0.0)) return nullptr;
        return std::abs(other.pulse.i_max - ref.pulse.i_max) / ref.pulse.i_max;
    };
    json table = json::object();
    std::string csv = "observable";
    for (const char* p : pair_names) csv += std::string(",") + p;
    csv += "\n";
    auto add_row = [&](const std::string& name, const std::vector<json>& values) {
        csv += name;
        for (std::size_t k = 0; k < 3; ++k) {
            table[name][pair_names[k]] = values[k];
            csv += "," + (values[k].is_null() ? std::string("nan") : fmt("%.6e", values[k].get<double>()));
        }
        csv += "\n";
    };
    {
        std::vector<json> v;
        for (const auto& [a, b] : pairs) v.push_back(population_gap(*results[a], *results[b]));
        add_row("population", v);
    }
    for (const auto& o : observables) {
        std::vector<json> v;
        for (const auto& [a, b] : pairs) v.push_back(max_gap(o.series(*results[a]), o.series(*results[b])));
        add_row(o.name, v);
    }
    {
        std::vector<json> v;
        for (const auto& [a, b] : pairs) v.push_back(peak_gap(*results[a], *results[b]));
        add_row("pulse_peak_relative", v);
    }
    write_text(opts.out_dir / "compare.csv", csv);
    report["outputs"].push_back("compare.csv");
    report["comparison"] = table;
    return finish_report(report, opts, start);
}

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty() || v < 1) throw ConfigError("invalid N list '" + text + "'");
        return v;
    };
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const int lo = to_int(text.substr(0, dots)), hi = to_int(text.substr(dots + 2));
        if (hi < lo) throw ConfigError("invalid N range '" + text + "'");
        for (int k = lo; k <= hi; ++k) out.push_back(k);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        out.push_back(to_int(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace nanosr
