#include "nanosr/solve.hpp"

#include "nanosr/cumulant.hpp"
#include "nanosr/errors.hpp"
#include "nanosr/exact.hpp"
#include "nanosr/observables.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace nanosr {

const ODESystem& cached_ode_system(int n_sites, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<const ODESystem>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n_sites, order}];
    if (!slot) {
        slot = std::make_unique<const ODESystem>(generate_ode_system(n_sites, order));
    }
    return *slot;
}

namespace {

void check_scenario(const Scenario& s) {
    if (s.solver == SolverKind::exact && s.ensemble.size() > max_exact_emitters) {
        throw ResourceGuardError("exact solver limited to N <= " + std::to_string(max_exact_emitters) +
                                 " (requested N = " + std::to_string(s.ensemble.size()) + ")");
    }
    const auto violations = validate_scenario(s);
    if (!violations.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& v : violations) {
            msg += "\n  - " + v;
        }
        throw std::invalid_argument(msg);
    }
}

void monitor(Trajectory& traj) {
    auto& d = traj.diagnostics;
    bool warned_population = false, warned_gram = false;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const MomentTable t = moment_reductions(*traj.layout, traj.states[i]);
        const double excursion = std::max(-t.P.minCoeff(), t.P.maxCoeff() - 1.0);
        d.max_population_excursion = std::max(d.max_population_excursion, std::max(0.0, excursion));
        if (excursion > 0.02 && !warned_population) {
            std::ostringstream os;
            os << "population left [-0.02, 1.02] at t = " << traj.times[i] << " fs";
            d.warnings.push_back(os.str());
            warned_population = true;
        }
        const double g = gram_min_eigenvalue(t);
        d.min_gram_eigenvalue = std::min(d.min_gram_eigenvalue, g);
        if (g < -1e-6 && !warned_gram) {
            std::ostringstream os;
            os << "coherence Gram matrix not PSD (eigenvalue " << g << ") at t = " << traj.times[i] << " fs";
            d.warnings.push_back(os.str());
            warned_gram = true;
        }
    }
}

Trajectory solve_exact(const Scenario& s, const SolveOptions& o) {
    const int n = static_cast<int>(s.ensemble.size());
    Trajectory traj;
    traj.layout = std::make_shared<const MomentLayout>(n, 2);
    traj.solver = SolverKind::exact;
    const auto& products = traj.layout->moments();
    auto& d = traj.diagnostics;

    const auto grid = ode::uniform_grid(s.t_final, o.output_dt);
    const std::size_t samples = 10;
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / samples);
    const bool check_eigen = (std::size_t(1) << n) <= 1024;
    std::size_t k = 0;

    auto observer = [&](double t, const DensityMatrix& rho) {
        traj.times.push_back(t);
        const auto v = exact_expectations(rho, products);
        traj.states.emplace_back(Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size())));
        d.max_trace_error = std::max(d.max_trace_error, std::abs(rho.trace() - 1.0));
        d.max_hermiticity_error = std::max(d.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        if (check_eigen && (k % stride == 0 || k + 1 == grid.size())) {
            const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
            d.min_density_eigenvalue = std::min(d.min_density_eigenvalue, es.eigenvalues().minCoeff());
        }
        ++k;
    };
    ode::Options opt;
    opt.tol = {o.tol_abs.value_or(1e-9), o.tol_rel.value_or(1e-7)};
    d.stats = propagate_exact(s, o.output_dt, observer, opt);
    if (d.max_trace_error > 1e-8) {
        d.warnings.push_back("density-matrix trace drifted by " + std::to_string(d.max_trace_error));
    }
    if (check_eigen && d.min_density_eigenvalue < -1e-8) {
        d.warnings.push_back("density matrix lost positivity (eigenvalue " + std::to_string(d.min_density_eigenvalue) + ")");
    }
    return traj;
}

Trajectory solve_cumulant(const Scenario& s, const SolveOptions& o, int order) {
    const int n = static_cast<int>(s.ensemble.size());
    const ODESystem& system = cached_ode_system(n, order);
    const EvaluationPlan plan = compile_plan(system, s.ensemble, s.couplings, s.drive);
    ode::Options opt;
    opt.tol = {o.tol_abs.value_or(1e-10), o.tol_rel.value_or(1e-8)};
    return integrate(plan, initial_moments(plan.layout(), s.initial), s.t_final, o.output_dt, opt);
}

} // namespace

Trajectory solve_scenario(const Scenario& scenario, const SolveOptions& options) {
    check_scenario(scenario);
    if (!(options.output_dt > 0.0)) {
        throw std::invalid_argument("solve_scenario: output_dt must be positive");
    }
    Trajectory traj;
    switch (scenario.solver) {
    case SolverKind::exact: traj = solve_exact(scenario, options); break;
    case SolverKind::cumulant1: traj = solve_cumulant(scenario, options, 1); break;
    case SolverKind::cumulant2: traj = solve_cumulant(scenario, options, 2); break;
    }
    monitor(traj);
    return traj;
}

} // namespace nanosr
