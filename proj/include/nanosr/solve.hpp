#pragma once

#include "nanosr/core_model.hpp"
#include "nanosr/moments.hpp"
#include "nanosr/ode.hpp"
#include "nanosr/trajectory.hpp"

#include <optional>

namespace nanosr {

struct SolveOptions {
    double output_dt = 0.5;            ///< fs
    std::optional<double> tol_abs;     ///< defaults: 1e-9 exact, 1e-10 cumulant
    std::optional<double> tol_rel;     ///< defaults: 1e-7 exact, 1e-8 cumulant
};

/// Generated once per (N, order) and shared; thread-safe.
const ODESystem& cached_ode_system(int n_sites, int order);

/// Runs the scenario with its configured solver. Every solver yields the same trajectory form:
/// moments in the order-2 layout for exact and order-2 runs, the order-1 layout otherwise.
/// Invalid scenarios throw std::invalid_argument (ResourceGuardError for the exact-size guard).
Trajectory solve_scenario(const Scenario& scenario, const SolveOptions& options = {});

} // namespace nanosr
