#pragma once

#include "nanosr/core_model.hpp"
#include "nanosr/moments.hpp"
#include "nanosr/ode.hpp"

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace nanosr {

/// Flat vector of tracked moments at one instant.
struct MomentState {
    Eigen::VectorXcd values;
    double time = 0.0;
};

/// Ground (all zero) or fully inverted (populations and population products equal one).
MomentState initial_moments(const MomentLayout& layout, InitialState initial);

/// Moments of a product state; each 2x2 site density matrix is in the basis {|1>, |2>}.
MomentState product_state_moments(const MomentLayout& layout, const std::vector<Eigen::Matrix2cd>& sites);

/// Physicality monitors collected while producing a trajectory. Violations are reported as
/// warnings rather than aborting the run.
struct Diagnostics {
    double max_trace_error = 0.0;          ///< exact solver
    double max_hermiticity_error = 0.0;    ///< exact solver
    double min_density_eigenvalue = std::numeric_limits<double>::infinity();  ///< exact, sampled
    double min_gram_eigenvalue = std::numeric_limits<double>::infinity();     ///< <s21_s s12_s'> matrix
    double max_population_excursion = 0.0; ///< distance of <s22_s> outside [0, 1]
    std::vector<std::string> warnings;
    ode::Stats stats;
};

/// Time series of moments on a uniform output grid, in the layout of `layout`.
struct Trajectory {
    std::shared_ptr<const MomentLayout> layout;
    SolverKind solver = SolverKind::cumulant2;
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    Diagnostics diagnostics;

    std::size_t size() const { return times.size(); }
    int sites() const { return layout->sites(); }
};

} // namespace nanosr
