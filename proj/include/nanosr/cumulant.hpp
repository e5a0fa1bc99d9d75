// cumulant.hpp: Numeric right-hand side for the closed moment equations

#pragma once

#include "nanosr/core_model.hpp"
#include "nanosr/moments.hpp"
#include "nanosr/ode.hpp"
#include "nanosr/trajectory.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace nanosr {

/// Flattened, numeric form of an ODESystem for one set of couplings and drive.
///
/// Each term reads three entries of the extended vector z = [y, conj(y), 1] so that
/// conjugated references and constants need no branching; missing factors point at the 1.
class EvaluationPlan {
public:
    struct Term {
        std::uint32_t target;
        std::array<std::uint32_t, 3> factors;
        std::complex<double> coefficient;  ///< already divided by hbar (1/fs)
    };

    EvaluationPlan(std::shared_ptr<const MomentLayout> layout, std::vector<Term> static_terms,
                   std::vector<Term> drive_terms, Envelope envelope);

    const MomentLayout& layout() const { return *layout_; }
    std::shared_ptr<const MomentLayout> layout_ptr() const { return layout_; }
    std::size_t size() const { return layout_->size(); }
    const std::vector<Term>& static_terms() const { return static_; }
    const std::vector<Term>& drive_terms() const { return drive_; }
    std::size_t term_count() const { return static_.size() + drive_.size(); }
    const Envelope& envelope() const { return envelope_; }

    /// dy = d/dt y at time t. `scratch` is resized as needed.
    void evaluate(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy, Eigen::VectorXcd& scratch) const;
    Eigen::VectorXcd evaluate(double t, const Eigen::VectorXcd& y) const;

private:
    std::shared_ptr<const MomentLayout> layout_;
    std::vector<Term> static_;
    std::vector<Term> drive_;
    Envelope envelope_;
};

/// Substitutes Delta_s = E_s - E_laser, v_s, Omega, Gamma into the symbolic system.
/// Terms with identical target and factors are merged; zero coefficients are pruned.
EvaluationPlan compile_plan(const ODESystem& system, const Ensemble& ensemble, const CouplingSet& couplings,
                            const Drive& drive);

/// Integrates the moment equations on the uniform grid 0, output_dt, ..., t_final.
Trajectory integrate(const EvaluationPlan& plan, const MomentState& initial, double t_final, double output_dt,
                     const ode::Options& options = {});

} // namespace nanosr
