#include "nanosr/cumulant.hpp"

#include "nanosr/units.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace nanosr {

namespace {

using cd = std::complex<double>;

cd site_expectation(const Eigen::Matrix2cd& rho, ops::OpKind kind) {
    switch (kind) {
    case ops::OpKind::project: return rho(1, 1);
    case ops::OpKind::lower: return rho(1, 0);  // tr(rho |1><2|) = <2|rho|1>
    case ops::OpKind::raise: return rho(0, 1);
    }
    return {};
}

} // namespace

MomentState product_state_moments(const MomentLayout& layout, const std::vector<Eigen::Matrix2cd>& sites) {
    if (static_cast<int>(sites.size()) != layout.sites()) {
        throw std::invalid_argument("product_state_moments: one site matrix per emitter required");
    }
    MomentState m;
    m.values.resize(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t i = 0; i < layout.size(); ++i) {
        cd v = 1.0;
        for (const auto& f : layout[i].factors) {
            v *= site_expectation(sites[static_cast<std::size_t>(f.site)], f.kind);
        }
        m.values[static_cast<Eigen::Index>(i)] = v;
    }
    return m;
}

MomentState initial_moments(const MomentLayout& layout, InitialState initial) {
    Eigen::Matrix2cd site = Eigen::Matrix2cd::Zero();
    if (initial == InitialState::ground) {
        site(0, 0) = 1.0;
    } else {
        site(1, 1) = 1.0;
    }
    return product_state_moments(layout, std::vector<Eigen::Matrix2cd>(static_cast<std::size_t>(layout.sites()), site));
}

EvaluationPlan::EvaluationPlan(std::shared_ptr<const MomentLayout> layout, std::vector<Term> static_terms,
                               std::vector<Term> drive_terms, Envelope envelope)
    : layout_(std::move(layout)), static_(std::move(static_terms)), drive_(std::move(drive_terms)),
      envelope_(envelope) {}

void EvaluationPlan::evaluate(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy,
                              Eigen::VectorXcd& z) const {
    const Eigen::Index m = y.size();
    z.resize(2 * m + 1);
    z.head(m) = y;
    z.segment(m, m) = y.conjugate();
    z[2 * m] = 1.0;
    dy.setZero(m);

    const cd* zp = z.data();
    cd* out = dy.data();
    for (const auto& term : static_) {
        out[term.target] += term.coefficient * zp[term.factors[0]] * zp[term.factors[1]] * zp[term.factors[2]];
    }
    if (!drive_.empty()) {
        const double env = envelope_value(envelope_, t);
        if (env != 0.0) {
            for (const auto& term : drive_) {
                out[term.target] +=
                    env * term.coefficient * zp[term.factors[0]] * zp[term.factors[1]] * zp[term.factors[2]];
            }
        }
    }
}

Eigen::VectorXcd EvaluationPlan::evaluate(double t, const Eigen::VectorXcd& y) const {
    Eigen::VectorXcd dy, z;
    evaluate(t, y, dy, z);
    return dy;
}

EvaluationPlan compile_plan(const ODESystem& system, const Ensemble& ensemble, const CouplingSet& couplings,
                            const Drive& drive) {
    const auto& layout = system.layout;
    const int n = layout.sites();
    if (static_cast<int>(ensemble.size()) != n || couplings.omega.rows() != n || couplings.gamma.rows() != n ||
        drive.amplitudes.size() != n) {
        throw std::invalid_argument("compile_plan: ensemble, couplings and drive must all have N entries");
    }
    const auto m = static_cast<std::uint32_t>(layout.size());
    const std::uint32_t one = 2 * m;

    using K = ParamSymbol::Kind;
    auto value = [&](const ParamSymbol& p) -> double {
        switch (p.kind) {
        case K::detuning: return ensemble[static_cast<std::size_t>(p.s)].transition_energy - drive.carrier_energy;
        case K::drive_re: return drive.amplitudes[p.s].real();
        case K::drive_im: return drive.amplitudes[p.s].imag();
        case K::coherent: return couplings.omega(p.s, p.s_prime);
        case K::dissipative: return couplings.gamma(p.s, p.s_prime);
        }
        throw std::logic_error("compile_plan: unbound parameter symbol " + to_string(p));
    };

    // (drive flag, target, sorted factor triple) -> coefficient
    std::map<std::tuple<bool, std::uint32_t, std::array<std::uint32_t, 3>>, cd> merged;
    for (std::uint32_t target = 0; target < m; ++target) {
        for (const auto& term : system.rhs[target]) {
            const double v = value(term.param);
            if (v == 0.0) {
                continue;
            }
            if (term.factors.size() > 3) {
                throw std::logic_error("compile_plan: monomial of degree > 3");
            }
            std::array<std::uint32_t, 3> f{one, one, one};
            for (std::size_t i = 0; i < term.factors.size(); ++i) {
                f[i] = term.factors[i].index + (term.factors[i].conjugate ? m : 0);
            }
            std::sort(f.begin(), f.end());
            const bool is_drive = term.param.kind == K::drive_re || term.param.kind == K::drive_im;
            merged[{is_drive, target, f}] += term.coefficient * (v / units::hbar);
        }
    }

    std::vector<EvaluationPlan::Term> static_terms, drive_terms;
    for (const auto& [key, c] : merged) {
        const auto& [is_drive, target, f] = key;
        if (std::abs(c) < 1e-300) {
            continue;
        }
        (is_drive ? drive_terms : static_terms).push_back({target, f, c});
    }
    // Exact zeros arise from cancellations between families; drop near-cancellations at rounding level.
    auto prune = [](std::vector<EvaluationPlan::Term>& terms) {
        double scale = 0.0;
        for (const auto& t : terms) scale = std::max(scale, std::abs(t.coefficient));
        std::erase_if(terms, [scale](const auto& t) { return std::abs(t.coefficient) <= 1e-14 * scale; });
    };
    prune(static_terms);
    prune(drive_terms);

    auto layout_ptr = std::make_shared<const MomentLayout>(layout);
    return EvaluationPlan(std::move(layout_ptr), std::move(static_terms), std::move(drive_terms), drive.envelope);
}

Trajectory integrate(const EvaluationPlan& plan, const MomentState& initial, double t_final, double output_dt,
                     const ode::Options& options) {
    if (!(t_final > 0.0) || !(output_dt > 0.0)) {
        throw std::invalid_argument("integrate: t_final and output_dt must be positive");
    }
    if (initial.values.size() != static_cast<Eigen::Index>(plan.size())) {
        throw std::invalid_argument("integrate: initial state does not match the plan layout");
    }
    Trajectory traj;
    traj.layout = plan.layout_ptr();
    traj.solver = plan.layout().order() == 1 ? SolverKind::cumulant1 : SolverKind::cumulant2;
    const auto grid = ode::uniform_grid(t_final, output_dt);
    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());

    Eigen::VectorXcd scratch;
    auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) { plan.evaluate(t, y, dy, scratch); };
    auto observer = [&](double t, const Eigen::VectorXcd& y) {
        traj.times.push_back(t);
        traj.states.push_back(y);
    };
    const auto breaks = envelope_breakpoints(plan.envelope());
    ode::integrate(rhs, initial.values, 0.0, grid.back(), grid, breaks, observer, options,
                   &traj.diagnostics.stats);
    return traj;
}

} // namespace nanosr
