#include "nanosr/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nanosr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_spacing(double spacing) {
    if (!(spacing > 0.0)) {
        throw std::invalid_argument("geometry: spacing must be positive");
    }
}

} // namespace

double envelope_value(const Envelope& env, double t) {
    return std::visit(
        overloaded{
            [](const Continuous&) { return 1.0; },
            [t](const Rectangular& r) { return (t >= r.t_on && t < r.t_off) ? 1.0 : 0.0; },
            [t](const Gaussian& g) {
                const double x = (t - g.center) / g.fwhm;
                return std::exp(-4.0 * std::log(2.0) * x * x);
            },
        },
        env);
}

std::vector<double> envelope_breakpoints(const Envelope& env) {
    if (const auto* r = std::get_if<Rectangular>(&env)) {
        return {r->t_on, r->t_off};
    }
    return {};
}

const char* to_string(SolverKind kind) {
    switch (kind) {
    case SolverKind::exact: return "exact";
    case SolverKind::cumulant1: return "mf1";
    case SolverKind::cumulant2: return "mf2";
    }
    return "?";
}

Ensemble make_square_array(int n_side, double spacing, const Vec3& center, const CVec3& dipole,
                           double transition_energy) {
    if (n_side < 1) {
        throw std::invalid_argument("make_square_array: n_side must be >= 1");
    }
    return make_square_fill(n_side * n_side, spacing, center, dipole, transition_energy);
}

Ensemble make_square_fill(int count, double spacing, const Vec3& center, const CVec3& dipole,
                          double transition_energy) {
    if (count < 1) {
        throw std::invalid_argument("make_square_fill: count must be >= 1");
    }
    check_spacing(spacing);
    const int n_side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)) - 1e-12));
    const double half = 0.5 * (n_side - 1);

    Ensemble e;
    e.label = "square" + std::to_string(count);
    e.emitters.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < n_side && static_cast<int>(e.size()) < count; ++j) {
        for (int i = 0; i < n_side && static_cast<int>(e.size()) < count; ++i) {
            Emitter em;
            em.position = center + Vec3((i - half) * spacing, (j - half) * spacing, 0.0);
            em.dipole = dipole;
            em.transition_energy = transition_energy;
            e.emitters.push_back(em);
        }
    }
    return e;
}

Ensemble make_linear_array(int n, double spacing, const Vec3& start, const Vec3& direction,
                           const CVec3& dipole, double transition_energy) {
    if (n < 1) {
        throw std::invalid_argument("make_linear_array: n must be >= 1");
    }
    check_spacing(spacing);
    if (std::abs(direction.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("make_linear_array: direction must be a unit vector");
    }
    Ensemble e;
    e.label = "linear" + std::to_string(n);
    for (int k = 0; k < n; ++k) {
        e.emitters.push_back({start + (k * spacing) * direction, dipole, transition_energy});
    }
    return e;
}

Drive make_uniform_drive(std::size_t n, double carrier_energy, std::complex<double> amplitude,
                         Envelope envelope) {
    Drive d;
    d.carrier_energy = carrier_energy;
    d.amplitudes = Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(n), amplitude);
    d.envelope = envelope;
    return d;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_positive_semidefinite(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.size() == 0) {
        return true;
    }
    const double scale = m.cwiseAbs().maxCoeff();
    return min_eigenvalue(m) >= -rel_tol * scale;
}

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> v;
    const auto& em = s.ensemble.emitters;
    const auto n = static_cast<Eigen::Index>(em.size());

    if (em.empty()) {
        v.emplace_back("ensemble is empty");
    }
    for (std::size_t i = 0; i < em.size(); ++i) {
        if (!(em[i].dipole.norm() > 0.0)) {
            v.push_back("emitter " + std::to_string(i) + ": dipole must be non-zero");
        }
        if (!(em[i].transition_energy > 0.0)) {
            v.push_back("emitter " + std::to_string(i) + ": transition energy must be positive");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if ((em[i].position - em[j].position).norm() == 0.0) {
                v.push_back("emitters " + std::to_string(j) + " and " + std::to_string(i) +
                            " share a position");
            }
        }
    }

    if (s.drive.amplitudes.size() != n) {
        std::ostringstream os;
        os << "drive amplitudes length " << s.drive.amplitudes.size() << " does not match N = " << n;
        v.push_back(os.str());
    }
    if (const auto* r = std::get_if<Rectangular>(&s.drive.envelope); r && !(r->t_off > r->t_on)) {
        v.emplace_back("rectangular envelope requires t_off > t_on");
    }
    if (const auto* g = std::get_if<Gaussian>(&s.drive.envelope); g && !(g->fwhm > 0.0)) {
        v.emplace_back("gaussian envelope requires fwhm > 0");
    }
    if (!(s.t_final > 0.0)) {
        v.emplace_back("t_final must be positive");
    }
    if (s.solver == SolverKind::exact && em.size() > max_exact_emitters) {
        v.push_back("exact solver limited to N <= " + std::to_string(max_exact_emitters) +
                    " (requested " + std::to_string(em.size()) + ")");
    }

    const auto& c = s.couplings;
    const bool omega_ok = c.omega.rows() == n && c.omega.cols() == n;
    const bool gamma_ok = c.gamma.rows() == n && c.gamma.cols() == n;
    if (!omega_ok) {
        v.emplace_back("coherent matrix dimension does not match N");
    }
    if (!gamma_ok) {
        v.emplace_back("dissipative matrix dimension does not match N");
    }
    if (c.k_factors.size() != 0 && (c.k_factors.rows() != n || c.k_factors.cols() != n)) {
        v.emplace_back("propagation matrix dimension does not match N");
    }
    if (omega_ok && n > 0 &&
        (c.omega - c.omega.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + c.omega.cwiseAbs().maxCoeff())) {
        v.emplace_back("coherent matrix not symmetric");
    }
    if (gamma_ok && n > 0) {
        const double scale = c.gamma.cwiseAbs().maxCoeff();
        if ((c.gamma - c.gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale)) {
            v.emplace_back("dissipative matrix not symmetric");
        } else if (!is_positive_semidefinite(c.gamma)) {
            std::ostringstream os;
            os << "dissipative matrix not PSD (min eigenvalue " << min_eigenvalue(c.gamma) << " meV)";
            v.push_back(os.str());
        }
    }
    if (c.k_factors.size() != 0 && c.k_factors.rows() == c.k_factors.cols() &&
        (c.k_factors - c.k_factors.adjoint()).cwiseAbs().maxCoeff() >
            1e-10 * (1.0 + c.k_factors.cwiseAbs().maxCoeff())) {
        v.emplace_back("propagation matrix not Hermitian");
    }
    return v;
}

} // namespace nanosr
