#include "nanosr/exact.hpp"

#include "nanosr/errors.hpp"
#include "nanosr/units.hpp"

#include <stdexcept>

namespace nanosr {

namespace {

using cd = std::complex<double>;
using ops::OpKind;

// Applies a canonical product to basis state j; returns false when the result vanishes.
bool apply_product(const ops::OpProduct& p, std::uint64_t j, std::uint64_t& i) {
    i = j;
    for (const auto& f : p.factors) {
        const std::uint64_t bit = std::uint64_t(1) << f.site;
        switch (f.kind) {
        case OpKind::lower:
            if (!(i & bit)) return false;
            i &= ~bit;
            break;
        case OpKind::raise:
            if (i & bit) return false;
            i |= bit;
            break;
        case OpKind::project:
            if (!(i & bit)) return false;
            break;
        }
    }
    return true;
}

void check_sites(int n_sites) {
    if (n_sites < 1) {
        throw std::invalid_argument("exact solver: need at least one emitter");
    }
    if (static_cast<std::size_t>(n_sites) > max_exact_emitters) {
        throw ResourceGuardError("exact solver limited to N <= " + std::to_string(max_exact_emitters) +
                                 " (requested N = " + std::to_string(n_sites) + ")");
    }
}

// J(rho) = sum_ss' Gamma_ss' s12_s' rho s21_s, accumulated into out.
//   J[i][j] = sum_{s' not in i} sum_{s not in j} Gamma(s, s') rho[i | s'][j | s]
void add_jump_term(const Eigen::MatrixXd& gamma, const DensityMatrix& rho, double scale, DensityMatrix& out) {
    const int n = static_cast<int>(gamma.rows());
    const Eigen::Index dim = rho.rows();
    for (Eigen::Index j = 0; j < dim; ++j) {
        cd* dst = &out(0, j);
        for (int s = 0; s < n; ++s) {
            const Eigen::Index sbit = Eigen::Index(1) << s;
            if (j & sbit) continue;
            const cd* src = &rho(0, j | sbit);
            for (int sp = 0; sp < n; ++sp) {
                const double g = scale * gamma(s, sp);
                if (g == 0.0) continue;
                const Eigen::Index m = Eigen::Index(1) << sp;
                for (Eigen::Index hi = 0; hi < dim; hi += 2 * m) {
                    for (Eigen::Index i = hi; i < hi + m; ++i) {
                        dst[i] += g * src[i | m];
                    }
                }
            }
        }
    }
}

} // namespace

DensityMatrix ground_density(int n_sites) {
    check_sites(n_sites);
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    DensityMatrix rho = DensityMatrix::Zero(dim, dim);
    rho(0, 0) = 1.0;
    return rho;
}

DensityMatrix inverted_density(int n_sites) {
    check_sites(n_sites);
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    DensityMatrix rho = DensityMatrix::Zero(dim, dim);
    rho(dim - 1, dim - 1) = 1.0;
    return rho;
}

DensityMatrix initial_density(int n_sites, InitialState initial) {
    return initial == InitialState::ground ? ground_density(n_sites) : inverted_density(n_sites);
}

SparseOperator operator_matrix(const ops::OpProduct& p, int n_sites) {
    return operator_matrix(ops::OpSum(p), n_sites);
}

SparseOperator operator_matrix(const ops::OpSum& sum, int n_sites) {
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    std::vector<Eigen::Triplet<cd>> trip;
    for (const auto& [p, c] : sum.terms()) {
        for (const auto& f : p.factors) {
            if (f.site >= n_sites) {
                throw std::invalid_argument("operator_matrix: site index out of range");
            }
        }
        for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(dim); ++j) {
            std::uint64_t i;
            if (apply_product(p, j, i)) {
                trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), c);
            }
        }
    }
    SparseOperator m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

ExactGenerators build_generators(const Scenario& scenario) {
    const int n = static_cast<int>(scenario.ensemble.size());
    check_sites(n);
    const auto& c = scenario.couplings;
    if (c.omega.rows() != n || c.gamma.rows() != n || scenario.drive.amplitudes.size() != n) {
        throw std::invalid_argument("build_generators: coupling or drive dimension does not match N");
    }

    ops::OpSum h_static, h_drive, decay;
    for (int s = 0; s < n; ++s) {
        const double detuning = scenario.ensemble[static_cast<std::size_t>(s)].transition_energy -
                                scenario.drive.carrier_energy;
        h_static += detuning * ops::project(s);
        const cd v = scenario.drive.amplitudes[s];
        h_drive += v * ops::raise(s) + std::conj(v) * ops::lower(s);
    }
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            const ops::OpSum hop = ops::raise(s) * ops::lower(t);
            h_static -= c.omega(s, t) * hop;
            decay += c.gamma(s, t) * hop;
        }
    }

    ExactGenerators g;
    g.n_ = n;
    g.h_static_ = operator_matrix(h_static, n);
    g.h_drive_ = operator_matrix(h_drive, n);
    g.h_eff_static_ = g.h_static_ - cd(0.0, 0.5) * operator_matrix(decay, n);
    g.gamma_ = c.gamma;
    g.envelope_ = scenario.drive.envelope;
    return g;
}

Eigen::MatrixXcd ExactGenerators::hamiltonian(double t) const {
    return Eigen::MatrixXcd(h_static_) + envelope_value(envelope_, t) * Eigen::MatrixXcd(h_drive_);
}

void ExactGenerators::apply(double t, const DensityMatrix& rho, DensityMatrix& drho) const {
    thread_local DensityMatrix b;
    const double env = envelope_value(envelope_, t);
    const cd minus_i_over_hbar(0.0, -1.0 / units::hbar);
    b.noalias() = h_eff_static_ * rho;
    if (env != 0.0 && h_drive_.nonZeros() > 0) {
        b.noalias() += env * (h_drive_ * rho);
    }
    b *= minus_i_over_hbar;
    drho = b + b.adjoint();
    add_jump_term(gamma_, rho, 1.0 / units::hbar, drho);
}

DensityMatrix dissipator_pairwise(const Eigen::MatrixXd& gamma, const DensityMatrix& rho) {
    const int n = static_cast<int>(gamma.rows());
    DensityMatrix out = DensityMatrix::Zero(rho.rows(), rho.cols());
    for (int s = 0; s < n; ++s) {
        const SparseOperator up = operator_matrix(ops::raise(s), n);
        for (int t = 0; t < n; ++t) {
            if (gamma(s, t) == 0.0) continue;
            const SparseOperator down = operator_matrix(ops::lower(t), n);
            const SparseOperator hop = up * down;
            const DensityMatrix jump = down * rho * up;
            out += 0.5 * gamma(s, t) * (2.0 * jump - hop * rho - rho * hop);
        }
    }
    return out;
}

DensityMatrix dissipator_collective(const Eigen::MatrixXd& gamma, const DensityMatrix& rho) {
    const int n = static_cast<int>(gamma.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma);
    DensityMatrix out = DensityMatrix::Zero(rho.rows(), rho.cols());
    for (int k = 0; k < n; ++k) {
        const double g = es.eigenvalues()[k];
        if (g == 0.0) continue;
        ops::OpSum jump;
        for (int s = 0; s < n; ++s) {
            jump += es.eigenvectors()(s, k) * ops::lower(s);
        }
        const Eigen::MatrixXcd l = Eigen::MatrixXcd(operator_matrix(jump, n));
        const Eigen::MatrixXcd ldl = l.adjoint() * l;
        out += g * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
    }
    return out;
}

std::complex<double> exact_expectation(const DensityMatrix& rho, const ops::OpProduct& product) {
    // tr(rho P) = sum_j <j| rho P |j> = sum_j rho(j, i(j)) with P|j> = |i(j)>
    cd sum{};
    const auto dim = static_cast<std::uint64_t>(rho.rows());
    for (std::uint64_t j = 0; j < dim; ++j) {
        std::uint64_t i;
        if (apply_product(product, j, i)) {
            sum += rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        }
    }
    return sum;
}

std::vector<std::complex<double>> exact_expectations(const DensityMatrix& rho,
                                                     const std::vector<ops::OpProduct>& products) {
    std::vector<cd> out;
    out.reserve(products.size());
    for (const auto& p : products) {
        out.push_back(exact_expectation(rho, p));
    }
    return out;
}

ode::Stats propagate_exact(const Scenario& scenario, double output_dt, const DensityObserver& observer,
                           const ode::Options& options) {
    if (!(scenario.t_final > 0.0) || !(output_dt > 0.0)) {
        throw std::invalid_argument("propagate_exact: t_final and output_dt must be positive");
    }
    const ExactGenerators gen = build_generators(scenario);
    DensityMatrix rho = initial_density(gen.sites(), scenario.initial);
    const auto grid = ode::uniform_grid(scenario.t_final, output_dt);
    auto rhs = [&](double t, const DensityMatrix& r, DensityMatrix& dr) { gen.apply(t, r, dr); };
    ode::Stats stats;
    const auto breaks = envelope_breakpoints(scenario.drive.envelope);
    ode::integrate(rhs, std::move(rho), 0.0, grid.back(), grid, breaks, observer, options, &stats);
    return stats;
}

} // namespace nanosr
