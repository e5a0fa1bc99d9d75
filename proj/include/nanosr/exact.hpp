// exact.hpp: Density-matrix propagation of the full master equation (N <= 12)
//
// Basis: bit s of a basis index is 1 when emitter s is excited. The right-hand
// side is applied matrix-free:
//   d rho/dt = (B + B^dagger + J(rho)) / hbar,   B = -i H_eff rho,
//   H_eff = H - (i/2) sum_ss' Gamma_ss' s21_s s12_s',
//   J(rho) = sum_ss' Gamma_ss' s12_s' rho s21_s,
// which is algebraically identical to the pairwise dissipator of the master equation.

#pragma once

#include "nanosr/core_model.hpp"
#include "nanosr/ode.hpp"
#include "nanosr/operators.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace nanosr {

using DensityMatrix = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;

DensityMatrix ground_density(int n_sites);
DensityMatrix inverted_density(int n_sites);
DensityMatrix initial_density(int n_sites, InitialState initial);

/// Sparse matrix of a canonical operator product on n_sites emitters.
SparseOperator operator_matrix(const ops::OpProduct& p, int n_sites);
SparseOperator operator_matrix(const ops::OpSum& s, int n_sites);

/// Static and drive parts of the rotating-frame Hamiltonian plus the dissipator data.
class ExactGenerators {
public:
    int sites() const { return n_; }
    Eigen::Index dim() const { return Eigen::Index(1) << n_; }

    /// Hermitian Hamiltonian (meV) at time t, dense. Intended for tests and small N.
    Eigen::MatrixXcd hamiltonian(double t) const;
    const SparseOperator& static_hamiltonian() const { return h_static_; }
    const SparseOperator& drive_hamiltonian() const { return h_drive_; }
    const Eigen::MatrixXd& gamma() const { return gamma_; }
    const Envelope& envelope() const { return envelope_; }

    /// d rho / dt (1/fs) at time t.
    void apply(double t, const DensityMatrix& rho, DensityMatrix& drho) const;

    friend ExactGenerators build_generators(const Scenario& scenario);

private:
    int n_ = 0;
    SparseOperator h_static_;     // Hermitian static part
    SparseOperator h_drive_;      // envelope-scaled part
    SparseOperator h_eff_static_; // h_static - (i/2) sum Gamma s21 s12
    Eigen::MatrixXd gamma_;
    Envelope envelope_;
};

/// Throws ResourceGuardError for N > max_exact_emitters.
ExactGenerators build_generators(const Scenario& scenario);

/// sum_ss' Gamma_ss'/2 (2 s12_s' rho s21_s - s21_s s12_s' rho - rho s21_s s12_s'), term by term.
DensityMatrix dissipator_pairwise(const Eigen::MatrixXd& gamma, const DensityMatrix& rho);

/// Same dissipator through the eigen-decomposition Gamma = sum_k g_k u_k u_k^T and
/// collective jumps L_k = sum_s u_ks s12_s.
DensityMatrix dissipator_collective(const Eigen::MatrixXd& gamma, const DensityMatrix& rho);

/// tr(rho P) for each product, by sparse application.
std::vector<std::complex<double>> exact_expectations(const DensityMatrix& rho,
                                                     const std::vector<ops::OpProduct>& products);
std::complex<double> exact_expectation(const DensityMatrix& rho, const ops::OpProduct& product);

using DensityObserver = std::function<void(double t, const DensityMatrix& rho)>;

/// Propagates rho from the scenario's initial state, calling observer on 0, dt, ..., t_final.
/// Defaults: abs 1e-9, rel 1e-7.
ode::Stats propagate_exact(const Scenario& scenario, double output_dt, const DensityObserver& observer,
                           const ode::Options& options = {{1e-9, 1e-7}});

} // namespace nanosr
