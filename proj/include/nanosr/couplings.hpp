#pragma once

#include <Eigen/Dense>

namespace nanosr {

/// Coherent (Omega), dissipative (Gamma) and far-field propagation (K) matrices.
///
/// omega and gamma are energies in meV; omega carries the Lamb shifts on the
/// diagonal, gamma the full (Purcell-enhanced) decay rates. The master
/// equation uses Gamma/2 prefactors. k_factors is in arbitrary radiation units
/// and may be left empty until a propagation mode is chosen.
struct CouplingSet {
    Eigen::MatrixXd omega;
    Eigen::MatrixXd gamma;
    Eigen::MatrixXcd k_factors;

    Eigen::Index size() const { return omega.rows(); }
};

} // namespace nanosr
