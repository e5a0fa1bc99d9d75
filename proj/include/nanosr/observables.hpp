// observables.hpp: Far-field radiation, collective spin and Dicke numbers from moments

#pragma once

#include "nanosr/core_model.hpp"
#include "nanosr/moments.hpp"
#include "nanosr/trajectory.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace nanosr {

/// Full tables of first and second moments over all (s, s') including s = s'.
///   G(s,t) = <s21_s s12_t>   Z(s,t) = <s22_s s22_t>
///   W(s,t) = <s22_s s12_t>   L(s,t) = <s12_s s12_t>
/// Diagonals follow the on-site table (G = Z = P, W = L = 0). For order-1 layouts the
/// off-diagonal entries are factorised products of first moments.
struct MomentTable {
    Eigen::VectorXd P;    ///< <s22_s>
    Eigen::VectorXcd C;   ///< <s12_s>
    Eigen::MatrixXcd G;
    Eigen::MatrixXd Z;
    Eigen::MatrixXcd W;
    Eigen::MatrixXcd L;

    Eigen::Index sites() const { return P.size(); }

    /// Expectation of any product over at most two sites, read from the tables.
    std::complex<double> expectation(const ops::OpProduct& p) const;
    std::complex<double> expectation(const ops::OpSum& s) const;
};

MomentTable moment_reductions(const MomentLayout& layout, const Eigen::VectorXcd& values);

struct RadiationSeries {
    std::vector<double> times;
    std::vector<double> total;
    std::vector<double> individual;
    std::vector<double> interference;
};

struct RadiationSample {
    double total = 0.0;
    double individual = 0.0;
    double interference = 0.0;
};

/// I = Re sum_ss' K_ss' <s21_s' s12_s>, split into s = s' and s != s' parts.
RadiationSample radiation(const MomentTable& table, const Eigen::MatrixXcd& k_factors);
RadiationSeries far_field_intensity(const Trajectory& traj, const Eigen::MatrixXcd& k_factors);

struct SpinSample {
    Eigen::Vector3d A = Eigen::Vector3d::Zero();  ///< (<J_x>, <J_y>, <J_z>)
    double j_squared = 0.0;                       ///< sum_i <J_i^2>
    double J_bar = 0.0;
    double M_bar = 0.0;
    bool clamped = false;                         ///< sum_i <J_i^2> was negative
};

struct SpinSeries {
    std::vector<double> times;
    std::vector<Eigen::Vector3d> A;
    std::vector<double> J_bar;
    std::vector<double> M_bar;
    std::vector<std::string> warnings;
};

SpinSample collective_spin(const MomentTable& table);
SpinSeries collective_spin(const Trajectory& traj);

/// Smallest eigenvalue of the Hermitian matrix G(s,s') = <s21_s s12_s'>.
double gram_min_eigenvalue(const MomentTable& table);

} // namespace nanosr
