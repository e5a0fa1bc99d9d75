// core_model.hpp: Emitters, drives, scenarios and geometry generators

#pragma once

#include "nanosr/couplings.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace nanosr {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

/// Two-level molecule: position (nm), transition dipole (Debye), transition energy (meV).
struct Emitter {
    Vec3 position = Vec3::Zero();
    CVec3 dipole = CVec3::Zero();
    double transition_energy = 0.0;
};

struct Ensemble {
    std::vector<Emitter> emitters;
    std::string label;

    std::size_t size() const { return emitters.size(); }
    const Emitter& operator[](std::size_t i) const { return emitters[i]; }
};

// Drive envelopes. Times in fs.
struct Continuous {};
struct Rectangular {
    double t_on = 0.0;
    double t_off = 0.0;
};
struct Gaussian {
    double center = 0.0;
    double fwhm = 0.0;
};
using Envelope = std::variant<Continuous, Rectangular, Gaussian>;

/// Real scalar multiplying the drive amplitudes at time t.
double envelope_value(const Envelope& env, double t);

/// Times where the envelope is discontinuous; integrators restart there.
std::vector<double> envelope_breakpoints(const Envelope& env);

/// Semiclassical laser drive in the frame rotating at the carrier frequency.
struct Drive {
    double carrier_energy = 0.0;     ///< hbar * omega_l, meV
    Eigen::VectorXcd amplitudes;     ///< hbar * v_s per emitter, meV
    Envelope envelope = Continuous{};
};

enum class SolverKind { exact, cumulant1, cumulant2 };
enum class InitialState { ground, inverted };

const char* to_string(SolverKind kind);

/// Largest ensemble the density-matrix solver accepts.
inline constexpr std::size_t max_exact_emitters = 12;

struct Scenario {
    Ensemble ensemble;
    CouplingSet couplings;
    Drive drive;
    double t_final = 0.0;            ///< fs
    SolverKind solver = SolverKind::cumulant2;
    InitialState initial = InitialState::ground;
};

/// n_side x n_side lattice in the x-y plane centred on `center`, row-major (y outer, x inner).
Ensemble make_square_array(int n_side, double spacing, const Vec3& center, const CVec3& dipole,
                           double transition_energy);

/// First `count` sites (row-major) of the smallest square lattice holding them, centred on `center`.
/// Used by N-sweeps where N is not a perfect square.
Ensemble make_square_fill(int count, double spacing, const Vec3& center, const CVec3& dipole,
                          double transition_energy);

/// n emitters at start + k * spacing * direction.
Ensemble make_linear_array(int n, double spacing, const Vec3& start, const Vec3& direction,
                           const CVec3& dipole, double transition_energy);

/// Uniform amplitude for every emitter.
Drive make_uniform_drive(std::size_t n, double carrier_energy, std::complex<double> amplitude,
                         Envelope envelope);

/// Lists every violated invariant; empty means the scenario is well-formed. Never throws.
std::vector<std::string> validate_scenario(const Scenario& s);

/// Smallest eigenvalue of a symmetric matrix (0 for empty input).
double min_eigenvalue(const Eigen::MatrixXd& m);

/// True when the smallest eigenvalue is >= -rel_tol * max|m|.
bool is_positive_semidefinite(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

} // namespace nanosr
