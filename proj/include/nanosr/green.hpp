// green.hpp: Dyadic Green's tensors and the coupling matrices built from them
//
// Coupling convention (energies in meV, dipoles in e nm, G in 1/nm):
//   Omega_ss' =     (e^2/eps0) k^2  d_s^* . Re G(r_s, r_s') . d_s'
//   Gamma_ss' = 2 * (e^2/eps0) k^2  d_s^* . Im G(r_s, r_s') . d_s'
// with k = E / (hbar c). The free-space self term Im G(r, r) = k / 6pi reproduces
// the vacuum spontaneous-emission rate.

#pragma once

#include "nanosr/core_model.hpp"
#include "nanosr/couplings.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace nanosr {

using GreenTensor = Eigen::Matrix3cd;

/// (r1, r2, energy in meV) -> G(r1, r2; omega) in 1/nm.
using GreenEvaluator = std::function<GreenTensor(const Vec3&, const Vec3&, double)>;

/// Homogeneous-space dyadic Green's tensor for separation vector `sep` = r1 - r2 and wavenumber k.
/// The coincidence limit keeps only the finite radiative part, Im G = k / 6pi; Re G is set to
/// zero since the divergent vacuum Lamb shift is absorbed in the transition energy.
template <class Scalar>
Eigen::Matrix<std::complex<Scalar>, 3, 3> free_space_green_k(const Eigen::Matrix<Scalar, 3, 1>& sep,
                                                             Scalar k) {
    using Complex = std::complex<Scalar>;
    using Tensor = Eigen::Matrix<Complex, 3, 3>;
    const Scalar pi = Scalar(3.14159265358979323846264338327950288L);
    const Scalar r = sep.norm();
    if (r == Scalar(0)) {
        return Tensor::Identity() * Complex(Scalar(0), k / (Scalar(6) * pi));
    }
    const Eigen::Matrix<Scalar, 3, 1> rhat = sep / r;
    const Scalar x = k * r;
    using std::cos;
    using std::sin;
    using std::abs;
    const Scalar c = cos(x), s = sin(x);
    // transverse t = e^{ix}(1 + i/x - 1/x^2), longitudinal l = e^{ix}(2/x^2 - 2i/x)
    const Scalar t_re = c * (Scalar(1) - Scalar(1) / (x * x)) - s / x;
    const Scalar l_re = Scalar(2) * c / (x * x) + Scalar(2) * s / x;
    Scalar t_im, l_im;
    if (x < Scalar(0.5)) {
        // Im parts are x (j0 - j1/x) and 2 x (j1/x); the closed form cancels badly here
        Scalar j0 = 0, j1x = 0, term = 1;
        const Scalar h = -x * x / Scalar(2);
        Scalar df0 = 1, df1 = 3;  // (2m+1)!!, (2m+3)!!
        for (int m = 0; m < 40; ++m) {
            const Scalar a0 = term / df0, a1 = term / df1;
            j0 += a0;
            j1x += a1;
            if (abs(a0) <= std::numeric_limits<Scalar>::epsilon() * abs(j0) * Scalar(1e-3)) break;
            term *= h / Scalar(m + 1);
            df0 *= Scalar(2 * m + 3);
            df1 *= Scalar(2 * m + 5);
        }
        t_im = x * (j0 - j1x);
        l_im = Scalar(2) * x * j1x;
    } else {
        t_im = s * (Scalar(1) - Scalar(1) / (x * x)) + c / x;
        l_im = Scalar(2) * s / (x * x) - Scalar(2) * c / x;
    }
    const Scalar pre = Scalar(1) / (Scalar(4) * pi * r);
    const Complex t(pre * t_re, pre * t_im), l(pre * l_re, pre * l_im);
    const Eigen::Matrix<Scalar, 3, 3> rr = rhat * rhat.transpose();
    return t * Tensor::Identity() + (l - t) * rr.template cast<Complex>();
}

GreenTensor free_space_green(const Vec3& r1, const Vec3& r2, double energy);

/// Omega and Gamma from an arbitrary Green's tensor source. k_factors is left empty.
/// Throws NotPositiveSemidefinite when Gamma fails the PSD check.
CouplingSet couplings_from_green(const Ensemble& ensemble, const GreenEvaluator& green);

/// Scattered zz Green's tensor sampled along a radial cut through the gap centre.
struct TabulatedGreen {
    double wavelength = 0.0;                        ///< nm
    std::vector<double> radial;                     ///< nm, strictly ascending from 0
    std::vector<std::complex<double>> g_zz;         ///< G^s_zz(0, r x), 1/nm
    std::complex<double> self_term;                 ///< G^s_zz(0, 0), 1/nm
};

/// Reads the JSON layout {wavelength_nm, radial_nm, g_zz_re, g_zz_im, self_re, self_im}.
TabulatedGreen read_tabulated_green(const std::string& path);
TabulatedGreen parse_tabulated_green(const std::string& json_text);
std::string format_tabulated_green(const TabulatedGreen& table);

/// Linear interpolation of the table at radius r (nm). Throws std::out_of_range beyond the last sample.
std::complex<double> interpolate(const TabulatedGreen& table, double r);

/// Couplings for vertical, coplanar dipoles from tabulated scattered data plus the free-space
/// tensor between distinct emitters.
CouplingSet load_tabulated_green(const TabulatedGreen& table, const Ensemble& ensemble);

/// Parametric stand-in for the scattered plasmonic field: exponential profiles over pair distance.
struct PlasmonicProfile {
    double gamma_self = 7.0;    ///< meV
    double omega_self = 15.0;   ///< meV
    double gamma_range = 10.0;  ///< nm
    double omega_range = 1.0;   ///< nm
    int omega_sign = 1;

    /// Scattered-field contribution Omega + i Gamma/2 (meV) for vertical dipoles at distance r.
    std::complex<double> scattered(double r) const {
        return {omega_sign * omega_self * std::exp(-r / omega_range),
                0.5 * gamma_self * std::exp(-r / gamma_range)};
    }
};

PlasmonicProfile synthetic_plasmonic_profile(double gamma_self, double omega_self,
                                             double gamma_range = 10.0, double omega_range = 1.0,
                                             int omega_sign = 1);

/// Green evaluator reproducing `profile` exactly for vertical dipoles of magnitude `dipole_debye`:
/// a zz-only scattered tensor plus Re G of free space for distinct positions.
GreenEvaluator as_green_evaluator(const PlasmonicProfile& profile, double dipole_debye);

/// Uniform Gamma (every entry equal) and zero Omega: the ideal Dicke limit.
CouplingSet uniform_couplings(std::size_t n, double gamma);

struct ConstantPropagation {};
struct FreeSpaceDetector {
    Vec3 detector;
};
using PropagationMode = std::variant<ConstantPropagation, FreeSpaceDetector>;

/// Far-field propagation factors K_ss'. Constant mode needs parallel dipoles and returns all ones.
Eigen::MatrixXcd propagation_factors(const Ensemble& ensemble, const PropagationMode& mode);

/// Mean transition energy (meV) at which couplings are evaluated.
double coupling_energy(const Ensemble& ensemble);

} // namespace nanosr
