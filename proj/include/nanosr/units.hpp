// units.hpp: Project-wide unit system and physical constants
//
// Energy in meV, time in fs, length in nm, dipole moments in Debye.
// Everything is derived from the exact/CODATA-2018 SI values below so that
// the conversions stay mutually consistent to machine precision.

#pragma once

#include <numbers>

namespace nanosr::units {

namespace si {
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double debye = 1e-21 / speed_of_light; // C m
} // namespace si

/// Reduced Planck constant, meV fs (= 658.2119569...).
inline constexpr double hbar = si::hbar / si::elementary_charge * 1e18;

/// Speed of light, nm/fs.
inline constexpr double c = si::speed_of_light * 1e-6;

/// e^2 / epsilon0 in meV nm (4 pi times the Coulomb constant 1439.96 meV nm).
inline constexpr double e2_over_eps0 = si::elementary_charge / si::epsilon0 * 1e12;

/// One Debye expressed in e nm.
inline constexpr double debye_in_e_nm = si::debye / (si::elementary_charge * 1e-9);

inline constexpr double pi = std::numbers::pi;

/// Photon energy (meV) for a vacuum wavelength (nm).
constexpr double energy_from_wavelength(double wavelength_nm) {
    return 2.0 * pi * hbar * c / wavelength_nm;
}

/// Vacuum wavenumber (1/nm) for a photon energy (meV).
constexpr double wavenumber(double energy_mev) {
    return energy_mev / (hbar * c);
}

} // namespace nanosr::units
