#pragma once

#include <numbers>

namespace nvc {

/// Fundamental constants in SI units (CODATA 2018).
struct PhysicalConstants {
    double h = 6.62607015e-34;                       ///< Planck constant [J s] (exact)
    double hbar = 6.62607015e-34 / (2.0 * std::numbers::pi);  ///< reduced Planck constant [J s]
    double mu_B = 9.2740100783e-24;                  ///< Bohr magneton [J/T]
    double g_e = 2.00231930436256;                   ///< free-electron g factor
    double eps0 = 8.8541878128e-12;                  ///< vacuum permittivity [F/m]
    double elementary_charge = 1.602176634e-19;      ///< elementary charge [C] (exact)
    double boltzmann_k = 1.380649e-23;               ///< Boltzmann constant [J/K] (exact)

    double coulomb_constant() const { return 1.0 / (4.0 * std::numbers::pi * eps0); }
};

/// Ground-state coupling constants of the NV center, stored as frequencies
/// (energy over h) so they can be plugged straight into spectra in Hz.
///
/// Electric dipole parameters are in Hz per (V/m); 1 kHz·cm/kV = 1e-2 Hz/(V/m).
struct NVParameters {
    double D_gs_over_h = 2.87e9;      ///< zero-field splitting [Hz]
    double d_par_over_h = 3.5e-3;     ///< axial electric dipole, 0.35 kHz·cm/kV [Hz/(V/m)]
    double d_perp_over_h = 0.17;      ///< non-axial electric dipole, 17 kHz·cm/kV [Hz/(V/m)]
    double A_par_over_h = -2.1e6;     ///< axial hyperfine (14N) [Hz]
    double A_perp_over_h = -2.7e6;    ///< non-axial hyperfine (14N) [Hz]
    double P_over_h = -5.0e6;         ///< 14N quadrupole [Hz]
    double g_e = 2.0028;              ///< electron g factor used in the spin Hamiltonian

    /// Electron Zeeman frequency g_e mu_B B / h for a field B [T], in Hz.
    double zeeman_hz(double b_tesla, const PhysicalConstants& c = {}) const {
        return g_e * c.mu_B * b_tesla / c.h;
    }
};

}  // namespace nvc
