// SPDX-License-Identifier: MIT
//
// Units convention, cavity description, Fermi-Dirac occupation, and the
// thermal-parameter solvers that map conserved (E, N) to (T, mu) for either a
// continuous 2-d cavity spectrum (constant density of states) or an explicit
// discrete level list.

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace fermicavity::thermo {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Billiard-style cavity with natural units hbar = m = 1 by default; all
/// formulas carry hbar and m explicitly so other unit systems can be checked.
struct CavityModel {
    double hbar = 1.0;
    double mass = 1.0;
    double volume = 1.0;       ///< 2-d "volume" (an area)
    double linear_size = 1.0;  ///< traversal length scale L
    double lattice_a = 0.0;    ///< sampling grid spacing; 0 = continuum
    /// Dimensionless prefactor of the Lyapunov rate lambda_L =
    /// prefactor * sqrt(eps/m) / L (order of the inverse free-flight time).
    double lyapunov_prefactor = 1.0;

    /// Mean spectral density of the 2-d cavity: rho = V m / (2 pi hbar^2).
    double spectral_density() const;

    /// L / sqrt(V); ~1 for compact shapes, recorded rather than assumed.
    double shape_factor() const;

    void validate() const; // throws DomainError
};

/// Grand-canonical parameters plus the conserved charges they reproduce.
struct ThermalState {
    double T = 0.0;
    double mu = 0.0;
    double E = std::numeric_limits<double>::quiet_NaN();
    double N = std::numeric_limits<double>::quiet_NaN();

    double beta() const { return 1.0 / T; }
    double alpha() const { return -mu / T; }

    void validate() const; // throws DomainError unless T > 0 and mu finite
};

/// Single-particle spectrum: either the smooth 2-d cavity counting measure
/// dm = rho d(eps) or an explicit strictly ascending level list.
struct SpectrumModel {
    enum class Kind { Continuous2D, DiscreteLevels };

    Kind kind = Kind::Continuous2D;
    double rho = 0.0;               ///< continuous case only
    std::vector<double> levels;     ///< discrete case only

    static SpectrumModel continuous(double rho);
    static SpectrumModel discrete(std::vector<double> levels);
    /// Equidistant unit-spaced levels 1, 2, ..., count (harmonic tower).
    static SpectrumModel harmonic(std::size_t count);

    void validate() const; // throws DomainError
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Fermi factor 1/(e^{(eps-mu)/T} + 1), overflow-safe in both tails (returns
/// the exact 0/1 limits once the exponent leaves the representable range).
double fermi_dirac(double eps, double T, double mu);
double fermi_dirac(double eps, const ThermalState& ts);

/// Particle number N(T, mu) of the spectrum (closed form for the continuous
/// case, direct sum for discrete levels).
double number_of(const SpectrumModel& spec, double T, double mu);

/// Energy E(T, mu) of the spectrum.
double energy_of(const SpectrumModel& spec, double T, double mu);

/// Pauli ground-state energy of N fermions on the spectrum.
double ground_state_energy(const SpectrumModel& spec, double N);

/// Invert the constraints Sum n_FD = N and Sum eps n_FD = E for (T, mu).
/// Newton on (ln T, mu) seeded by a Sommerfeld estimate, with a nested
/// bisection fallback (mu inner, T outer; both maps are monotone).  The
/// returned state reproduces (E, N) to better than 1e-8 relative.
/// E at or below the Pauli minimum is infeasible (DomainError); a discrete
/// level list whose top level is still measurably occupied at the solution
/// triggers NumericError (the truncation would bias the fit).
ThermalState solve_thermal(const SpectrumModel& spec, double E, double N);

/// Log-short correspondence-breaking timescale (1/lambda_L) ln(A/hbar) of a
/// chaotic cavity, with lambda_L = prefactor sqrt(eps/m)/L and the
/// characteristic action A = L sqrt(2 m eps).  A <= hbar -> DomainError.
double ehrenfest_time(const CavityModel& cavity, double eps_avg);

/// Thermal entropy density (per area) of the unconfined 2-d Fermi gas:
/// S0 = -Integral d^2p/(2 pi hbar)^2 [n ln n + (1-n) ln(1-n)], evaluated in
/// its radial form (m / 2 pi hbar^2) Integral d(eps) [...].
double entropy_density_continuum(const ThermalState& ts, const CavityModel& cavity);

/// Thermal de Broglie length hbar / sqrt(2 m T).
double thermal_wavelength(const ThermalState& ts, const CavityModel& cavity);

/// Reduced wavelength at energy eps: hbar / sqrt(2 m eps).
double energy_wavelength(double eps, const CavityModel& cavity);

} // namespace fermicavity::thermo
