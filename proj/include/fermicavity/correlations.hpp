// SPDX-License-Identifier: MIT
//
// Equilibrium correlation functions of the relaxed cavity Fermi gas: the
// single-mode spatial autocorrelation of chaotic eigenfunctions, the relaxed
// one-particle correlation M(r, r') in thermal or explicit-occupation form,
// and Wick-factorized multi-point correlators evaluated as determinants over
// one-particle entries.

#pragma once

#include <cstddef>
#include <vector>

#include "fermicavity/thermo.hpp"

namespace fermicavity::correlations {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Position inside the 2-d cavity.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Euclidean separation |a - b|.
double distance(const Point& a, const Point& b);

/// Occupation of the single-particle modes entering M(r, r'): either
/// grand-canonical (Fermi-Dirac weights integrated over the smooth cavity
/// mode density) or an explicit list of mode energies with occupation
/// weights in [0, 1] (e.g. one sampled many-body configuration, or an
/// ensemble-averaged occupation curve).
struct OccupationPattern {
    enum class Mode { Thermal, Explicit };

    Mode mode = Mode::Thermal;
    thermo::ThermalState state;   ///< thermal mode only
    std::vector<double> energies; ///< explicit mode: mode energies, >= 0
    std::vector<double> weights;  ///< explicit mode: occupations in [0, 1]

    static OccupationPattern thermal(const thermo::ThermalState& ts);
    static OccupationPattern explicit_levels(std::vector<double> energies,
                                             std::vector<double> weights);

    void validate() const; // throws DomainError
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Spatial autocorrelation of one chaotic eigenfunction at energy eps > 0:
/// f(x)/V with x = separation/lambda_eps, where f = J0(x) in a 2-d cavity
/// and f = sin(x)/x in a 3-d one.  Other dimensions -> DomainError.
double autocorrelation(double eps, double separation, int dim,
                       const thermo::CavityModel& cavity);

/// Relaxed one-particle correlation M(r, r').  The thermal form integrates
/// J0(|r - r'|/lambda_eps) n_FD(eps) over the smooth mode density (the
/// cavity volume cancels against the density of states); the explicit form
/// sums the listed modes with their weights.  The result depends on the two
/// points through |r - r'| only, hence is symmetric under r <-> r'.
double relaxed_one_particle(const Point& r, const Point& r2,
                            const OccupationPattern& pat,
                            const thermo::CavityModel& cavity);

/// The same correlation as a function of the separation |r - r'| directly.
double relaxed_one_particle(double separation, const OccupationPattern& pat,
                            const thermo::CavityModel& cavity);

/// Relaxed 2j-point correlator over j annihilation points r_k and j creation
/// points r'_l.  Wick factorization reduces the signed sum over pairings to
/// det A with A_{kl} = M(r_k, r'_l); evaluated here by LU elimination.
/// Requires 1 <= j <= 8 with equal list lengths, else DomainError.
double relaxed_multi_particle(const std::vector<Point>& annihilate,
                              const std::vector<Point>& create,
                              const OccupationPattern& pat,
                              const thermo::CavityModel& cavity);

/// Reference evaluator of the same correlator by the explicit signed sum
/// over all j! pairings (j <= 6); kept to cross-check the determinant route.
double relaxed_multi_particle_leibniz(const std::vector<Point>& annihilate,
                                      const std::vector<Point>& create,
                                      const OccupationPattern& pat,
                                      const thermo::CavityModel& cavity);

/// True when every point keeps at least `margin` thermal wavelengths of
/// clearance from the walls of the square cavity [0, L]^2.  The correlators
/// above use the translation-invariant bulk form and are boundary-blind;
/// callers are expected to warn (not fail) when this check is negative.
bool within_boundary_margin(const std::vector<Point>& pts,
                            const thermo::ThermalState& ts,
                            const thermo::CavityModel& cavity,
                            double margin = 5.0);

} // namespace fermicavity::correlations
