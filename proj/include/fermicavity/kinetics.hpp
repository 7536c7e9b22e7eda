// SPDX-License-Identifier: MIT
//
// Relaxation kinetics of coarse-grained level occupations: the two-body
// collision right-hand side on a uniform ladder of single-particle levels,
// fixed-step RK4 time evolution with an occupation-window safeguard, and the
// map from a closed grid's conserved (E, N) to its thermal fixed point.

#pragma once

#include <cstddef>
#include <vector>

#include "fermicavity/thermo.hpp"

namespace fermicavity::kinetics {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Coarse-grained occupations n_nu in [0, 1] on an ascending, uniformly
/// spaced energy ladder.  The ladder is closed: collisions move particles
/// between listed levels only, so the totals sum(n) and sum(eps * n) are
/// conserved by the dynamics.
struct KineticState {
    std::vector<double> energies;    ///< ascending, uniform spacing
    std::vector<double> occupations; ///< same length, each in [0, 1]
    double t = 0.0;                  ///< elapsed time carried by evolve()

    /// Ladder eps_k = eps0 + spacing * k under the given occupations.
    static KineticState uniform(double eps0, double spacing,
                                std::vector<double> occupations);

    std::size_t levels() const { return energies.size(); }

    /// Fitted level spacing (energies.back() - energies.front()) / (n - 1).
    double spacing() const;

    double particle_number() const; ///< sum of occupations
    double energy() const;          ///< sum of eps * occupation

    /// Throws DomainError: fewer than two levels, size mismatch, non-finite
    /// entries, non-uniform or non-ascending ladder, occupations outside
    /// [0, 1] beyond 1e-9 slack.
    void validate() const;
};

/// Energy-transfer kernel W(d * h) for the pair collision
/// (nu, nu') -> (nu + d, nu' - d).  rates[d - 1] is the rate at transfer
/// d = 1 .. rates.size(); the kernel is even in d by construction, so only
/// positive transfers are stored.
struct CollisionKernel {
    std::vector<double> rates;

    /// Constant rate for every transfer up to max_transfer.
    static CollisionKernel flat(std::size_t max_transfer, double rate = 1.0);

    std::size_t max_transfer() const { return rates.size(); }

    /// Throws DomainError: empty table, non-finite or negative rates.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Pauli-blocked two-body collision term dn/dt.  For every ordered level
/// pair and transfer d the flux
///   W(d) * [ n_nu n_nu' (1 - n_{nu+d}) (1 - n_{nu'-d})  -  reverse ]
/// drains the incoming pair and feeds the outgoing one.  Fermi-Dirac
/// occupations are the fixed point (detailed balance on a uniform ladder),
/// and both sum(rhs) and sum(eps * rhs) vanish identically.  Transfers
/// larger than the ladder allows contribute nothing.  Validates both
/// arguments; throws DomainError on invalid input.
std::vector<double> collision_rhs(const KineticState& state,
                                  const CollisionKernel& kernel);

/// Classical RK4 with a fixed nominal step dt, recording the state after
/// every accepted step (element 0 is the initial state; `steps` accepted
/// steps follow).  A step whose result leaves the occupation window
/// [-1e-9, 1 + 1e-9] (or goes non-finite) is discarded and retried at half
/// the step; the reduction persists for the rest of the run, and more than
/// 24 halvings in one call throw NumericError.  Throws DomainError if the
/// initial data is invalid or dt is so large that dt * max|rhs| >= 0.1 at
/// the start (the explicit scheme would be meaningless).
std::vector<KineticState> evolve(const KineticState& initial,
                                 const CollisionKernel& kernel, double dt,
                                 std::size_t steps);

/// Thermal fixed point of a closed ladder: the (T, mu) whose Fermi-Dirac
/// occupations on exactly these levels reproduce the state's particle
/// number and energy.  Solved by nested bisection (mu inside, T outside;
/// both residuals are monotone).  Requires 0 < N < levels and
/// E_ground(N) < E < N * mean(eps) strictly -- the boundaries correspond to
/// T -> 0 and T -> infinity and have no finite-(T, mu) preimage -- else
/// DomainError.  The returned state carries T, mu, and the conserved E, N.
thermo::ThermalState equilibrium_state(const KineticState& state);

} // namespace fermicavity::kinetics
