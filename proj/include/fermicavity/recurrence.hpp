// SPDX-License-Identifier: MIT
//
// Quantum recurrence-time bounds for an observable built on finitely many
// off-diagonal modes: given the count of active mode pairs, their amplitude
// range, the RMS level gap, and a deviation threshold, produce lower and
// upper estimates of the time at which the observable first returns to its
// initial value, in both linear and logarithmic form.

#pragma once

#include <cstddef>
#include <vector>

#include "fermicavity/mathcore.hpp"

namespace fermicavity::recurrence {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Reduced description of the observable's active off-diagonal structure.
struct RecurrenceInput {
    std::size_t d_F = 0;    ///< number of active (unordered) mode pairs
    double c_min = 0.0;     ///< smallest nonzero coefficient magnitude
    double c_max = 0.0;     ///< largest coefficient magnitude
    double delta_eps = 0.0; ///< RMS energy gap over the active pairs
    double eps_rec = 0.0;   ///< return threshold on the observable deviation
    double hbar = 1.0;

    /// Throws DomainError: d_F = 0, non-finite fields, c_min <= 0,
    /// c_max < c_min, delta_eps <= 0, eps_rec <= 0, hbar <= 0.
    void validate() const;
};

/// Recurrence-time window.  t_minus <= t_plus always; when the linear value
/// overflows the double range it is +infinity and the log form remains
/// finite and authoritative.
struct RecurrenceBounds {
    double t_minus = 0.0;   ///< no return before this time (estimate)
    double t_plus = 0.0;    ///< a return occurs by this time (estimate)
    double ln_t_minus = 0.0;
    double ln_t_plus = 0.0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Window estimate
///   t_pm = (2 pi hbar / delta_eps) * d_F^{-1/2}
///          * (4 pi c^2 / eps_rec)^{(d_F - 1)/2} * Gamma((d_F + 1) / 2)
/// with c = c_max for t_plus and c = c_min for t_minus (phase-space volume
/// of the return ball on the d_F-torus against the ergodic phase flow).
/// A single pair reduces exactly to the gap time 2 pi hbar / delta_eps.
/// The log form is always computed via log-Gamma; the linear form falls
/// back to exp of it (infinity/0 on overflow/underflow).  These are
/// order-of-magnitude estimates, not certified bounds: the phase flow is
/// assumed equidistributing, which requires rationally independent gaps.
RecurrenceBounds recurrence_bounds(const RecurrenceInput& input);

/// Reduce an explicit coefficient table to a RecurrenceInput: d_F counts
/// unordered pairs nu < nu' with a nonzero coefficient, c_min / c_max are
/// the extreme magnitudes over those pairs, and delta_eps is the RMS of the
/// corresponding level gaps.  Diagonal entries do not contribute.  Throws
/// DomainError: size mismatch, non-finite table entries, no active pair.
RecurrenceInput derive_input(const mathcore::SymmetricMatrix& coefficients,
                             const std::vector<double>& energies,
                             double eps_rec, double hbar = 1.0);

} // namespace fermicavity::recurrence
