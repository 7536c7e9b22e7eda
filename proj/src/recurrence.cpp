// SPDX-License-Identifier: MIT
#include "fermicavity/recurrence.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "fermicavity/errors.hpp"
#include "fermicavity/mathcore.hpp"

namespace fermicavity::recurrence {

namespace {

constexpr double kPi = std::numbers::pi;

// One end of the window, at coefficient magnitude c.  The log form is
// always finite; the linear form is evaluated directly while representable
// and falls back to exponentiating the log (yielding inf past the double
// range) otherwise.
void bound_at(const RecurrenceInput& in, double c, double& t, double& ln_t) {
    const double pref = 2.0 * kPi * in.hbar / in.delta_eps;
    if (in.d_F == 1) {
        // A single phase on a circle returns after one gap period, exactly.
        t = pref;
        ln_t = std::log(pref);
        return;
    }
    const double d = static_cast<double>(in.d_F);
    const double base = 4.0 * kPi * c * c / in.eps_rec;
    const double half = 0.5 * (d - 1.0);
    ln_t = std::log(pref) - 0.5 * std::log(d) + half * std::log(base) +
           mathcore::lgamma_fn(0.5 * (d + 1.0));
    t = pref * std::pow(d, -0.5) * std::pow(base, half) *
        mathcore::gamma_fn(0.5 * (d + 1.0));
    if (!std::isfinite(t)) t = std::exp(ln_t);
}

} // namespace

void RecurrenceInput::validate() const {
    if (d_F == 0)
        throw DomainError(
            "RecurrenceInput: at least one active pair is required");
    if (!(std::isfinite(c_min) && c_min > 0.0))
        throw DomainError("RecurrenceInput: c_min must be positive and finite");
    if (!(std::isfinite(c_max) && c_max >= c_min))
        throw DomainError("RecurrenceInput: c_max must be finite and >= c_min");
    if (!(std::isfinite(delta_eps) && delta_eps > 0.0))
        throw DomainError(
            "RecurrenceInput: delta_eps must be positive and finite");
    if (!(std::isfinite(eps_rec) && eps_rec > 0.0))
        throw DomainError(
            "RecurrenceInput: eps_rec must be positive and finite");
    if (!(std::isfinite(hbar) && hbar > 0.0))
        throw DomainError("RecurrenceInput: hbar must be positive and finite");
}

RecurrenceBounds recurrence_bounds(const RecurrenceInput& input) {
    input.validate();
    RecurrenceBounds b;
    bound_at(input, input.c_min, b.t_minus, b.ln_t_minus);
    bound_at(input, input.c_max, b.t_plus, b.ln_t_plus);
    return b;
}

RecurrenceInput derive_input(const mathcore::SymmetricMatrix& coefficients,
                             const std::vector<double>& energies,
                             double eps_rec, double hbar) {
    const std::size_t n = coefficients.dim();
    if (n == 0 || energies.size() != n)
        throw DomainError(
            "derive_input: coefficient table and energy list sizes differ");
    for (double e : energies)
        if (!std::isfinite(e))
            throw DomainError("derive_input: energies must be finite");

    std::size_t pairs = 0;
    double c_min = std::numeric_limits<double>::infinity();
    double c_max = 0.0;
    double gap_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double c = coefficients(i, j);
            if (!std::isfinite(c))
                throw DomainError(
                    "derive_input: coefficient table must be finite");
            if (c == 0.0) continue;
            ++pairs;
            const double a = std::fabs(c);
            c_min = std::min(c_min, a);
            c_max = std::max(c_max, a);
            const double g = energies[j] - energies[i];
            gap_sq += g * g;
        }
    }
    if (pairs == 0)
        throw DomainError(
            "derive_input: the table has no active off-diagonal pair");

    RecurrenceInput out;
    out.d_F = pairs;
    out.c_min = c_min;
    out.c_max = c_max;
    out.delta_eps = std::sqrt(gap_sq / static_cast<double>(pairs));
    out.eps_rec = eps_rec;
    out.hbar = hbar;
    if (out.delta_eps == 0.0)
        throw DomainError(
            "derive_input: every active pair is energy-degenerate");
    out.validate();
    return out;
}

} // namespace fermicavity::recurrence
