// SPDX-License-Identifier: MIT
#include "fermicavity/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "fermicavity/errors.hpp"
#include "fermicavity/thermo.hpp"

namespace fermicavity::kinetics {

namespace {

// Slack of the occupation window [0, 1] used both by state validation and
// by the evolve() acceptance check, so accepted states always validate.
constexpr double kWindowSlack = 1e-9;

// Step halvings evolve() may spend in one call before giving up; 2^24
// spans seven decades of step size below the nominal one.
constexpr int kMaxHalvings = 24;

// Collision term on bare occupations; callers have validated the inputs.
// Each ordered pair (nu, nu') with transfer d trades the flux
// W(d) [n_nu n_nu' (1-n_{nu+d})(1-n_{nu'-d}) - reverse]; enumerating both
// orientations doubles every physical channel, a constant absorbed into
// the kernel normalization.
std::vector<double> raw_rhs(const std::vector<double>& n,
                            const std::vector<double>& rates) {
    const std::size_t m = n.size();
    std::vector<double> out(m, 0.0);
    for (std::size_t d = 1; d <= rates.size(); ++d) {
        if (d >= m) break;
        const double w = rates[d - 1];
        for (std::size_t nu = 0; nu + d < m; ++nu) {
            for (std::size_t nup = d; nup < m; ++nup) {
                const double loss = n[nu] * n[nup] * (1.0 - n[nu + d]) *
                                    (1.0 - n[nup - d]);
                const double gain = n[nu + d] * n[nup - d] * (1.0 - n[nu]) *
                                    (1.0 - n[nup]);
                const double r = w * (loss - gain);
                out[nu] -= r;
                out[nup] -= r;
                out[nu + d] += r;
                out[nup - d] += r;
            }
        }
    }
    return out;
}

bool in_window(const std::vector<double>& y) {
    for (double v : y)
        if (!(std::isfinite(v) && v >= -kWindowSlack &&
              v <= 1.0 + kWindowSlack))
            return false;
    return true;
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

} // namespace

// ---------------------------------------------------------------------------
// KineticState
// ---------------------------------------------------------------------------

KineticState KineticState::uniform(double eps0, double spacing,
                                   std::vector<double> occupations) {
    KineticState s;
    s.occupations = std::move(occupations);
    s.energies.resize(s.occupations.size());
    for (std::size_t k = 0; k < s.energies.size(); ++k)
        s.energies[k] = eps0 + spacing * static_cast<double>(k);
    return s;
}

double KineticState::spacing() const {
    if (energies.size() < 2)
        throw DomainError("KineticState: need at least two levels");
    return (energies.back() - energies.front()) /
           static_cast<double>(energies.size() - 1);
}

double KineticState::particle_number() const {
    return std::accumulate(occupations.begin(), occupations.end(), 0.0);
}

double KineticState::energy() const {
    double e = 0.0;
    for (std::size_t k = 0; k < occupations.size(); ++k)
        e += energies[k] * occupations[k];
    return e;
}

void KineticState::validate() const {
    if (energies.size() < 2)
        throw DomainError("KineticState: need at least two levels");
    if (occupations.size() != energies.size())
        throw DomainError(
            "KineticState: energies and occupations differ in length");
    if (!std::isfinite(t))
        throw DomainError("KineticState: time must be finite");
    for (double e : energies)
        if (!std::isfinite(e))
            throw DomainError("KineticState: energies must be finite");

    const double h = spacing();
    if (!(h > 0.0))
        throw DomainError("KineticState: levels must strictly ascend");
    const double scale = std::max(
        {h, std::fabs(energies.front()), std::fabs(energies.back())});
    for (std::size_t k = 0; k < energies.size(); ++k) {
        const double ideal = energies.front() + h * static_cast<double>(k);
        if (std::fabs(energies[k] - ideal) > 1e-9 * scale)
            throw DomainError("KineticState: levels must be uniformly spaced");
    }

    for (double v : occupations)
        if (!(v >= -kWindowSlack && v <= 1.0 + kWindowSlack))
            throw DomainError(
                "KineticState: occupations must lie in [0, 1]");
}

// ---------------------------------------------------------------------------
// CollisionKernel
// ---------------------------------------------------------------------------

CollisionKernel CollisionKernel::flat(std::size_t max_transfer, double rate) {
    CollisionKernel k;
    k.rates.assign(max_transfer, rate);
    return k;
}

void CollisionKernel::validate() const {
    if (rates.empty())
        throw DomainError(
            "CollisionKernel: at least one transfer channel required");
    for (double w : rates)
        if (!(std::isfinite(w) && w >= 0.0))
            throw DomainError(
                "CollisionKernel: rates must be finite and non-negative");
}

// ---------------------------------------------------------------------------
// Collision term and time evolution
// ---------------------------------------------------------------------------

std::vector<double> collision_rhs(const KineticState& state,
                                  const CollisionKernel& kernel) {
    state.validate();
    kernel.validate();
    return raw_rhs(state.occupations, kernel.rates);
}

std::vector<KineticState> evolve(const KineticState& initial,
                                 const CollisionKernel& kernel, double dt,
                                 std::size_t steps) {
    initial.validate();
    kernel.validate();
    if (!(std::isfinite(dt) && dt > 0.0))
        throw DomainError("evolve: step must be positive and finite");

    const std::vector<double>& rates = kernel.rates;
    if (dt * sup_abs(raw_rhs(initial.occupations, rates)) >= 0.1)
        throw DomainError(
            "evolve: the requested step cannot resolve the initial collision "
            "rates (dt * sup|dn/dt| >= 0.1)");

    std::vector<KineticState> out;
    out.reserve(steps + 1);
    out.push_back(initial);

    const std::size_t m = initial.levels();
    std::vector<double> n = initial.occupations;
    std::vector<double> stage(m), y(m);
    double t = initial.t;
    double h = dt;
    int halvings = 0;

    for (std::size_t s = 0; s < steps; ++s) {
        for (;;) {
            const std::vector<double> k1 = raw_rhs(n, rates);
            for (std::size_t i = 0; i < m; ++i)
                stage[i] = n[i] + 0.5 * h * k1[i];
            const std::vector<double> k2 = raw_rhs(stage, rates);
            for (std::size_t i = 0; i < m; ++i)
                stage[i] = n[i] + 0.5 * h * k2[i];
            const std::vector<double> k3 = raw_rhs(stage, rates);
            for (std::size_t i = 0; i < m; ++i)
                stage[i] = n[i] + h * k3[i];
            const std::vector<double> k4 = raw_rhs(stage, rates);
            for (std::size_t i = 0; i < m; ++i)
                y[i] = n[i] +
                       h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (in_window(y)) break;
            if (++halvings > kMaxHalvings)
                throw NumericError(
                    "evolve: occupations still leave [0, 1] after 24 step "
                    "halvings; the step cannot be stabilized");
            h *= 0.5;
        }
        n = y;
        t += h;
        KineticState st;
        st.energies = initial.energies;
        st.occupations = n;
        st.t = t;
        out.push_back(std::move(st));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Thermal match of a closed ladder
// ---------------------------------------------------------------------------

thermo::ThermalState equilibrium_state(const KineticState& state) {
    state.validate();
    const std::vector<double>& eps = state.energies;
    const auto m = static_cast<double>(eps.size());
    const double number = state.particle_number();
    const double energy = state.energy();

    if (!(number > 0.0 && number < m))
        throw DomainError(
            "equilibrium_state: particle number must lie strictly between 0 "
            "and the level count");

    // Pauli floor at this filling: lowest levels full, remainder on the
    // next one up.
    const auto whole = static_cast<std::size_t>(std::floor(number));
    double e_floor = 0.0;
    for (std::size_t k = 0; k < whole; ++k) e_floor += eps[k];
    e_floor += (number - std::floor(number)) * eps[whole];

    const double mean = std::accumulate(eps.begin(), eps.end(), 0.0) / m;
    const double e_ceiling = number * mean;

    if (!(energy > e_floor))
        throw DomainError(
            "equilibrium_state: energy at or below the Pauli floor has no "
            "positive-temperature match");
    if (!(energy < e_ceiling))
        throw DomainError(
            "equilibrium_state: energy at or above N times the mean level "
            "is only reached in the infinite-temperature limit");

    const double span = eps.back() - eps.front();

    // Chemical potential reproducing the particle number at fixed T; the
    // count is strictly increasing in mu.
    const auto mu_for = [&](double T) {
        const auto count = [&](double mu) {
            double s = 0.0;
            for (double e : eps) s += thermo::fermi_dirac(e, T, mu);
            return s;
        };
        double lo = eps.front() - 1.0;
        double hi = eps.back() + 1.0;
        double w = std::max(span, 1.0);
        while (count(lo) > number) {
            lo -= w;
            w *= 2.0;
        }
        w = std::max(span, 1.0);
        while (count(hi) < number) {
            hi += w;
            w *= 2.0;
        }
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            (count(mid) < number ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    // Energy along the constant-N line; strictly increasing in T, from the
    // Pauli floor (T -> 0) to N times the mean level (T -> infinity).
    const auto energy_at = [&](double T) {
        const double mu = mu_for(T);
        double s = 0.0;
        for (double e : eps) s += e * thermo::fermi_dirac(e, T, mu);
        return s;
    };

    double t_lo = std::max(span / m, 1e-12);
    double t_hi = t_lo;
    int guard = 0;
    while (energy_at(t_lo) > energy) {
        t_lo *= 0.5;
        if (++guard > 200)
            throw NumericError(
                "equilibrium_state: temperature bracket failed to close");
    }
    guard = 0;
    while (energy_at(t_hi) < energy) {
        t_hi *= 2.0;
        if (++guard > 200)
            throw NumericError(
                "equilibrium_state: temperature bracket failed to open");
    }
    for (int i = 0; i < 100; ++i) {
        const double mid = std::sqrt(t_lo * t_hi);
        (energy_at(mid) < energy ? t_lo : t_hi) = mid;
    }

    thermo::ThermalState ts;
    ts.T = std::sqrt(t_lo * t_hi);
    ts.mu = mu_for(ts.T);
    ts.E = energy;
    ts.N = number;
    return ts;
}

} // namespace fermicavity::kinetics
