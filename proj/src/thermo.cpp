// SPDX-License-Identifier: MIT

#include "fermicavity/thermo.hpp"
#include "fermicavity/errors.hpp"
#include "fermicavity/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fermicavity::thermo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ln(1 + e^z) without overflow on either side.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

} // namespace

// ---------------------------------------------------------------------------
// CavityModel / ThermalState / SpectrumModel
// ---------------------------------------------------------------------------

double CavityModel::spectral_density() const {
    return volume * mass / (2.0 * kPi * hbar * hbar);
}

double CavityModel::shape_factor() const { return linear_size / std::sqrt(volume); }

void CavityModel::validate() const {
    if (!(hbar > 0.0) || !(mass > 0.0) || !(volume > 0.0) || !(linear_size > 0.0))
        throw DomainError("CavityModel: hbar, mass, volume, linear_size must be "
                          "positive");
    if (!(lattice_a >= 0.0))
        throw DomainError("CavityModel: lattice_a must be >= 0");
    if (!(lyapunov_prefactor > 0.0))
        throw DomainError("CavityModel: lyapunov_prefactor must be positive");
}

void ThermalState::validate() const {
    if (!(T > 0.0) || !std::isfinite(T))
        throw DomainError("ThermalState: temperature must be positive");
    if (!std::isfinite(mu))
        throw DomainError("ThermalState: chemical potential must be finite");
}

SpectrumModel SpectrumModel::continuous(double rho) {
    SpectrumModel s;
    s.kind = Kind::Continuous2D;
    s.rho = rho;
    return s;
}

SpectrumModel SpectrumModel::discrete(std::vector<double> levels) {
    SpectrumModel s;
    s.kind = Kind::DiscreteLevels;
    s.levels = std::move(levels);
    return s;
}

SpectrumModel SpectrumModel::harmonic(std::size_t count) {
    std::vector<double> lv(count);
    for (std::size_t i = 0; i < count; ++i) lv[i] = static_cast<double>(i + 1);
    return discrete(std::move(lv));
}

void SpectrumModel::validate() const {
    if (kind == Kind::Continuous2D) {
        if (!(rho > 0.0))
            throw DomainError("SpectrumModel: continuous spectral density must "
                              "be positive");
        return;
    }
    if (levels.empty())
        throw DomainError("SpectrumModel: discrete level list is empty");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (!(levels[i] > levels[i - 1]))
            throw DomainError("SpectrumModel: levels must be strictly ascending");
}

// ---------------------------------------------------------------------------
// Occupation and spectrum aggregates
// ---------------------------------------------------------------------------

double fermi_dirac(double eps, double T, double mu) {
    if (!(T > 0.0)) throw DomainError("fermi_dirac: temperature must be positive");
    const double z = (eps - mu) / T;
    // Evaluate through the decaying exponential only: both tails saturate to
    // the exact 0/1 limits once exp underflows.
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    const double e = std::exp(z);
    return 1.0 / (1.0 + e);
}

double fermi_dirac(double eps, const ThermalState& ts) {
    ts.validate();
    return fermi_dirac(eps, ts.T, ts.mu);
}

double number_of(const SpectrumModel& spec, double T, double mu) {
    spec.validate();
    if (spec.kind == SpectrumModel::Kind::Continuous2D) {
        // Integral of the Fermi factor against a flat density of states has
        // the closed form rho T ln(1 + e^{mu/T}).
        return spec.rho * T * softplus(mu / T);
    }
    double n = 0.0;
    for (double lv : spec.levels) n += fermi_dirac(lv, T, mu);
    return n;
}

double energy_of(const SpectrumModel& spec, double T, double mu) {
    spec.validate();
    if (spec.kind == SpectrumModel::Kind::Continuous2D) {
        mathcore::QuadratureSpec q;
        q.abs_tol = 1e-13;
        q.rel_tol = 1e-11;
        const auto f = [&](double eps) {
            return eps * fermi_dirac(eps, T, mu);
        };
        // Occupation is exponentially negligible beyond mu + 60 T; integrate
        // the occupied window finitely and the remainder through the mapped
        // semi-infinite rule.
        const double cut = std::max(mu, 0.0) + 60.0 * T;
        return spec.rho * (mathcore::integrate(f, 0.0, cut, q) +
                           mathcore::integrate(f, cut, mathcore::kInfinity, q));
    }
    double e = 0.0;
    for (double lv : spec.levels) e += lv * fermi_dirac(lv, T, mu);
    return e;
}

double ground_state_energy(const SpectrumModel& spec, double N) {
    spec.validate();
    if (!(N >= 0.0)) throw DomainError("ground_state_energy: N must be >= 0");
    if (spec.kind == SpectrumModel::Kind::Continuous2D) {
        // Fill the flat band up to eps_F = N/rho.
        return N * N / (2.0 * spec.rho);
    }
    const std::size_t n = static_cast<std::size_t>(N);
    if (static_cast<double>(n) != N)
        throw DomainError("ground_state_energy: discrete spectra need integer N");
    if (n > spec.levels.size())
        throw DomainError("ground_state_energy: more particles than levels");
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += spec.levels[i];
    return e;
}

// ---------------------------------------------------------------------------
// solve_thermal
// ---------------------------------------------------------------------------

namespace {

// Solve number_of(T, mu) = N for mu at fixed T by monotone bisection.
double solve_mu(const SpectrumModel& spec, double T, double N) {
    if (spec.kind == SpectrumModel::Kind::Continuous2D) {
        // Exact inverse of N = rho T ln(1+e^{mu/T}).
        const double y = N / (spec.rho * T);
        // mu/T = ln(e^y - 1); for large y this is y + ln(1-e^{-y}).
        if (y > 30.0) return T * (y + std::log1p(-std::exp(-y)));
        return T * std::log(std::expm1(y));
    }
    double lo = spec.levels.front() - 80.0 * T - 1.0;
    double hi = spec.levels.back() + 80.0 * T + 1.0;
    if (number_of(spec, T, hi) < N)
        throw DomainError("solve_thermal: particle number exceeds spectrum "
                          "capacity");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (number_of(spec, T, mid) < N) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

ThermalState pack_state(const SpectrumModel& spec, double T, double mu) {
    ThermalState ts;
    ts.T = T;
    ts.mu = mu;
    ts.N = number_of(spec, T, mu);
    ts.E = energy_of(spec, T, mu);
    return ts;
}

} // namespace

ThermalState solve_thermal(const SpectrumModel& spec, double E, double N) {
    spec.validate();
    if (!(N > 0.0)) throw DomainError("solve_thermal: N must be positive");
    if (!std::isfinite(E)) throw DomainError("solve_thermal: E must be finite");

    // Feasibility: strictly above the Pauli floor (equality means T = 0).
    double e0;
    if (spec.kind == SpectrumModel::Kind::DiscreteLevels) {
        const double n_round = std::round(N);
        e0 = ground_state_energy(spec, n_round);
    } else {
        e0 = ground_state_energy(spec, N);
    }
    if (!(E > e0)) {
        std::ostringstream os;
        os << "solve_thermal: E = " << E << " is at or below the Pauli minimum "
           << e0 << " for N = " << N;
        throw DomainError(os.str());
    }

    // Sommerfeld-style seed: E - E0 ~ (pi^2/6) g(eps_F) T^2 with g the density
    // of states at the Fermi scale (1/spacing for the discrete case).
    double g_f;
    double mu_seed;
    if (spec.kind == SpectrumModel::Kind::Continuous2D) {
        g_f = spec.rho;
        mu_seed = N / spec.rho;
    } else {
        const std::size_t n = std::min<std::size_t>(
            static_cast<std::size_t>(std::round(N)), spec.levels.size() - 1);
        const double spacing =
            (spec.levels.back() - spec.levels.front()) /
            static_cast<double>(spec.levels.size() - 1);
        g_f = 1.0 / spacing;
        mu_seed = spec.levels[n > 0 ? n - 1 : 0] + 0.5 * spacing;
    }
    double t_seed = std::sqrt(6.0 * (E - e0) / (kPi * kPi * g_f));
    // Classical crossover: never seed far below the equipartition scale.
    t_seed = std::max(t_seed, 1e-12);

    const double n_scale = std::max(N, 1.0);
    const double e_scale = std::max(std::fabs(E), 1.0);
    const auto residual = [&](const std::array<double, 2>& u) {
        const double T = std::exp(u[0]);
        const double mu = u[1];
        return std::array<double, 2>{
            (number_of(spec, T, mu) - N) / n_scale,
            (energy_of(spec, T, mu) - E) / e_scale};
    };

    double T = t_seed, mu = mu_seed;
    bool solved = false;
    try {
        const auto u = mathcore::newton2d(residual, {std::log(t_seed), mu_seed},
                                          1e-10, 80);
        T = std::exp(u[0]);
        mu = u[1];
        solved = true;
    } catch (const NumericError&) {
        solved = false;
    }

    if (!solved) {
        // Nested bisection fallback: mu(T) from the monotone number equation,
        // then E(T, mu(T)) is monotone increasing in T.
        double lo = t_seed, hi = t_seed;
        auto excess = [&](double t) {
            return energy_of(spec, t, solve_mu(spec, t, N)) - E;
        };
        int guard = 0;
        while (excess(lo) > 0.0) {
            lo *= 0.5;
            if (++guard > 200)
                throw NumericError("solve_thermal: failed to bracket from below");
        }
        guard = 0;
        while (excess(hi) < 0.0) {
            hi *= 2.0;
            if (++guard > 200)
                throw NumericError("solve_thermal: failed to bracket from above");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (excess(mid) < 0.0) lo = mid;
            else hi = mid;
        }
        T = 0.5 * (lo + hi);
        mu = solve_mu(spec, T, N);
    }

    auto ts = pack_state(spec, T, mu);
    if (std::fabs(ts.N - N) > 1e-8 * n_scale ||
        std::fabs(ts.E - E) > 1e-8 * e_scale)
        throw NumericError("solve_thermal: residual tolerance not met");

    // A discrete list must contain the full thermal tail, otherwise (T, mu)
    // are biased by the missing levels.
    if (spec.kind == SpectrumModel::Kind::DiscreteLevels) {
        if (fermi_dirac(spec.levels.back(), T, mu) > 1e-10)
            throw NumericError("solve_thermal: level list truncates a "
                               "measurably occupied tail");
    }
    return ts;
}

// ---------------------------------------------------------------------------
// Ehrenfest time and continuum entropy density
// ---------------------------------------------------------------------------

double ehrenfest_time(const CavityModel& cavity, double eps_avg) {
    cavity.validate();
    if (!(eps_avg > 0.0))
        throw DomainError("ehrenfest_time: energy must be positive");
    const double lambda_l = cavity.lyapunov_prefactor *
                            std::sqrt(eps_avg / cavity.mass) / cavity.linear_size;
    const double action = cavity.linear_size *
                          std::sqrt(2.0 * cavity.mass * eps_avg);
    if (!(action > cavity.hbar))
        throw DomainError("ehrenfest_time: classical action does not exceed "
                          "hbar (no semiclassical window)");
    return std::log(action / cavity.hbar) / lambda_l;
}

double entropy_density_continuum(const ThermalState& ts, const CavityModel& cavity) {
    ts.validate();
    cavity.validate();
    // Radial reduction of -Int d^2p/(2 pi hbar)^2 [n ln n + (1-n) ln(1-n)]:
    // (m / 2 pi hbar^2) Int d(eps) [...].
    const auto mix = [&](double eps) {
        const double n = fermi_dirac(eps, ts.T, ts.mu);
        double s = 0.0;
        if (n > 0.0) s -= n * std::log(n);
        if (n < 1.0) s -= (1.0 - n) * std::log1p(-n);
        return s;
    };
    mathcore::QuadratureSpec q;
    q.abs_tol = 1e-14;
    q.rel_tol = 1e-12;
    const double cut = std::max(ts.mu, 0.0) + 60.0 * ts.T;
    const double integral = mathcore::integrate(mix, 0.0, cut, q) +
                            mathcore::integrate(mix, cut, mathcore::kInfinity, q);
    return cavity.mass / (2.0 * kPi * cavity.hbar * cavity.hbar) * integral;
}

double thermal_wavelength(const ThermalState& ts, const CavityModel& cavity) {
    ts.validate();
    return cavity.hbar / std::sqrt(2.0 * cavity.mass * ts.T);
}

double energy_wavelength(double eps, const CavityModel& cavity) {
    if (!(eps > 0.0))
        throw DomainError("energy_wavelength: energy must be positive");
    return cavity.hbar / std::sqrt(2.0 * cavity.mass * eps);
}

} // namespace fermicavity::thermo
