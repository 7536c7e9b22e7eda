// SPDX-License-Identifier: MIT

#include "fermicavity/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "fermicavity/errors.hpp"
#include "fermicavity/mathcore.hpp"

namespace fermicavity::correlations {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// f(x) of the eigenfunction autocorrelation for the supported dimensions.
double mode_shape(double x, int dim) {
    if (dim == 2) return mathcore::bessel_j0(x);
    if (dim == 3) return x == 0.0 ? 1.0 : std::sin(x) / x;
    throw DomainError("autocorrelation: cavity dimension must be 2 or 3");
}

void require_separation(double separation) {
    if (!(separation >= 0.0) || !std::isfinite(separation))
        throw DomainError("correlation: separation must be finite and >= 0");
}

// Thermal one-particle kernel
//   M(s) = (1 / 2 pi) Integral_0^inf k J0(s k) n_FD(hbar^2 k^2 / 2m) dk,
// i.e. the mode-density integral (1/V) Integral dm J0(s/lambda_eps) n_FD in
// which the cavity volume has cancelled against rho = V m / (2 pi hbar^2).
// The occupation is below ~1e-19 beyond eps = max(mu, 0) + 45 T, so the
// integral is cut there; the scale hbar appears only through k.
double thermal_kernel(double separation, const thermo::ThermalState& ts,
                      const thermo::CavityModel& cavity) {
    const double hbar = cavity.hbar;
    const double m = cavity.mass;
    const double eps_cut = std::max(ts.mu, 0.0) + 45.0 * ts.T;
    const double k_cut = std::sqrt(2.0 * m * eps_cut) / hbar;
    const auto integrand = [&](double k) {
        const double eps = hbar * k * hbar * k / (2.0 * m);
        return k * mathcore::bessel_j0(separation * k) *
               thermo::fermi_dirac(eps, ts);
    };
    mathcore::QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-11;
    return mathcore::integrate(integrand, 0.0, k_cut, spec) / kTwoPi;
}

double explicit_sum(double separation, const OccupationPattern& pat,
                    const thermo::CavityModel& cavity) {
    const double root2m = std::sqrt(2.0 * cavity.mass);
    double acc = 0.0;
    for (std::size_t i = 0; i < pat.energies.size(); ++i) {
        const double x =
            separation * root2m * std::sqrt(pat.energies[i]) / cavity.hbar;
        acc += pat.weights[i] * mathcore::bessel_j0(x);
    }
    return acc / cavity.volume;
}

// One-particle entries of the Wick matrix A_{kl} = M(r_k, r'_l), row-major.
std::vector<double> pair_matrix(const std::vector<Point>& annihilate,
                                const std::vector<Point>& create,
                                const OccupationPattern& pat,
                                const thermo::CavityModel& cavity) {
    const std::size_t j = annihilate.size();
    std::vector<double> a(j * j);
    for (std::size_t k = 0; k < j; ++k)
        for (std::size_t l = 0; l < j; ++l)
            a[k * j + l] =
                relaxed_one_particle(annihilate[k], create[l], pat, cavity);
    return a;
}

// Determinant by Gaussian elimination with partial pivoting; destroys `a`.
double det_inplace(std::vector<double>& a, std::size_t n) {
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t cc = 0; cc < n; ++cc)
                std::swap(a[c * n + cc], a[piv * n + cc]);
            det = -det;
        }
        det *= a[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t cc = c; cc < n; ++cc)
                a[r * n + cc] -= f * a[c * n + cc];
        }
    }
    return det;
}

void require_point_sets(const std::vector<Point>& annihilate,
                        const std::vector<Point>& create,
                        std::size_t max_points, const char* who) {
    if (annihilate.size() != create.size())
        throw DomainError(std::string(who) +
                          ": need equally many annihilation and creation points");
    if (annihilate.empty() || annihilate.size() > max_points)
        throw DomainError(std::string(who) + ": supported point-pair counts are 1.." +
                          std::to_string(max_points));
}

} // namespace

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

OccupationPattern OccupationPattern::thermal(const thermo::ThermalState& ts) {
    OccupationPattern pat;
    pat.mode = Mode::Thermal;
    pat.state = ts;
    return pat;
}

OccupationPattern OccupationPattern::explicit_levels(
    std::vector<double> energies, std::vector<double> weights) {
    OccupationPattern pat;
    pat.mode = Mode::Explicit;
    pat.energies = std::move(energies);
    pat.weights = std::move(weights);
    return pat;
}

void OccupationPattern::validate() const {
    if (mode == Mode::Thermal) {
        state.validate();
        return;
    }
    if (energies.empty() || energies.size() != weights.size())
        throw DomainError(
            "occupation pattern: need one weight per mode energy");
    for (double e : energies)
        if (!std::isfinite(e) || e < 0.0)
            throw DomainError("occupation pattern: energies must be >= 0");
    for (double w : weights)
        if (!(w >= 0.0 && w <= 1.0))
            throw DomainError("occupation pattern: weights must lie in [0, 1]");
}

double autocorrelation(double eps, double separation, int dim,
                       const thermo::CavityModel& cavity) {
    cavity.validate();
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw DomainError("autocorrelation: mode energy must be positive");
    require_separation(separation);
    if (dim != 2 && dim != 3)
        throw DomainError("autocorrelation: cavity dimension must be 2 or 3");
    const double x = separation / thermo::energy_wavelength(eps, cavity);
    return mode_shape(x, dim) / cavity.volume;
}

double relaxed_one_particle(double separation, const OccupationPattern& pat,
                            const thermo::CavityModel& cavity) {
    cavity.validate();
    pat.validate();
    require_separation(separation);
    if (pat.mode == OccupationPattern::Mode::Thermal)
        return thermal_kernel(separation, pat.state, cavity);
    return explicit_sum(separation, pat, cavity);
}

double relaxed_one_particle(const Point& r, const Point& r2,
                            const OccupationPattern& pat,
                            const thermo::CavityModel& cavity) {
    return relaxed_one_particle(distance(r, r2), pat, cavity);
}

double relaxed_multi_particle(const std::vector<Point>& annihilate,
                              const std::vector<Point>& create,
                              const OccupationPattern& pat,
                              const thermo::CavityModel& cavity) {
    require_point_sets(annihilate, create, 8, "multi-point correlator");
    auto a = pair_matrix(annihilate, create, pat, cavity);
    return det_inplace(a, annihilate.size());
}

double relaxed_multi_particle_leibniz(const std::vector<Point>& annihilate,
                                      const std::vector<Point>& create,
                                      const OccupationPattern& pat,
                                      const thermo::CavityModel& cavity) {
    require_point_sets(annihilate, create, 6, "pairing-sum correlator");
    const std::size_t j = annihilate.size();
    const auto a = pair_matrix(annihilate, create, pat, cavity);
    std::vector<std::size_t> perm(j);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double sum = 0.0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < j; ++i)
            for (std::size_t k = i + 1; k < j; ++k)
                if (perm[i] > perm[k]) ++inversions;
        double term = (inversions % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t k = 0; k < j; ++k) term *= a[k * j + perm[k]];
        sum += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

bool within_boundary_margin(const std::vector<Point>& pts,
                            const thermo::ThermalState& ts,
                            const thermo::CavityModel& cavity, double margin) {
    cavity.validate();
    ts.validate();
    if (!(margin > 0.0))
        throw DomainError("boundary margin: margin must be positive");
    const double need = margin * thermo::thermal_wavelength(ts, cavity);
    const double L = cavity.linear_size;
    for (const Point& p : pts) {
        const double clearance =
            std::min(std::min(p.x, L - p.x), std::min(p.y, L - p.y));
        if (clearance < need) return false;
    }
    return true;
}

} // namespace fermicavity::correlations
