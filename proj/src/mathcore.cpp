// SPDX-License-Identifier: MIT
//
// Numerical kernel implementation.  See include/fermicavity/mathcore.hpp for
// the contracts.

#include "fermicavity/mathcore.hpp"
#include "fermicavity/errors.hpp"

#include <math.h> // ::j0 / ::j1 (POSIX cylinder Bessel functions)

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace fermicavity::mathcore {

namespace {

void require_finite(double x, const char* who) {
    if (!std::isfinite(x)) {
        std::ostringstream os;
        os << who << ": non-finite argument";
        throw DomainError(os.str());
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

double bessel_j0(double x) {
    require_finite(x, "bessel_j0");
    // Even function; delegate to the platform libm kernel, which holds a
    // few-ULP error bound over the whole working range.
    return ::j0(std::fabs(x));
}

double bessel_j1(double x) {
    require_finite(x, "bessel_j1");
    const double v = ::j1(std::fabs(x));
    return x < 0.0 ? -v : v;
}

double bessel_i0_scaled(double x) {
    require_finite(x, "bessel_i0_scaled");
    const double ax = std::fabs(x);
    if (ax <= 15.0) {
        // Defining series; every term is positive so there is no cancellation.
        const double q = ax * ax / 4.0;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 60; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::exp(-ax) * sum;
    }
    // Asymptotic series for e^{-x} I0(x); truncated near its smallest term.
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 12; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * odd * odd / (8.0 * ax * k);
        if (next > term) break; // divergent tail reached
        term = next;
        sum += term;
    }
    return sum / std::sqrt(2.0 * 3.14159265358979323846 * ax);
}

double bessel_i0(double x) {
    require_finite(x, "bessel_i0");
    const double ax = std::fabs(x);
    // exp overflows to +inf beyond ~709; that is the honest answer for I0.
    return bessel_i0_scaled(ax) * std::exp(ax);
}

double gamma_fn(double x) {
    require_finite(x, "gamma_fn");
    if (x <= 0.0 && std::floor(x) == x)
        throw DomainError("gamma_fn: pole at non-positive integer");
    return std::tgamma(x);
}

double lgamma_fn(double x) {
    require_finite(x, "lgamma_fn");
    if (x <= 0.0) throw DomainError("lgamma_fn: requires x > 0");
    return std::lgamma(x);
}

// ---------------------------------------------------------------------------
// SymmetricMatrix
// ---------------------------------------------------------------------------

SymmetricMatrix::SymmetricMatrix(std::size_t dim)
    : n_(dim), a_(dim * (dim + 1) / 2, 0.0) {}

double SymmetricMatrix::operator()(std::size_t i, std::size_t j) const {
    if (j > i) std::swap(i, j);
    return a_[i * (i + 1) / 2 + j];
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
    if (j > i) std::swap(i, j);
    a_[i * (i + 1) / 2 + j] = value;
}

double SymmetricMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += a_[i * (i + 1) / 2 + i];
    return t;
}

double SymmetricMatrix::frobenius_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = a_[i * (i + 1) / 2 + j];
            s += (i == j ? 1.0 : 2.0) * v * v;
        }
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver
// ---------------------------------------------------------------------------

EigenResult sym_eigen(const SymmetricMatrix& m) {
    const std::size_t n = m.dim();
    EigenResult out;
    out.dim = n;
    if (n == 0) return out;

    // Work on a full dense copy; v accumulates the rotations.
    std::vector<double> a(n * n), v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = 1.0;
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
    }

    const double fro = std::max(m.frobenius_norm(),
                                std::numeric_limits<double>::min());
    const double target = 1e-14 * fro;

    auto offdiag = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += a[p * n + q] * a[p * n + q];
        return std::sqrt(2.0 * s);
    };

    const int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        const double off = offdiag();
        if (off <= target) break;
        // Threshold strategy: skip tiny rotations during the first sweeps.
        const double tresh = (sweep < 3) ? 0.2 * off / (double(n) * n) : 0.0;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                const double scale = std::fabs(a[p * n + p]) + std::fabs(a[q * n + q]);
                // Element already negligible at working precision: flush it.
                if (std::fabs(apq) < 1e-300 ||
                    scale + 100.0 * std::fabs(apq) == scale) {
                    a[p * n + q] = a[q * n + p] = 0.0;
                    continue;
                }
                if (std::fabs(apq) <= tresh) continue;

                // Stable rotation parameters (smaller root of t^2+2t*theta-1).
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e154) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double h = t * apq;

                a[p * n + p] -= h;
                a[q * n + q] += h;
                a[p * n + q] = a[q * n + p] = 0.0;

                auto rotate = [&](std::vector<double>& w, std::size_t i1,
                                  std::size_t j1, std::size_t i2, std::size_t j2) {
                    const double g = w[i1 * n + j1];
                    const double f = w[i2 * n + j2];
                    w[i1 * n + j1] = g - s * (f + g * tau);
                    w[i2 * n + j2] = f + s * (g - f * tau);
                };

                // Only the upper triangle is ever read, so only it is updated.
                for (std::size_t j = 0; j < p; ++j) rotate(a, j, p, j, q);
                for (std::size_t j = p + 1; j < q; ++j) rotate(a, p, j, j, q);
                for (std::size_t j = q + 1; j < n; ++j) rotate(a, p, j, q, j);
                for (std::size_t i = 0; i < n; ++i) rotate(v, i, p, i, q);
            }
        }
    }
    if (sweep == max_sweeps && offdiag() > target)
        throw NumericError("sym_eigen: Jacobi sweeps failed to converge");

    // Sort eigenpairs ascending.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return a[x * n + x] < a[y * n + y];
    });

    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a[order[k] * n + order[k]];
        for (std::size_t i = 0; i < n; ++i)
            out.vectors[i * n + k] = v[i * n + order[k]];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature: adaptive Gauss-Kronrod 7/15
// ---------------------------------------------------------------------------

namespace detail {
// Kronrod abscissae (non-negative half), descending; odd indices form the
// embedded 7-point Gauss rule.
const std::array<double, 8> kGkNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

const std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

const std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};
} // namespace detail

namespace {

struct PanelEstimate {
    double integral;
    double error;
};

// One Gauss-Kronrod 7/15 application on [lo, hi].
PanelEstimate gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * detail::kGkNodes[i];
        fv[i] = f(mid - dx);
        fv[14 - i] = f(mid + dx);
    }
    fv[7] = f(mid);

    double kron = detail::kKronrodWeights[7] * fv[7];
    double gauss = detail::kGaussWeights[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += detail::kKronrodWeights[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1)
            gauss += detail::kGaussWeights[i / 2] * (fv[i] + fv[14 - i]);
    }
    kron *= half;
    gauss *= half;

    for (double y : fv)
        if (!std::isfinite(y))
            throw NumericError("integrate: integrand returned a non-finite value");

    return {kron, std::fabs(kron - gauss)};
}

struct Panel {
    double lo, hi, integral, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

double integrate_mapped(const std::function<double(double)>& f, double lo,
                        double hi, const QuadratureSpec& spec) {
    std::priority_queue<Panel> panels;
    auto first = gk15(f, lo, hi);
    panels.push({lo, hi, first.integral, first.error});
    double total_i = first.integral;
    double total_e = first.error;

    int used = 1;
    while (total_e > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total_i))) {
        if (used >= spec.max_subdivisions)
            throw NumericError("integrate: tolerance not met within the "
                               "subdivision budget");
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi)
            throw NumericError("integrate: interval underflow before reaching "
                               "tolerance");
        const auto left = gk15(f, worst.lo, mid);
        const auto right = gk15(f, mid, worst.hi);
        total_i += left.integral + right.integral - worst.integral;
        total_e += left.error + right.error - worst.error;
        panels.push({worst.lo, mid, left.integral, left.error});
        panels.push({mid, worst.hi, right.integral, right.error});
        ++used;
    }
    return total_i;
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
    require_finite(a, "integrate (lower limit)");
    if (a == b) return 0.0;

    if (std::isinf(b)) {
        if (b < 0.0) throw DomainError("integrate: lower-infinite range not supported");
        // Rational map x = a + t/(1-t) carries [0,1) onto [a, inf); the
        // quadrature nodes are interior so t = 1 is never touched.
        auto g = [&f, a](double t) {
            const double u = 1.0 - t;
            const double x = a + t / u;
            return f(x) / (u * u);
        };
        return integrate_mapped(g, 0.0, 1.0, spec);
    }

    require_finite(b, "integrate (upper limit)");
    if (a > b) return -integrate(f, b, a, spec);
    return integrate_mapped(f, a, b, spec);
}

// ---------------------------------------------------------------------------
// newton2d
// ---------------------------------------------------------------------------

std::array<double, 2>
newton2d(const std::function<std::array<double, 2>(const std::array<double, 2>&)>& g,
         std::array<double, 2> x0, double tol, int max_iter) {
    auto norm_inf = [](const std::array<double, 2>& v) {
        return std::max(std::fabs(v[0]), std::fabs(v[1]));
    };

    std::array<double, 2> x = x0;
    std::array<double, 2> gx = g(x);
    for (int it = 0; it < max_iter; ++it) {
        if (!std::isfinite(gx[0]) || !std::isfinite(gx[1]))
            throw NumericError("newton2d: residual became non-finite");
        if (norm_inf(gx) <= tol) return x;

        // Forward-difference Jacobian.
        double jac[2][2];
        for (int j = 0; j < 2; ++j) {
            const double h = 1.5e-8 * std::max(1.0, std::fabs(x[j]));
            auto xp = x;
            xp[j] += h;
            const auto gp = g(xp);
            jac[0][j] = (gp[0] - gx[0]) / h;
            jac[1][j] = (gp[1] - gx[1]) / h;
        }
        const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if (!std::isfinite(det) || std::fabs(det) < 1e-300)
            throw NumericError("newton2d: singular jacobian");

        const std::array<double, 2> step = {
            (jac[0][1] * gx[1] - jac[1][1] * gx[0]) / det,
            (jac[1][0] * gx[0] - jac[0][0] * gx[1]) / det};

        // Damped update: halve until the residual norm decreases.
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40; ++k, lambda *= 0.5) {
            const std::array<double, 2> xn = {x[0] + lambda * step[0],
                                              x[1] + lambda * step[1]};
            const auto gn = g(xn);
            if (std::isfinite(gn[0]) && std::isfinite(gn[1]) &&
                norm_inf(gn) < norm_inf(gx)) {
                x = xn;
                gx = gn;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw NumericError("newton2d: line search failed to reduce the "
                               "residual");
    }
    throw NumericError("newton2d: no convergence within the iteration budget");
}

// ---------------------------------------------------------------------------
// Nelder-Mead
// ---------------------------------------------------------------------------

namespace {

std::vector<double>
neldermead_once(const std::function<double(const std::vector<double>&)>& f,
                const std::vector<double>& x0, double step_scale, double tol,
                int max_iter, double& best_f) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t j = 0; j < n; ++j)
        simplex[j + 1][j] += step_scale * std::max(1.0, std::fabs(x0[j]));

    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    for (int it = 0; it < max_iter; ++it) {
        // Order vertices by value.
        std::vector<std::size_t> ord(n + 1);
        for (std::size_t i = 0; i <= n; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });

        const double spread = fv[ord[n]] - fv[ord[0]];
        double diam = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            diam = std::max(diam, std::fabs(simplex[ord[n]][j] - simplex[ord[0]][j]));
        if (spread <= tol * (std::fabs(fv[ord[0]]) + tol) && diam <= 1e-10)
            break;

        // Centroid of all but the worst vertex.
        std::vector<double> cen(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) cen[j] += simplex[ord[i]][j] / n;

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = cen[j] + coef * (cen[j] - simplex[ord[n]][j]);
            return p;
        };

        const auto refl = blend(alpha);
        const double fr = f(refl);
        if (fr < fv[ord[0]]) {
            const auto exp_p = blend(alpha * gamma);
            const double fe = f(exp_p);
            simplex[ord[n]] = (fe < fr) ? exp_p : refl;
            fv[ord[n]] = std::min(fe, fr);
            continue;
        }
        if (fr < fv[ord[n - 1]]) {
            simplex[ord[n]] = refl;
            fv[ord[n]] = fr;
            continue;
        }
        const auto contr = blend(-rho);
        const double fc = f(contr);
        if (fc < fv[ord[n]]) {
            simplex[ord[n]] = contr;
            fv[ord[n]] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                simplex[ord[i]][j] = simplex[ord[0]][j] +
                    sigma * (simplex[ord[i]][j] - simplex[ord[0]][j]);
            fv[ord[i]] = f(simplex[ord[i]]);
        }
    }

    std::size_t ibest = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[ibest]) ibest = i;
    best_f = fv[ibest];
    return simplex[ibest];
}

} // namespace

std::vector<double>
neldermead(const std::function<double(const std::vector<double>&)>& f,
           std::vector<double> x0, double tol, int max_iter) {
    if (x0.empty()) throw DomainError("neldermead: empty starting point");
    double f1 = 0.0, f2 = 0.0;
    // First pass from the caller's start, then a restart with a smaller
    // simplex from the best point found (guards curved valleys).
    const auto p1 = neldermead_once(f, x0, 0.05, tol, max_iter, f1);
    const auto p2 = neldermead_once(f, p1, 0.005, tol, max_iter, f2);
    return (f2 <= f1) ? p2 : p1;
}

// ---------------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97f4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl64(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl64(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl64(s_[3], 45);
    return result;
}

double Rng::uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_below: empty range");
    const std::uint64_t cut = (-n) % n; // 2^64 mod n
    for (;;) {
        const std::uint64_t v = next_u64();
        if (v >= cut) return v % n;
    }
}

Rng Rng::split(std::uint64_t stream) const {
    // Mix the current state with the stream index into a fresh seed.
    const std::uint64_t seed =
        s_[0] ^ rotl64(s_[3], 17) ^ (stream * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL);
    return Rng(seed);
}

} // namespace fermicavity::mathcore
