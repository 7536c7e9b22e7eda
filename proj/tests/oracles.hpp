// SPDX-License-Identifier: MIT
//
// Independent reference implementations ("oracles") used only by the test
// suite.  Everything here is written directly from textbook definitions or
// published algorithm statements and never calls into the library under test,
// so agreement between the two is meaningful evidence.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Cylinder Bessel functions from their defining power series (long double).
// Reliable for |x| <= ~14 where the largest series term is ~3e4, so the
// long-double roundoff floor sits near 1e-15.
// ---------------------------------------------------------------------------

inline long double j0_series(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k <= 60; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        sum += term;
        if (std::fabs(term) < 1e-25L * std::fabs(sum) && k > 8) break;
    }
    return sum;
}

inline long double j1_series(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k <= 60; ++k) {
        term *= -q / (static_cast<long double>(k) * (k + 1));
        sum += term;
        if (std::fabs(term) < 1e-25L * std::fabs(sum) && k > 8) break;
    }
    return (x / 2.0L) * sum;
}

// Hankel large-argument expansions (accurate to ~1e-10 for x >= 30).
inline long double j0_asymptotic(long double x) {
    const long double z = 8.0L * x;
    const long double z2 = z * z;
    // nu = 0 coefficient products (mu - 1)(mu - 9)... with mu = 4 nu^2 = 0.
    const long double P = 1.0L - 9.0L / (2.0L * z2) + 11025.0L / (24.0L * z2 * z2)
                        - 108056025.0L / (720.0L * z2 * z2 * z2);
    const long double Q = -1.0L / z + 225.0L / (6.0L * z2 * z)
                        - 893025.0L / (120.0L * z2 * z2 * z)
                        + 18261468225.0L / (5040.0L * z2 * z2 * z2 * z);
    const long double chi = x - 0.25L * 3.14159265358979323846264338328L;
    return std::sqrt(2.0L / (3.14159265358979323846264338328L * x)) *
           (P * std::cos(chi) - Q * std::sin(chi));
}

inline long double j1_asymptotic(long double x) {
    const long double z = 8.0L * x;
    const long double z2 = z * z;
    // mu = 4 nu^2 = 4.
    const long double P = 1.0L + 15.0L / (2.0L * z2) - 14175.0L / (24.0L * z2 * z2);
    const long double Q = 3.0L / z - 315.0L / (6.0L * z2 * z)
                        + 1091475.0L / (120.0L * z2 * z2 * z);
    const long double chi = x - 0.75L * 3.14159265358979323846264338328L;
    return std::sqrt(2.0L / (3.14159265358979323846264338328L * x)) *
           (P * std::cos(chi) - Q * std::sin(chi));
}

// Scaled modified Bessel: e^{-x} I0(x) for large x from the asymptotic series.
inline long double i0_scaled_asymptotic(long double x) {
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k <= 12; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        term *= odd * odd / (8.0L * x * k);
        sum += term;
    }
    return sum / std::sqrt(2.0L * 3.14159265358979323846264338328L * x);
}

inline long double i0_series(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k <= 80; ++k) {
        term *= q / (static_cast<long double>(k) * k);
        sum += term;
        if (term < 1e-25L * sum && k > 8) break;
    }
    return sum;
}

// Stirling series for log Gamma, x >= 10 (error < 1e-15 there).
inline long double lgamma_stirling(long double x) {
    const long double ln2pi = 1.83787706640934548356065947281L;
    return (x - 0.5L) * std::log(x) - x + 0.5L * ln2pi
         + 1.0L / (12.0L * x) - 1.0L / (360.0L * x * x * x)
         + 1.0L / (1260.0L * x * x * x * x * x);
}

// ---------------------------------------------------------------------------
// Legendre P7: value and derivative by the three-term recurrence, and its
// positive roots by bisection+Newton.  Used to verify the 7-point Gauss
// component of the quadrature rule digit-by-digit.
// ---------------------------------------------------------------------------

inline void legendre_p7(long double x, long double& p, long double& dp) {
    long double p0 = 1.0L, p1 = x;
    for (int n = 2; n <= 7; ++n) {
        const long double pn = ((2.0L * n - 1.0L) * x * p1 - (n - 1.0L) * p0) / n;
        p0 = p1;
        p1 = pn;
    }
    p = p1;
    dp = 7.0L * (x * p1 - p0) / (x * x - 1.0L);
}

inline long double legendre_p7_root(long double lo, long double hi) {
    long double x = 0.5L * (lo + hi), p, dp;
    for (int it = 0; it < 200; ++it) {
        legendre_p7(x, p, dp);
        const long double step = p / dp;
        x -= step;
        if (std::fabs(step) < 1e-19L) break;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Reference pseudo-random generator: splitmix64 seeding a xoshiro256++ core,
// transcribed from the published algorithm statements.
// ---------------------------------------------------------------------------

struct RefRng {
    std::uint64_t s[4];

    explicit RefRng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s) {
            sm += 0x9E3779B97f4A7C15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            w = z ^ (z >> 31);
        }
    }

    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

// ---------------------------------------------------------------------------
// Composite Simpson on a uniform grid (long double).  Deliberately primitive:
// an even panel count n and a smooth integrand give ~n^-4 convergence, enough
// for 1e-9..1e-11 cross-checks of the adaptive quadrature.
// ---------------------------------------------------------------------------

inline long double simpson(const std::function<long double(long double)>& f,
                           long double a, long double b, int n) {
    const long double h = (b - a) / n;
    long double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        sum += f(a + h * i) * ((i % 2) ? 4.0L : 2.0L);
    return sum * h / 3.0L;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov one-sample test against U[0,1).
// ---------------------------------------------------------------------------

inline double ks_statistic(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = xs[i]; // uniform CDF
        d = std::max(d, std::fabs((i + 1) / n - cdf));
        d = std::max(d, std::fabs(cdf - i / n));
    }
    return d;
}

inline double ks_pvalue(double d, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double lam = (rn + 0.12 + 0.11 / rn) * d;
    double p = 0.0;
    for (int k = 1; k <= 120; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) *
                            std::exp(-2.0 * k * k * lam * lam);
        p += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Small physics helpers (independent of the library).
// ---------------------------------------------------------------------------

// Overflow-safe Fermi factor 1/(e^{(eps-mu)/T}+1).
inline double fd(double eps, double T, double mu) {
    const double z = (eps - mu) / T;
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

// Binary mixing entropy -l ln l - (1-l) ln(1-l), with the 0 ln 0 = 0 limit.
inline double mix_entropy(double l) {
    double s = 0.0;
    if (l > 0.0) s -= l * std::log(l);
    if (l < 1.0) s -= (1.0 - l) * std::log(1.0 - l);
    return s;
}

} // namespace oracle
