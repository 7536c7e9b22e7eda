// SPDX-License-Identifier: MIT
//
// Numerical kernel shared by every physics module: cylinder Bessel functions,
// gamma, a packed symmetric matrix with a Jacobi eigensolver, adaptive
// Gauss-Kronrod quadrature (finite and semi-infinite), a damped 2-d Newton
// solver, Nelder-Mead minimization, and a counter-based deterministic RNG.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace fermicavity::mathcore {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// Bessel function of the first kind J0(x).  Absolute error below ~1e-12 on
/// the working range |x| <= 1e4.  Non-finite input -> DomainError.
double bessel_j0(double x);

/// Bessel function of the first kind J1(x).  Same accuracy contract as J0.
double bessel_j1(double x);

/// Modified Bessel function I0(x).  Overflows for x >~ 709; use
/// bessel_i0_scaled for large arguments.
double bessel_i0(double x);

/// exp(-|x|) * I0(x); finite for all finite x, monotonically decaying tail
/// ~ 1/sqrt(2*pi*x).  Needed whenever I0 appears against a decaying
/// exponential (Gaussian-averaged cylinder waves).
double bessel_i0_scaled(double x);

/// Gamma function.  Poles at non-positive integers -> DomainError.
double gamma_fn(double x);

/// log Gamma for x > 0 (used where Gamma itself overflows).
double lgamma_fn(double x);

// ---------------------------------------------------------------------------
// Symmetric matrices and the Jacobi eigensolver
// ---------------------------------------------------------------------------

/// Dense real symmetric matrix stored as the packed lower triangle
/// (row-major: element (i,j), j <= i, lives at i*(i+1)/2 + j).
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t dim);

    std::size_t dim() const { return n_; }

    /// Symmetric element access: order of the indices does not matter.
    double operator()(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double value);

    double trace() const;
    double frobenius_norm() const;

    const std::vector<double>& packed() const { return a_; }
    std::vector<double>& packed() { return a_; }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Eigenvalues in ascending order; eigenvector k is the k-th column of
/// `vectors` (row-major n*n storage, so component i of vector k is
/// vectors[i*n + k]).
struct EigenResult {
    std::vector<double> values;
    std::vector<double> vectors;
    std::size_t dim = 0;

    double vector(std::size_t component, std::size_t k) const {
        return vectors[component * dim + k];
    }
};

/// Full eigendecomposition by cyclic Jacobi rotations with threshold sweeps.
/// Guarantees ||M v - lambda v||_2 <= 1e-10 * ||M||_F per pair; throws
/// NumericError if the off-diagonal norm fails to converge in 60 sweeps.
EigenResult sym_eigen(const SymmetricMatrix& m);

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
};

/// Sentinel upper limit for semi-infinite integration.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Adaptive Gauss-Kronrod 7/15 quadrature on [a, b]; pass b = kInfinity for
/// a semi-infinite range (handled by the rational map x = a + t/(1-t), whose
/// interior nodes never touch t = 1).  Worst-interval-first subdivision.
/// Throws NumericError if the tolerance cannot be met within
/// `max_subdivisions` intervals.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

namespace detail {
/// Gauss-Kronrod 7/15 tables on [-1,1], exposed for verification: kGkNodes
/// holds the non-negative Kronrod abscissae in descending order (index 7 is
/// the origin; odd indices are the embedded 7-point Gauss abscissae),
/// kKronrodWeights pairs with kGkNodes, and kGaussWeights pairs with the
/// Gauss abscissae kGkNodes[1,3,5,7].
extern const std::array<double, 8> kGkNodes;
extern const std::array<double, 8> kKronrodWeights;
extern const std::array<double, 4> kGaussWeights;
} // namespace detail

// ---------------------------------------------------------------------------
// Root finding / minimization
// ---------------------------------------------------------------------------

/// Damped Newton iteration for a 2-d system g(x) = 0 with a forward-difference
/// Jacobian.  Step halving (up to 40 halvings) enforces a decreasing residual
/// norm.  Converged when ||g||_inf <= tol; otherwise throws NumericError.
std::array<double, 2>
newton2d(const std::function<std::array<double, 2>(const std::array<double, 2>&)>& g,
         std::array<double, 2> x0, double tol, int max_iter = 200);

/// Nelder-Mead simplex minimization with a restart from the best vertex once
/// the simplex has collapsed (guards against premature convergence on curved
/// valleys).  Returns the best point found.
std::vector<double>
neldermead(const std::function<double(const std::vector<double>&)>& f,
           std::vector<double> x0, double tol = 1e-12, int max_iter = 40000);

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// xoshiro256++ generator, seeded through splitmix64 so that any 64-bit seed
/// (including 0) yields a well-mixed state.  Doubles are produced from the top
/// 53 bits: (x >> 11) * 2^-53, uniform on [0, 1).  Deterministic across
/// platforms for a fixed seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on [0,1).
    double uniform();

    /// Uniform integer in [0, n); rejection sampling, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Derived generator for an independent logical stream.
    Rng split(std::uint64_t stream) const;

private:
    std::array<std::uint64_t, 4> s_{};
};

} // namespace fermicavity::mathcore
