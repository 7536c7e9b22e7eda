// SPDX-License-Identifier: MIT
//
// Lattice subsystems of the relaxed cavity gas: one-particle correlation
// matrices over site masks, entanglement entropy from their spectra,
// Toeplitz/torus generating functions with controlled truncation, and the
// determinant/entropy asymptotics (strong Szego limit in 1-d, the 2-d
// volume law, the continuum limit of the entropy density) that tie matrix
// spectra to Brillouin-zone integrals of the symbol.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "fermicavity/correlations.hpp"
#include "fermicavity/mathcore.hpp"
#include "fermicavity/thermo.hpp"

namespace fermicavity::entanglement {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Finite set of lattice sites (spacing a) forming the subsystem A.
/// Site coordinates are integer lattice positions; the physical position of
/// lattice site (0,0) is `origin` when set, otherwise the mask is placed
/// with its centroid at the cavity center when a matrix is built from it.
struct SubsystemMask {
    enum class Shape { Chain, Square, Disk, Polygon };

    Shape shape = Shape::Chain;
    double lattice_a = 0.0;
    std::vector<std::array<int, 2>> sites;
    std::optional<correlations::Point> origin;

    /// Sites (0,0) ... (length-1, 0).
    static SubsystemMask chain(std::size_t length, double lattice_a);
    /// Sites (i, j), 0 <= i, j < side.
    static SubsystemMask square(std::size_t side, double lattice_a);
    /// Sites with i^2 + j^2 <= radius^2; radius in lattice units.
    static SubsystemMask disk(double radius, double lattice_a);
    /// Lattice sites strictly inside a simple polygon (vertices in lattice
    /// units, even-odd rule).  Fewer than 3 vertices -> DomainError.
    static SubsystemMask polygon(const std::vector<std::array<double, 2>>& vertices,
                                 double lattice_a);

    std::size_t size() const { return sites.size(); }

    void validate() const; // distinct sites, at least one, a > 0

    /// Physical positions of all sites once the origin is fixed; `center`
    /// is used for centroid placement when no origin is set.
    std::vector<correlations::Point> positions(const correlations::Point& center) const;
};

/// One-particle correlation matrix <a_i^dag a_j> restricted to the sites of
/// a mask, carrying its eigendecomposition so that entropy, determinants,
/// moments and the effective Hamiltonian all share a single factorization.
/// Invariant: eigenvalues lie in [-1e-9, 1 + 1e-9] (construction fails
/// otherwise); occupations() clamps them to [0, 1].
class CorrelationMatrix {
public:
    /// Wrap an externally assembled symmetric matrix; validates the
    /// eigenvalue window and throws NumericError when it is breached.
    static CorrelationMatrix from_matrix(const mathcore::SymmetricMatrix& m);

    std::size_t size() const { return m_.dim(); }
    const mathcore::SymmetricMatrix& matrix() const { return m_; }

    /// Raw eigenvalues, ascending, unclamped.
    const std::vector<double>& spectrum() const { return eig_.values; }
    /// Eigenvalues clamped to [0, 1].
    std::vector<double> occupations() const;
    /// Full eigendecomposition (vectors in mathcore::EigenResult layout).
    const mathcore::EigenResult& eigen() const { return eig_; }
    /// Largest distance the raw spectrum pokes outside [0, 1]; 0 if inside.
    double excursion() const { return excursion_; }

private:
    CorrelationMatrix() = default;

    mathcore::SymmetricMatrix m_;
    mathcore::EigenResult eig_;
    double excursion_ = 0.0;
};

/// Fourier symbol C(theta) of the translation-invariant lattice correlation
/// kernel: a truncated cosine series over the coefficient lattice, with the
/// truncation radius n_max chosen so the dropped tail is below 1e-12 of the
/// retained coefficient mass (the Gaussian large-|n| decay of the
/// coefficients provides the floor for the radius; the measured ring sums
/// govern the stop, which also covers the slower Fermi-surface tail).
class GeneratingFunction {
public:
    int dim() const { return dim_; }
    int n_max() const { return n_max_; }

    /// Coefficient c_n (symmetric in sign and axis order); 0 beyond n_max.
    /// For dim 1 the second index must be 0.
    double coefficient(int n1, int n2 = 0) const;

    /// Evaluate the 1-d symbol; dim 2 -> DomainError.
    double operator()(double theta) const;
    /// Evaluate the 2-d symbol; dim 1 -> DomainError.
    double operator()(double theta1, double theta2) const;

private:
    int dim_ = 0;
    int n_max_ = 0;
    std::vector<double> coeff_; // dim 1: c_0..c_n_max; dim 2: quarter table

    friend GeneratingFunction generating_function_1d(const thermo::ThermalState&,
                                                     const thermo::CavityModel&);
    friend GeneratingFunction generating_function_2d(const thermo::ThermalState&,
                                                     const thermo::CavityModel&);
};

// ---------------------------------------------------------------------------
// Matrix construction and spectral functionals
// ---------------------------------------------------------------------------

/// Assemble the correlation matrix of the relaxed thermal state over the
/// mask sites: (M)_ij = a^2 M(a |i-j|) with the radial thermal kernel.
/// Preconditions: mask valid; the lattice resolves every occupied mode
/// (a < shortest occupied de Broglie wavelength 2 pi hbar / p_max, with
/// p_max at energy max(mu,0) + 10T) -> DomainError otherwise; all sites at
/// least 5 thermal wavelengths clear of the cavity walls -> DomainError.
CorrelationMatrix build_corr_matrix(const SubsystemMask& mask,
                                    const thermo::ThermalState& ts,
                                    const thermo::CavityModel& cavity);

/// Entanglement entropy S = sum_i e(lambda_i) with
/// e(x) = -x ln x - (1-x) ln(1-x) over the clamped spectrum.
/// A clamp excursion beyond 1e-6 -> NumericError.  0 <= S <= N_A ln 2.
double entanglement_entropy(const CorrelationMatrix& m);

/// Same spectral functional -Tr[M ln M + (1-M) ln(1-M)] for any symmetric
/// one-particle correlation matrix (eigenvalues expected in [0,1]; the same
/// clamp window and excursion alarm apply).
double gaussian_entropy(const mathcore::SymmetricMatrix& m);

/// Entanglement (modular) Hamiltonian H = ln(M^{-1} - 1), through the
/// shared eigenbasis.  Eigenvalues are clipped to [1e-12, 1 - 1e-12] before
/// the logarithm; the number of clipped eigenvalues is reported through
/// `clipped` when given.  Round trip M = 1/(e^H + 1) holds to 1e-10.
mathcore::SymmetricMatrix effective_hamiltonian(const CorrelationMatrix& m,
                                                std::size_t* clipped = nullptr);

// ---------------------------------------------------------------------------
// Generating functions and asymptotic checks
// ---------------------------------------------------------------------------

/// 1-d chain symbol C(theta) = sum_n c_n e^{i n theta} with c_n the radial
/// lattice kernel at separation n a, a = cavity.lattice_a.  Even in theta;
/// values in [0, 1] up to truncation error.  Truncation failure (ring decay
/// not reached within the hard cap) -> NumericError.
GeneratingFunction generating_function_1d(const thermo::ThermalState& ts,
                                          const thermo::CavityModel& cavity);

/// 2-d torus symbol C(theta_1, theta_2); requires T > 0 (the coefficient
/// sum loses its Gaussian tail at T = 0) -> DomainError.
GeneratingFunction generating_function_2d(const thermo::ThermalState& ts,
                                          const thermo::CavityModel& cavity);

/// Strong-Szego-limit check for the shifted determinant
/// D_N(lambda) = prod_i (lambda + 1 - 2 lambda_i) on 1-d chains: returns
/// |ln D_N / N - (2 pi)^{-1} Integral ln|lambda + 1 - 2 C(theta)| d theta|
/// for each requested chain length.  lambda inside [-1.05, 1.05] would let
/// the shifted symbol vanish (singular-symbol regime, outside the scope of
/// this asymptotic check) -> DomainError.
std::vector<double> szego_check_1d(const thermo::ThermalState& ts,
                                   const thermo::CavityModel& cavity,
                                   double lambda,
                                   const std::vector<std::size_t>& sizes);

/// Volume-law check on a side x side square: eigenvalue entropy per site
/// against the zone integral of the symbol entropy.
struct DoktorskyResult {
    double entropy_per_site = 0.0; ///< S(side) / side^2 from the spectrum
    double formula_value = 0.0;    ///< -(2pi)^{-2} IntInt [C lnC + (1-C)ln(1-C)]
    double gap = 0.0;              ///< (entropy_per_site - formula_value)/formula_value
};
DoktorskyResult doktorsky_check_2d(const thermo::ThermalState& ts,
                                   const thermo::CavityModel& cavity,
                                   std::size_t side);

/// Relaxed entropy density at lattice spacing cavity.lattice_a (> 0
/// required) and its continuum limit: per_site / a^2 -> continuum as a -> 0.
struct EntropyDensity {
    double per_site = 0.0;  ///< S_a, entropy per lattice site
    double continuum = 0.0; ///< S_0, entropy per area of the unconfined gas
};
EntropyDensity ee_density(const thermo::ThermalState& ts,
                          const thermo::CavityModel& cavity);

/// Equal-distribution check between the matrix spectrum and the symbol:
/// for each power s, N_A^{-1} sum_i lambda_i^s against the zone integral of
/// C^s, with the relative gap.  Expects the 2-d symbol paired with a square
/// mask's matrix.
struct MomentGap {
    int s = 0;
    double eigen_moment = 0.0;
    double symbol_moment = 0.0;
    double gap = 0.0; ///< |eigen - symbol| / |symbol|
};
std::vector<MomentGap> spectral_distribution_check(const CorrelationMatrix& m,
                                                   const GeneratingFunction& c,
                                                   const std::vector<int>& moments);

} // namespace fermicavity::entanglement
