// SPDX-License-Identifier: MIT
//
// Uniform-measure Markov-chain sampling of integer partitions of E into N
// distinct positive parts (and an unrestricted-N variant at fixed E),
// coarse-grained occupancy statistics, Fermi-Dirac least-squares fitting of
// the resulting mean occupation curve, and the limit-shape check of the
// scaled counting function against the analytic curve.

#pragma once

#include <cstdint>
#include <vector>

#include "fermicavity/mathcore.hpp"

namespace fermicavity::partitions {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A partition of `energy` into strictly ascending positive integer parts.
struct Partition {
    std::vector<long long> levels; ///< strictly ascending, all >= 1
    long long energy = 0;          ///< must equal the sum of levels

    void validate() const; // throws DomainError on any broken invariant
};

/// Occupancies of contiguous level blocks [1..G], [G+1..2G], ...
struct CoarsePattern {
    long long group_size = 1;
    std::vector<long long> counts;
    std::vector<double> ratios;

    /// Group-center level of block m (0-based): G*(m + 1/2).
    double group_center(std::size_t m) const {
        return static_cast<double>(group_size) * (static_cast<double>(m) + 0.5);
    }
};

struct McmcConfig {
    std::uint64_t seed = 1;
    long long burn_in = 1'000'000; ///< proposals discarded up front
    long long thinning = 1'000;    ///< proposals between retained samples
    long long max_shift = 64;      ///< energy-transfer proposal range

    void validate() const;
};

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Uniform sampler over partitions of E into exactly N distinct parts.
/// Proposals transfer delta in [1, max_shift] between two distinct parts;
/// the proposal is symmetric, so accepting exactly the valid moves leaves the
/// uniform distribution stationary.  Construction runs the burn-in.
class PartitionSampler {
public:
    PartitionSampler(long long E, long long N, const McmcConfig& cfg);

    /// Advance `thinning` proposals and return the current partition.
    Partition next_sample();

    Partition current() const;

    long long proposals() const { return proposals_; }
    long long accepted() const { return accepted_; }

private:
    void step();

    long long energy_;
    std::vector<long long> parts_;  // unsorted working set
    std::vector<char> occupied_;    // occupied_[v] == 1 iff v is a part
    mathcore::Rng rng_;
    long long thinning_;
    long long max_shift_;
    long long proposals_ = 0;
    long long accepted_ = 0;
};

/// Uniform sampler over ALL strict partitions of E (particle number free).
/// Metropolis-Hastings with pair shifts plus split/merge moves whose exact
/// proposal densities enter the acceptance ratio, so the stationary measure
/// is uniform on the fixed-E set.
class FreePartitionSampler {
public:
    FreePartitionSampler(long long E, const McmcConfig& cfg);

    Partition next_sample();
    Partition current() const;

private:
    void step();

    long long energy_;
    std::vector<long long> parts_;
    std::vector<char> occupied_;
    mathcore::Rng rng_;
    long long thinning_;
    long long max_shift_;
};

/// One uniform sample (burn-in included); convenience over PartitionSampler.
Partition sample_partition(long long E, long long N, const McmcConfig& cfg);

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

/// Block occupancies N_m over contiguous level groups of size `group_size`.
CoarsePattern coarse_grain(const Partition& p, long long group_size);

struct FermiDiracFit {
    double T = 0.0;
    double mu = 0.0;
    double rms = 0.0; ///< root-mean-square residual of the fit
};

/// Least-squares Fermi-Dirac fit of mean block occupancies sampled at the
/// group centers eps_m = group_size*(m - 1/2) (1-based m).  Data with no
/// transition region (all ~0 or all ~1) is rejected as degenerate.
FermiDiracFit fit_fermi_dirac(const std::vector<double>& mean_ratios,
                              long long group_size);

/// phi(u) = number of parts >= u; a nonincreasing step function with
/// phi(0) = N.
double counting_function(const Partition& p, double u);

/// Mean and standard deviation of block occupancy ratios over an ensemble of
/// uniform samples at fixed (E, N).
struct EnsembleStats {
    long long group_size = 1;
    long long samples = 0;
    std::vector<double> eps;        ///< group centers
    std::vector<double> mean_ratios;
    std::vector<double> std_ratios;
};

EnsembleStats sample_ensemble(long long E, long long N, long long group_size,
                              long long samples, const McmcConfig& cfg);

// ---------------------------------------------------------------------------
// Limit shape
// ---------------------------------------------------------------------------

/// The analytic limit curve enters through -v(u) with
/// e^{-pi v/sqrt(12)} - e^{-pi u/sqrt(12)} = 1, i.e.
/// -v(u) = (sqrt(12)/pi) ln(1 + e^{-pi u/sqrt(12)}).
double limit_shape_curve(double u);

struct VershikResult {
    std::vector<double> u;          ///< scaled level grid
    std::vector<double> phi_scaled; ///< ensemble mean of phi(sqrt(E) u)/sqrt(E)
    std::vector<double> curve;      ///< -v(u)
    double max_deviation = 0.0;     ///< sup_u |phi_scaled + v|
};

/// Sample unrestricted strict partitions of E and compare the scaled mean
/// counting function against the limit curve.
VershikResult vershik_check(long long E, long long samples, const McmcConfig& cfg);

} // namespace fermicavity::partitions
