// SPDX-License-Identifier: MIT

#include "fermicavity/partitions.hpp"
#include "fermicavity/errors.hpp"
#include "fermicavity/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fermicavity::partitions {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

void Partition::validate() const {
    if (levels.empty()) throw DomainError("Partition: no parts");
    long long sum = 0;
    long long prev = 0;
    for (long long v : levels) {
        if (v < 1) throw DomainError("Partition: parts must be >= 1");
        if (v <= prev)
            throw DomainError("Partition: parts must be strictly ascending");
        prev = v;
        sum += v;
    }
    if (sum != energy) {
        std::ostringstream os;
        os << "Partition: parts sum to " << sum << ", not " << energy;
        throw DomainError(os.str());
    }
}

void McmcConfig::validate() const {
    if (burn_in < 1 || thinning < 1)
        throw DomainError("McmcConfig: burn_in and thinning must be >= 1");
    if (max_shift < 1) throw DomainError("McmcConfig: max_shift must be >= 1");
}

// ---------------------------------------------------------------------------
// Fixed-N sampler
// ---------------------------------------------------------------------------

PartitionSampler::PartitionSampler(long long E, long long N,
                                   const McmcConfig& cfg)
    : energy_(E), rng_(cfg.seed), thinning_(cfg.thinning),
      max_shift_(cfg.max_shift) {
    cfg.validate();
    if (N < 1) throw DomainError("PartitionSampler: N must be >= 1");
    const long long floor_e = N * (N + 1) / 2;
    if (E < floor_e) {
        std::ostringstream os;
        os << "PartitionSampler: E = " << E << " below the distinct-parts "
           << "minimum " << floor_e << " for N = " << N;
        throw DomainError(os.str());
    }

    // Start from the staircase with all excess on the top part.
    parts_.resize(N);
    for (long long i = 0; i < N - 1; ++i) parts_[i] = i + 1;
    parts_[N - 1] = E - (N - 1) * N / 2;

    occupied_.assign(static_cast<std::size_t>(E + max_shift_ + 2), 0);
    for (long long v : parts_) occupied_[static_cast<std::size_t>(v)] = 1;

    for (long long s = 0; s < cfg.burn_in; ++s) step();
}

void PartitionSampler::step() {
    ++proposals_;
    const std::size_t n = parts_.size();
    if (n < 2) return; // a single part has no energy-conserving move

    // Ordered distinct pair (receiver i, donor j), uniform.
    const std::size_t i = rng_.uniform_below(n);
    std::size_t j = rng_.uniform_below(n - 1);
    if (j >= i) ++j;
    const long long delta =
        1 + static_cast<long long>(rng_.uniform_below(
                static_cast<std::uint64_t>(max_shift_)));

    const long long a = parts_[i] + delta;
    const long long b = parts_[j] - delta;

    // Vacate the two moving parts, then test the target configuration.
    occupied_[static_cast<std::size_t>(parts_[i])] = 0;
    occupied_[static_cast<std::size_t>(parts_[j])] = 0;
    const bool ok = b >= 1 && a != b &&
                    !occupied_[static_cast<std::size_t>(a)] &&
                    !occupied_[static_cast<std::size_t>(b)];
    if (ok) {
        parts_[i] = a;
        parts_[j] = b;
        ++accepted_;
    }
    occupied_[static_cast<std::size_t>(parts_[i])] = 1;
    occupied_[static_cast<std::size_t>(parts_[j])] = 1;
}

Partition PartitionSampler::current() const {
    Partition p;
    p.levels = parts_;
    std::sort(p.levels.begin(), p.levels.end());
    p.energy = energy_;
    p.validate();
    return p;
}

Partition PartitionSampler::next_sample() {
    for (long long s = 0; s < thinning_; ++s) step();
    return current();
}

Partition sample_partition(long long E, long long N, const McmcConfig& cfg) {
    PartitionSampler chain(E, N, cfg);
    return chain.next_sample();
}

// ---------------------------------------------------------------------------
// Unrestricted-N sampler
// ---------------------------------------------------------------------------

FreePartitionSampler::FreePartitionSampler(long long E, const McmcConfig& cfg)
    : energy_(E), rng_(cfg.seed), thinning_(cfg.thinning),
      max_shift_(cfg.max_shift) {
    cfg.validate();
    if (E < 1) throw DomainError("FreePartitionSampler: E must be >= 1");
    parts_ = {E};
    occupied_.assign(static_cast<std::size_t>(E + max_shift_ + 2), 0);
    occupied_[static_cast<std::size_t>(E)] = 1;
    for (long long s = 0; s < cfg.burn_in; ++s) step();
}

void FreePartitionSampler::step() {
    const std::size_t n = parts_.size();
    const std::uint64_t branch = rng_.uniform_below(4);

    if (branch < 2) {
        // Energy-transfer shift between two parts (symmetric proposal).
        if (n < 2) return;
        const std::size_t i = rng_.uniform_below(n);
        std::size_t j = rng_.uniform_below(n - 1);
        if (j >= i) ++j;
        const long long delta =
            1 + static_cast<long long>(rng_.uniform_below(
                    static_cast<std::uint64_t>(max_shift_)));
        const long long a = parts_[i] + delta;
        const long long b = parts_[j] - delta;
        occupied_[static_cast<std::size_t>(parts_[i])] = 0;
        occupied_[static_cast<std::size_t>(parts_[j])] = 0;
        const bool ok = b >= 1 && a != b &&
                        !occupied_[static_cast<std::size_t>(a)] &&
                        !occupied_[static_cast<std::size_t>(b)];
        if (ok) {
            parts_[i] = a;
            parts_[j] = b;
        }
        occupied_[static_cast<std::size_t>(parts_[i])] = 1;
        occupied_[static_cast<std::size_t>(parts_[j])] = 1;
        return;
    }

    if (branch == 2) {
        // Split part k into the unordered pair {a, v-a}, a < v-a.  The exact
        // forward/reverse proposal densities enter the acceptance ratio so
        // the uniform measure stays stationary.
        const std::size_t k = rng_.uniform_below(n);
        const long long v = parts_[k];
        const long long n_split = (v - 1) / 2;
        if (n_split == 0) return;
        const long long a =
            1 + static_cast<long long>(rng_.uniform_below(
                    static_cast<std::uint64_t>(n_split)));
        const long long b = v - a;
        occupied_[static_cast<std::size_t>(v)] = 0;
        const bool free_slots = !occupied_[static_cast<std::size_t>(a)] &&
                                !occupied_[static_cast<std::size_t>(b)];
        // q_fwd = 1/4 * 1/n * 1/n_split ; q_rev = 1/4 * 1/C(n+1,2).
        const double ratio = free_slots
            ? 2.0 * static_cast<double>(n_split) / (static_cast<double>(n) + 1.0)
            : 0.0;
        if (free_slots && rng_.uniform() < ratio) {
            parts_[k] = a;
            parts_.push_back(b);
            occupied_[static_cast<std::size_t>(a)] = 1;
            occupied_[static_cast<std::size_t>(b)] = 1;
        } else {
            occupied_[static_cast<std::size_t>(v)] = 1;
        }
        return;
    }

    // Merge an unordered pair into one part.
    if (n < 2) return;
    const std::size_t i = rng_.uniform_below(n);
    std::size_t j = rng_.uniform_below(n - 1);
    if (j >= i) ++j;
    const long long v = parts_[i] + parts_[j];
    occupied_[static_cast<std::size_t>(parts_[i])] = 0;
    occupied_[static_cast<std::size_t>(parts_[j])] = 0;
    const bool free_slot = !occupied_[static_cast<std::size_t>(v)];
    // q_fwd = 1/4 * 1/C(n,2) ; q_rev = 1/4 * 1/(n-1) * 1/n_split(v).
    const long long n_split = (v - 1) / 2;
    const double ratio = free_slot
        ? static_cast<double>(n) / (2.0 * static_cast<double>(n_split))
        : 0.0;
    if (free_slot && rng_.uniform() < ratio) {
        const std::size_t hi = std::max(i, j), lo = std::min(i, j);
        parts_[hi] = parts_.back();
        parts_.pop_back();
        if (lo < parts_.size()) {
            parts_[lo] = parts_.back();
            parts_.pop_back();
        } else {
            parts_.pop_back();
        }
        parts_.push_back(v);
        occupied_[static_cast<std::size_t>(v)] = 1;
    } else {
        occupied_[static_cast<std::size_t>(parts_[i])] = 1;
        occupied_[static_cast<std::size_t>(parts_[j])] = 1;
    }
}

Partition FreePartitionSampler::current() const {
    Partition p;
    p.levels = parts_;
    std::sort(p.levels.begin(), p.levels.end());
    p.energy = energy_;
    p.validate();
    return p;
}

Partition FreePartitionSampler::next_sample() {
    for (long long s = 0; s < thinning_; ++s) step();
    return current();
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

CoarsePattern coarse_grain(const Partition& p, long long group_size) {
    if (group_size < 1) throw DomainError("coarse_grain: group size must be >= 1");
    p.validate();
    CoarsePattern c;
    c.group_size = group_size;
    const long long top = p.levels.back();
    const std::size_t groups =
        static_cast<std::size_t>((top + group_size - 1) / group_size);
    c.counts.assign(groups, 0);
    for (long long v : p.levels)
        c.counts[static_cast<std::size_t>((v - 1) / group_size)]++;
    c.ratios.resize(groups);
    for (std::size_t m = 0; m < groups; ++m)
        c.ratios[m] = static_cast<double>(c.counts[m]) /
                      static_cast<double>(group_size);
    return c;
}

FermiDiracFit fit_fermi_dirac(const std::vector<double>& mean_ratios,
                              long long group_size) {
    if (group_size < 1)
        throw DomainError("fit_fermi_dirac: group size must be >= 1");
    if (mean_ratios.size() < 2)
        throw DomainError("fit_fermi_dirac: need at least two groups");
    double lo = 1.0, hi = 0.0, total = 0.0;
    for (double r : mean_ratios) {
        if (!(r >= 0.0) || !(r <= 1.0))
            throw DomainError("fit_fermi_dirac: ratios must lie in [0,1]");
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        total += r;
    }
    if (hi - lo < 0.1)
        throw DomainError("fit_fermi_dirac: occupancy curve has no transition "
                          "region (degenerate data)");

    const double g = static_cast<double>(group_size);
    // Seed: the integrated occupancy approximates mu; the width of the
    // 0.1..0.9 transition band approximates 4.4 T.
    const double mu0 = std::max(g * total, 0.5 * g);
    std::size_t band = 0;
    for (double r : mean_ratios) band += (r > 0.1 && r < 0.9) ? 1 : 0;
    const double t0 = std::max(0.5 * g, g * static_cast<double>(band) / 4.4);

    const auto sse = [&](const std::vector<double>& q) {
        const double T = std::exp(q[0]);
        const double mu = q[1];
        double s = 0.0;
        for (std::size_t m = 0; m < mean_ratios.size(); ++m) {
            const double eps = g * (static_cast<double>(m) + 0.5);
            const double d = mean_ratios[m] - thermo::fermi_dirac(eps, T, mu);
            s += d * d;
        }
        return s;
    };
    const auto best = mathcore::neldermead(sse, {std::log(t0), mu0}, 1e-14);

    FermiDiracFit fit;
    fit.T = std::exp(best[0]);
    fit.mu = best[1];
    fit.rms = std::sqrt(sse(best) / static_cast<double>(mean_ratios.size()));
    return fit;
}

double counting_function(const Partition& p, double u) {
    if (u < 0.0) throw DomainError("counting_function: u must be >= 0");
    p.validate();
    double count = 0.0;
    for (long long v : p.levels)
        if (static_cast<double>(v) >= u) count += 1.0;
    return count;
}

EnsembleStats sample_ensemble(long long E, long long N, long long group_size,
                              long long samples, const McmcConfig& cfg) {
    if (samples < 1) throw DomainError("sample_ensemble: need >= 1 samples");
    if (group_size < 1)
        throw DomainError("sample_ensemble: group size must be >= 1");
    PartitionSampler chain(E, N, cfg);

    // The largest reachable level bounds the group count.
    const long long top = E - (N - 1) * N / 2;
    const std::size_t groups =
        static_cast<std::size_t>((top + group_size - 1) / group_size);
    std::vector<double> sum(groups, 0.0), sumsq(groups, 0.0);

    for (long long s = 0; s < samples; ++s) {
        const auto pat = coarse_grain(chain.next_sample(), group_size);
        for (std::size_t m = 0; m < groups; ++m) {
            const double r = m < pat.ratios.size() ? pat.ratios[m] : 0.0;
            sum[m] += r;
            sumsq[m] += r * r;
        }
    }

    EnsembleStats st;
    st.group_size = group_size;
    st.samples = samples;
    const double ns = static_cast<double>(samples);
    // Trim the never-touched tail so downstream fits see the physical window.
    std::size_t last = 0;
    for (std::size_t m = 0; m < groups; ++m)
        if (sum[m] / ns > 1e-4) last = m;
    for (std::size_t m = 0; m <= last; ++m) {
        const double mean = sum[m] / ns;
        const double var = std::max(0.0, sumsq[m] / ns - mean * mean);
        st.eps.push_back(static_cast<double>(group_size) *
                         (static_cast<double>(m) + 0.5));
        st.mean_ratios.push_back(mean);
        st.std_ratios.push_back(std::sqrt(var));
    }
    return st;
}

// ---------------------------------------------------------------------------
// Limit shape
// ---------------------------------------------------------------------------

double limit_shape_curve(double u) {
    const double s = kPi / std::sqrt(12.0);
    // ln(1+e^{-su}) evaluated via the decaying side only.
    const double z = -s * u;
    const double ln1p = z > 0.0 ? z + std::log1p(std::exp(-z))
                                : std::log1p(std::exp(z));
    return ln1p / s;
}

VershikResult vershik_check(long long E, long long samples,
                            const McmcConfig& cfg) {
    if (samples < 1) throw DomainError("vershik_check: need >= 1 samples");
    FreePartitionSampler chain(E, cfg);

    VershikResult r;
    const double root_e = std::sqrt(static_cast<double>(E));
    for (double u = 0.0; u <= 3.0 + 1e-9; u += 0.05) r.u.push_back(u);
    r.phi_scaled.assign(r.u.size(), 0.0);

    for (long long s = 0; s < samples; ++s) {
        const auto p = chain.next_sample();
        for (std::size_t k = 0; k < r.u.size(); ++k)
            r.phi_scaled[k] += counting_function(p, root_e * r.u[k]) / root_e;
    }
    for (auto& v : r.phi_scaled) v /= static_cast<double>(samples);

    r.curve.resize(r.u.size());
    r.max_deviation = 0.0;
    for (std::size_t k = 0; k < r.u.size(); ++k) {
        r.curve[k] = limit_shape_curve(r.u[k]);
        r.max_deviation =
            std::max(r.max_deviation, std::fabs(r.phi_scaled[k] - r.curve[k]));
    }
    return r;
}

} // namespace fermicavity::partitions
