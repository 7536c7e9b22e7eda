// SPDX-License-Identifier: MIT

#include "fermicavity/entanglement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fermicavity/errors.hpp"

namespace fermicavity::entanglement {

namespace {

constexpr double kPi = std::numbers::pi;

// Spectral window accepted at construction, clamp alarm for the entropy
// functionals, and the eigenvalue clip of the effective Hamiltonian.
constexpr double kSpectrumWindow = 1e-9;
constexpr double kClampAlarm = 1e-6;
constexpr double kClipFloor = 1e-12;

// Truncation of the coefficient series: rings are dropped once their
// weighted magnitude falls below this fraction of the running total.
constexpr double kTailFraction = 1e-12;
constexpr int kRingCap = 2000;

// Zone-integral quadrature orders (Gauss-Legendre per axis).
constexpr int kZoneNodes1d = 400;
constexpr int kZoneNodes2d = 160;

double binary_entropy(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

double mult(int n) { return n == 0 ? 1.0 : 2.0; }

// ---------------------------------------------------------------------------
// Worker pool for the radial-kernel quadratures
// ---------------------------------------------------------------------------

unsigned thread_cap() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    n = std::min(n, 8u);
    if (const char* env = std::getenv("FERMI_CAVITY_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = static_cast<unsigned>(std::min(v, 64L));
    }
    return n;
}

// Lattice correlation coefficient at squared site offset d2: a^2 M(a sqrt(d2))
// with the radial kernel of the relaxed gas.
double lattice_coefficient(long d2, double a,
                           const correlations::OccupationPattern& pat,
                           const thermo::CavityModel& cavity) {
    const double s = a * std::sqrt(static_cast<double>(d2));
    return a * a * correlations::relaxed_one_particle(s, pat, cavity);
}

// Evaluate the kernel for a batch of squared offsets.  Slots are preassigned,
// so the result is independent of the thread count and schedule.
std::vector<double> coefficient_batch(const std::vector<long>& d2s, double a,
                                      const correlations::OccupationPattern& pat,
                                      const thermo::CavityModel& cavity) {
    std::vector<double> out(d2s.size());
    const std::size_t nt =
        std::min<std::size_t>(thread_cap(), d2s.size());
    if (nt <= 1 || d2s.size() < 16) {
        for (std::size_t i = 0; i < d2s.size(); ++i)
            out[i] = lattice_coefficient(d2s[i], a, pat, cavity);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(nt);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t w = 0; w < nt; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < d2s.size();
                     i = next.fetch_add(1))
                    out[i] = lattice_coefficient(d2s[i], a, pat, cavity);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules (nodes by Newton iteration on the recurrence)
// ---------------------------------------------------------------------------

struct GaussRule {
    std::vector<double> x; // nodes, here mapped to [0, pi]
    std::vector<double> w; // weights summing to pi
};

GaussRule gauss_legendre_zone(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / pp;
            t -= dt;
            if (std::fabs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * pp * pp);
    }
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) { // map [-1, 1] -> [0, pi]
        r.x[i] = 0.5 * kPi * (x[i] + 1.0);
        r.w[i] = 0.5 * kPi * w[i];
    }
    return r;
}

// cos(n t) table for a set of angles, n = 0..n_max.
std::vector<double> cosine_table(const std::vector<double>& ts, int n_max) {
    std::vector<double> table(ts.size() * (n_max + 1));
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (int n = 0; n <= n_max; ++n)
            table[i * (n_max + 1) + n] = std::cos(n * ts[i]);
    return table;
}

// (2 pi)^-1 Integral_{-pi}^{pi} f(C(theta)) d theta for a 1-d symbol,
// using evenness to fold onto [0, pi].
double zone_integral_1d(const GeneratingFunction& c,
                        const std::function<double(double)>& f) {
    const GaussRule rule = gauss_legendre_zone(kZoneNodes1d);
    const int n_max = c.n_max();
    const std::vector<double> ct = cosine_table(rule.x, n_max);
    double acc = 0.0;
    for (int i = 0; i < kZoneNodes1d; ++i) {
        double val = 0.0;
        for (int n = 0; n <= n_max; ++n)
            val += mult(n) * c.coefficient(n) * ct[i * (n_max + 1) + n];
        acc += rule.w[i] * f(val);
    }
    return acc / kPi;
}

// (2 pi)^-2 IntInt_{[-pi,pi]^2} f(C(theta)) d^2 theta for a 2-d symbol,
// folded onto [0, pi]^2 by the cosine parity; the inner sums over the
// coefficient table are separated per theta_2 node, so the cost is
// O(P^2 n_max + P n_max^2) rather than O(P^2 n_max^2).
double zone_integral_2d(const GeneratingFunction& c,
                        const std::function<double(double)>& f) {
    const GaussRule rule = gauss_legendre_zone(kZoneNodes2d);
    const int n_max = c.n_max();
    const int stride = n_max + 1;
    const std::vector<double> ct = cosine_table(rule.x, n_max);
    std::vector<double> b(stride);
    double acc = 0.0;
    for (int j = 0; j < kZoneNodes2d; ++j) {
        for (int n1 = 0; n1 <= n_max; ++n1) {
            double s = 0.0;
            for (int n2 = 0; n2 <= n_max; ++n2)
                s += mult(n2) * c.coefficient(n1, n2) * ct[j * stride + n2];
            b[n1] = s;
        }
        double row = 0.0;
        for (int i = 0; i < kZoneNodes2d; ++i) {
            double val = 0.0;
            for (int n1 = 0; n1 <= n_max; ++n1)
                val += mult(n1) * b[n1] * ct[i * stride + n1];
            row += rule.w[i] * f(val);
        }
        acc += rule.w[j] * row;
    }
    return acc / (kPi * kPi);
}

// Entropy over a raw spectrum with the shared clamp alarm.
double spectral_entropy(const std::vector<double>& raw) {
    double worst = 0.0;
    double s = 0.0;
    for (double v : raw) {
        worst = std::max(worst, std::max(-v, v - 1.0));
        s += binary_entropy(std::clamp(v, 0.0, 1.0));
    }
    if (worst > kClampAlarm)
        throw NumericError(
            "entropy: correlation eigenvalue outside [0, 1] by more than the "
            "clamp window");
    return s;
}

// Ring radius below which the truncation never stops: the thermal kernel
// decays at least as fast as e^{-g |n|^2} with g = m a^2 T / (2 hbar^2) at
// large separation, and an accidental zero of its oscillatory part must not
// end the series while that envelope is still above the tail fraction.
int envelope_floor_radius(double a, const thermo::ThermalState& ts,
                          const thermo::CavityModel& cavity) {
    const double g = cavity.mass * a * a * ts.T / (2.0 * cavity.hbar * cavity.hbar);
    return static_cast<int>(std::ceil(std::sqrt(-std::log(kTailFraction) / g)));
}

void require_lattice_spacing(double a, const char* who) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError(std::string(who) + ": lattice spacing must be positive");
}

} // namespace

// ---------------------------------------------------------------------------
// SubsystemMask
// ---------------------------------------------------------------------------

SubsystemMask SubsystemMask::chain(std::size_t length, double lattice_a) {
    SubsystemMask m;
    m.shape = Shape::Chain;
    m.lattice_a = lattice_a;
    m.sites.reserve(length);
    for (std::size_t i = 0; i < length; ++i)
        m.sites.push_back({static_cast<int>(i), 0});
    return m;
}

SubsystemMask SubsystemMask::square(std::size_t side, double lattice_a) {
    SubsystemMask m;
    m.shape = Shape::Square;
    m.lattice_a = lattice_a;
    m.sites.reserve(side * side);
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j)
            m.sites.push_back({static_cast<int>(i), static_cast<int>(j)});
    return m;
}

SubsystemMask SubsystemMask::disk(double radius, double lattice_a) {
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw DomainError("disk mask: radius must be finite and >= 0");
    SubsystemMask m;
    m.shape = Shape::Disk;
    m.lattice_a = lattice_a;
    const int r = static_cast<int>(std::floor(radius));
    const double r2 = radius * radius;
    for (int i = -r; i <= r; ++i)
        for (int j = -r; j <= r; ++j)
            if (static_cast<double>(i) * i + static_cast<double>(j) * j <= r2)
                m.sites.push_back({i, j});
    return m;
}

SubsystemMask SubsystemMask::polygon(
    const std::vector<std::array<double, 2>>& vertices, double lattice_a) {
    if (vertices.size() < 3)
        throw DomainError("polygon mask: need at least 3 vertices");
    SubsystemMask m;
    m.shape = Shape::Polygon;
    m.lattice_a = lattice_a;
    double xmin = vertices[0][0], xmax = xmin;
    double ymin = vertices[0][1], ymax = ymin;
    for (const auto& v : vertices) {
        xmin = std::min(xmin, v[0]);
        xmax = std::max(xmax, v[0]);
        ymin = std::min(ymin, v[1]);
        ymax = std::max(ymax, v[1]);
    }
    const auto inside = [&](double x, double y) {
        // Even-odd rule: parity of crossings of the ray towards +x.
        bool in = false;
        for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size();
             j = i++) {
            const double xi = vertices[i][0], yi = vertices[i][1];
            const double xj = vertices[j][0], yj = vertices[j][1];
            if ((yi > y) != (yj > y) &&
                x < (xj - xi) * (y - yi) / (yj - yi) + xi)
                in = !in;
        }
        return in;
    };
    for (int i = static_cast<int>(std::ceil(xmin));
         i <= static_cast<int>(std::floor(xmax)); ++i)
        for (int j = static_cast<int>(std::ceil(ymin));
             j <= static_cast<int>(std::floor(ymax)); ++j)
            if (inside(static_cast<double>(i), static_cast<double>(j)))
                m.sites.push_back({i, j});
    return m;
}

void SubsystemMask::validate() const {
    if (sites.empty())
        throw DomainError("subsystem mask: need at least one site");
    if (!(lattice_a > 0.0) || !std::isfinite(lattice_a))
        throw DomainError("subsystem mask: lattice spacing must be positive");
    std::vector<std::array<int, 2>> sorted = sites;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DomainError("subsystem mask: duplicate site");
}

std::vector<correlations::Point>
SubsystemMask::positions(const correlations::Point& center) const {
    double cx = 0.0, cy = 0.0;
    for (const auto& s : sites) {
        cx += s[0];
        cy += s[1];
    }
    cx /= static_cast<double>(sites.size());
    cy /= static_cast<double>(sites.size());
    correlations::Point base;
    if (origin) {
        base = *origin;
    } else {
        base.x = center.x - lattice_a * cx;
        base.y = center.y - lattice_a * cy;
    }
    std::vector<correlations::Point> out;
    out.reserve(sites.size());
    for (const auto& s : sites)
        out.push_back({base.x + lattice_a * s[0], base.y + lattice_a * s[1]});
    return out;
}

// ---------------------------------------------------------------------------
// CorrelationMatrix
// ---------------------------------------------------------------------------

CorrelationMatrix CorrelationMatrix::from_matrix(const mathcore::SymmetricMatrix& m) {
    if (m.dim() == 0)
        throw DomainError("correlation matrix: dimension must be >= 1");
    CorrelationMatrix cm;
    cm.m_ = m;
    cm.eig_ = mathcore::sym_eigen(cm.m_);
    const double lo = cm.eig_.values.front();
    const double hi = cm.eig_.values.back();
    if (lo < -kSpectrumWindow || hi > 1.0 + kSpectrumWindow)
        throw NumericError(
            "correlation matrix: eigenvalue escapes [0, 1] beyond the "
            "accepted window");
    cm.excursion_ = std::max(0.0, std::max(-lo, hi - 1.0));
    return cm;
}

std::vector<double> CorrelationMatrix::occupations() const {
    std::vector<double> occ = eig_.values;
    for (double& v : occ) v = std::clamp(v, 0.0, 1.0);
    return occ;
}

// ---------------------------------------------------------------------------
// GeneratingFunction
// ---------------------------------------------------------------------------

double GeneratingFunction::coefficient(int n1, int n2) const {
    if (dim_ == 1 && n2 != 0)
        throw DomainError("symbol coefficient: second index must be 0 in 1-d");
    const int a1 = std::abs(n1);
    const int a2 = std::abs(n2);
    if (a1 > n_max_ || a2 > n_max_) return 0.0;
    if (dim_ == 1) return coeff_[static_cast<std::size_t>(a1)];
    return coeff_[static_cast<std::size_t>(a1) * (n_max_ + 1) + a2];
}

double GeneratingFunction::operator()(double theta) const {
    if (dim_ != 1)
        throw DomainError("symbol: 1-argument evaluation needs a 1-d symbol");
    // Cosine series via the Chebyshev recurrence on cos(n theta).
    const double c = std::cos(theta);
    double ck_prev = 1.0; // cos(0)
    double ck = c;        // cos(theta)
    double val = coeff_[0];
    for (int n = 1; n <= n_max_; ++n) {
        val += 2.0 * coeff_[static_cast<std::size_t>(n)] * ck;
        const double next = 2.0 * c * ck - ck_prev;
        ck_prev = ck;
        ck = next;
    }
    return val;
}

double GeneratingFunction::operator()(double theta1, double theta2) const {
    if (dim_ != 2)
        throw DomainError("symbol: 2-argument evaluation needs a 2-d symbol");
    const int stride = n_max_ + 1;
    const double c2 = std::cos(theta2);
    // b[n1] = sum_n2 mult(n2) c_{n1 n2} cos(n2 theta2), then the outer
    // cosine sum over n1; both by the Chebyshev recurrence.
    std::vector<double> b(stride, 0.0);
    {
        double ck_prev = 1.0, ck = c2;
        for (int n1 = 0; n1 < stride; ++n1)
            b[n1] = coeff_[static_cast<std::size_t>(n1) * stride];
        for (int n2 = 1; n2 <= n_max_; ++n2) {
            for (int n1 = 0; n1 < stride; ++n1)
                b[n1] += 2.0 * coeff_[static_cast<std::size_t>(n1) * stride + n2] * ck;
            const double next = 2.0 * c2 * ck - ck_prev;
            ck_prev = ck;
            ck = next;
        }
    }
    const double c1 = std::cos(theta1);
    double ck_prev = 1.0, ck = c1;
    double val = b[0];
    for (int n1 = 1; n1 <= n_max_; ++n1) {
        val += 2.0 * b[n1] * ck;
        const double next = 2.0 * c1 * ck - ck_prev;
        ck_prev = ck;
        ck = next;
    }
    return val;
}

// ---------------------------------------------------------------------------
// Matrix construction
// ---------------------------------------------------------------------------

CorrelationMatrix build_corr_matrix(const SubsystemMask& mask,
                                    const thermo::ThermalState& ts,
                                    const thermo::CavityModel& cavity) {
    mask.validate();
    ts.validate();
    cavity.validate();
    const double a = mask.lattice_a;

    // The lattice has to resolve every appreciably occupied mode: spacing
    // below the de Broglie wavelength 2 pi hbar / p at the occupation edge
    // max(mu, 0) + 10 T.
    const double p_edge =
        std::sqrt(2.0 * cavity.mass * (std::max(ts.mu, 0.0) + 10.0 * ts.T));
    const double lambda_min = 2.0 * kPi * cavity.hbar / p_edge;
    if (!(a < lambda_min))
        throw DomainError(
            "correlation matrix: lattice spacing does not resolve the "
            "occupied modes (spacing must stay below the shortest occupied "
            "de Broglie wavelength)");

    // The translation-invariant bulk kernel is only trusted well away from
    // the walls; a mask that gets closer than five thermal wavelengths to
    // the boundary is rejected outright.
    const correlations::Point center{cavity.linear_size / 2.0,
                                     cavity.linear_size / 2.0};
    if (!correlations::within_boundary_margin(mask.positions(center), ts, cavity))
        throw DomainError(
            "correlation matrix: subsystem sites within five thermal "
            "wavelengths of the cavity walls");

    // All entries depend on the site offset only; evaluate the kernel once
    // per distinct squared offset.
    const std::size_t n = mask.size();
    const auto& sites = mask.sites;
    long cap = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const long di = sites[i][0] - sites[j][0];
            const long dj = sites[i][1] - sites[j][1];
            cap = std::max(cap, di * di + dj * dj);
        }
    std::vector<char> needed(static_cast<std::size_t>(cap) + 1, 0);
    needed[0] = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const long di = sites[i][0] - sites[j][0];
            const long dj = sites[i][1] - sites[j][1];
            needed[static_cast<std::size_t>(di * di + dj * dj)] = 1;
        }
    std::vector<long> d2s;
    for (std::size_t d2 = 0; d2 < needed.size(); ++d2)
        if (needed[d2]) d2s.push_back(static_cast<long>(d2));

    const auto pat = correlations::OccupationPattern::thermal(ts);
    const std::vector<double> values = coefficient_batch(d2s, a, pat, cavity);
    std::vector<double> by_d2(static_cast<std::size_t>(cap) + 1, 0.0);
    for (std::size_t k = 0; k < d2s.size(); ++k)
        by_d2[static_cast<std::size_t>(d2s[k])] = values[k];

    mathcore::SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set(i, i, by_d2[0]);
        for (std::size_t j = 0; j < i; ++j) {
            const long di = sites[i][0] - sites[j][0];
            const long dj = sites[i][1] - sites[j][1];
            m.set(i, j, by_d2[static_cast<std::size_t>(di * di + dj * dj)]);
        }
    }
    return CorrelationMatrix::from_matrix(m);
}

// ---------------------------------------------------------------------------
// Spectral functionals
// ---------------------------------------------------------------------------

double entanglement_entropy(const CorrelationMatrix& m) {
    return spectral_entropy(m.spectrum());
}

double gaussian_entropy(const mathcore::SymmetricMatrix& m) {
    if (m.dim() == 0)
        throw DomainError("entropy: matrix dimension must be >= 1");
    return spectral_entropy(mathcore::sym_eigen(m).values);
}

mathcore::SymmetricMatrix effective_hamiltonian(const CorrelationMatrix& m,
                                                std::size_t* clipped) {
    const auto& eig = m.eigen();
    const std::size_t n = m.size();
    std::size_t nclip = 0;
    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k) {
        double lam = std::clamp(eig.values[k], 0.0, 1.0);
        if (lam < kClipFloor) {
            lam = kClipFloor;
            ++nclip;
        } else if (lam > 1.0 - kClipFloor) {
            lam = 1.0 - kClipFloor;
            ++nclip;
        }
        h[k] = std::log((1.0 - lam) / lam);
    }
    if (clipped) *clipped = nclip;
    mathcore::SymmetricMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += eig.vector(i, k) * h[k] * eig.vector(j, k);
            out.set(i, j, acc);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Generating functions
// ---------------------------------------------------------------------------

GeneratingFunction generating_function_1d(const thermo::ThermalState& ts,
                                          const thermo::CavityModel& cavity) {
    ts.validate();
    cavity.validate();
    const double a = cavity.lattice_a;
    require_lattice_spacing(a, "chain symbol");
    const auto pat = correlations::OccupationPattern::thermal(ts);
    const int floor_r = envelope_floor_radius(a, ts, cavity);

    GeneratingFunction c;
    c.dim_ = 1;
    c.coeff_.push_back(lattice_coefficient(0, a, pat, cavity));
    double total = std::fabs(c.coeff_[0]);
    int consecutive = 0;
    int n = 0;
    while (consecutive < 2) {
        ++n;
        if (n > kRingCap)
            throw NumericError(
                "chain symbol: coefficient decay not reached within the "
                "truncation cap");
        const double cn =
            lattice_coefficient(static_cast<long>(n) * n, a, pat, cavity);
        c.coeff_.push_back(cn);
        const double ring = 2.0 * std::fabs(cn);
        total += ring;
        if (n >= floor_r && ring <= kTailFraction * total)
            ++consecutive;
        else
            consecutive = 0;
    }
    c.n_max_ = n;
    return c;
}

GeneratingFunction generating_function_2d(const thermo::ThermalState& ts,
                                          const thermo::CavityModel& cavity) {
    ts.validate();
    cavity.validate();
    const double a = cavity.lattice_a;
    require_lattice_spacing(a, "torus symbol");
    const auto pat = correlations::OccupationPattern::thermal(ts);
    const int floor_r = envelope_floor_radius(a, ts, cavity);

    // Quarter table grown ring by ring (a ring holds the cells with
    // max(n1, n2) = R); the cells (R, k) and (k, R) share the squared
    // offset R^2 + k^2, so each ring costs R + 1 kernel evaluations.
    std::unordered_map<long, double> cache;
    cache[0] = lattice_coefficient(0, a, pat, cavity);
    std::vector<std::vector<double>> rows{{cache[0]}};
    double total = std::fabs(cache[0]);
    int consecutive = 0;
    int r = 0;
    while (consecutive < 2) {
        ++r;
        if (r > kRingCap)
            throw NumericError(
                "torus symbol: coefficient decay not reached within the "
                "truncation cap");
        std::vector<long> fresh;
        fresh.reserve(r + 1);
        for (int k = 0; k <= r; ++k) {
            const long d2 = static_cast<long>(r) * r + static_cast<long>(k) * k;
            if (!cache.count(d2)) fresh.push_back(d2);
        }
        const std::vector<double> vals = coefficient_batch(fresh, a, pat, cavity);
        for (std::size_t i = 0; i < fresh.size(); ++i) cache[fresh[i]] = vals[i];

        rows.resize(r + 1);
        for (int n1 = 0; n1 <= r; ++n1) rows[n1].resize(r + 1, 0.0);
        double ring = 0.0;
        for (int k = 0; k <= r; ++k) {
            const long d2 = static_cast<long>(r) * r + static_cast<long>(k) * k;
            const double v = cache[d2];
            rows[r][k] = v;
            ring += mult(r) * mult(k) * std::fabs(v);
            if (k < r) {
                rows[k][r] = v;
                ring += mult(k) * mult(r) * std::fabs(v);
            }
        }
        total += ring;
        if (r >= floor_r && ring <= kTailFraction * total)
            ++consecutive;
        else
            consecutive = 0;
    }

    GeneratingFunction c;
    c.dim_ = 2;
    c.n_max_ = r;
    c.coeff_.assign(static_cast<std::size_t>(r + 1) * (r + 1), 0.0);
    for (int n1 = 0; n1 <= r; ++n1)
        for (int n2 = 0; n2 <= r; ++n2)
            c.coeff_[static_cast<std::size_t>(n1) * (r + 1) + n2] = rows[n1][n2];
    return c;
}

// ---------------------------------------------------------------------------
// Asymptotic checks
// ---------------------------------------------------------------------------

std::vector<double> szego_check_1d(const thermo::ThermalState& ts,
                                   const thermo::CavityModel& cavity,
                                   double lambda,
                                   const std::vector<std::size_t>& sizes) {
    if (lambda >= -1.05 && lambda <= 1.05)
        throw DomainError(
            "determinant asymptotics: the shift must stay outside "
            "[-1.05, 1.05], where the shifted symbol can vanish");
    const GeneratingFunction c = generating_function_1d(ts, cavity);
    const double integral = zone_integral_1d(c, [lambda](double v) {
        return std::log(std::fabs(lambda + 1.0 - 2.0 * v));
    });
    std::vector<double> devs;
    devs.reserve(sizes.size());
    for (std::size_t nsize : sizes) {
        const auto m = build_corr_matrix(
            SubsystemMask::chain(nsize, cavity.lattice_a), ts, cavity);
        double ln_det = 0.0;
        for (double v : m.occupations())
            ln_det += std::log(std::fabs(lambda + 1.0 - 2.0 * v));
        devs.push_back(
            std::fabs(ln_det / static_cast<double>(nsize) - integral));
    }
    return devs;
}

DoktorskyResult doktorsky_check_2d(const thermo::ThermalState& ts,
                                   const thermo::CavityModel& cavity,
                                   std::size_t side) {
    if (side == 0)
        throw DomainError("volume-law check: side must be >= 1");
    const auto m =
        build_corr_matrix(SubsystemMask::square(side, cavity.lattice_a), ts, cavity);
    const GeneratingFunction c = generating_function_2d(ts, cavity);
    DoktorskyResult r;
    r.entropy_per_site =
        entanglement_entropy(m) / static_cast<double>(side * side);
    r.formula_value = zone_integral_2d(c, binary_entropy);
    r.gap = (r.entropy_per_site - r.formula_value) / r.formula_value;
    return r;
}

EntropyDensity ee_density(const thermo::ThermalState& ts,
                          const thermo::CavityModel& cavity) {
    require_lattice_spacing(cavity.lattice_a, "entropy density");
    const GeneratingFunction c = generating_function_2d(ts, cavity);
    EntropyDensity d;
    d.per_site = zone_integral_2d(c, binary_entropy);
    d.continuum = thermo::entropy_density_continuum(ts, cavity);
    return d;
}

std::vector<MomentGap>
spectral_distribution_check(const CorrelationMatrix& m,
                            const GeneratingFunction& c,
                            const std::vector<int>& moments) {
    if (c.dim() != 2)
        throw DomainError(
            "spectral distribution check: needs the 2-d torus symbol");
    std::vector<MomentGap> out;
    out.reserve(moments.size());
    const std::vector<double> occ = m.occupations();
    for (int s : moments) {
        if (s < 1)
            throw DomainError("spectral distribution check: moment order must be >= 1");
        MomentGap g;
        g.s = s;
        double acc = 0.0;
        for (double v : occ) acc += std::pow(v, s);
        g.eigen_moment = acc / static_cast<double>(occ.size());
        g.symbol_moment = zone_integral_2d(
            c, [s](double v) { return std::pow(v, s); });
        g.gap = std::fabs(g.eigen_moment - g.symbol_moment) /
                std::fabs(g.symbol_moment);
        out.push_back(g);
    }
    return out;
}

} // namespace fermicavity::entanglement
