// SPDX-License-Identifier: MIT
//
// fermi_cavity — command-line front end for the fermicavity library.
//
// Subcommands
//   thermo solve   (T, mu) <-> (E, N) on a chosen spectrum
//   partition      MCMC block occupancies of random partitions (sample | fit)
//   corr pair      relaxed one-particle correlation at a separation or
//                  between two explicit points
//   ee lattice     entanglement entropy of a lattice subsystem
//   szego          Toeplitz-determinant deviation sequence on chains
//   kinetics run   collision-kernel relaxation trace of a level ladder
//   recurrence     typical-case recurrence-time window
//   repro          canned end-to-end reproductions (CSV)
//
// Exit codes: 0 success, 1 domain error (inputs outside the physical or
// mathematical domain), 2 numeric failure (legitimate request, procedure
// did not converge / overflowed), 64 usage or schema error.
//
// Output: scalar results are JSON objects tagged "schema": "fermi-cavity/1";
// bulk curves are CSV whose first line is `# fermi-cavity/1`, followed by a
// header row, data rows, and `# key = value` trailer lines.  Table commands
// accept --format json to wrap the same data as {"schema","columns","rows",
// "meta"}.  --out writes atomically (temp file + rename); default is stdout.
// Given identical options, config, and seed, reruns are byte-identical.
//
// --config file.json supplies a flat JSON object of long-option names for
// the invoked subcommand; config values override command-line flags.
// FERMI_CAVITY_THREADS (positive integer) caps internal parallelism; every
// current routine is single-threaded, so the cap is validated and trivially
// honored.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fermicavity/correlations.hpp"
#include "fermicavity/entanglement.hpp"
#include "fermicavity/errors.hpp"
#include "fermicavity/kinetics.hpp"
#include "fermicavity/partitions.hpp"
#include "fermicavity/recurrence.hpp"
#include "fermicavity/thermo.hpp"

namespace {

using nlohmann::json;
using namespace fermicavity;

constexpr const char* kSchemaTag = "fermi-cavity/1";
constexpr const char* kVersion = "fermi-cavity 1.0.0";

/// Bad invocation discovered after flag parsing (incomplete option pairs,
/// malformed value files, unknown reproduction ids, ...).  Mapped to the
/// same exit code as a parse error.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// Tabular result: numeric cells plus a flat key/value trailer.  Rendered as
/// CSV by default or as a JSON document with --format json.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    json meta = json::object();
};

std::string render_json(const json& j) { return j.dump(2) + "\n"; }

std::string render_table(const Table& t, const std::string& format) {
    if (format == "json") {
        json j;
        j["schema"] = kSchemaTag;
        j["columns"] = t.columns;
        j["rows"] = t.rows;
        if (!t.meta.empty()) j["meta"] = t.meta;
        return render_json(j);
    }
    std::string out = std::string("# ") + kSchemaTag + "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c != 0) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c != 0) out += ',';
            out += row[c].dump();
        }
        out += '\n';
    }
    for (const auto& [key, value] : t.meta.items())
        out += "# " + key + " = " + value.dump() + "\n";
    return out;
}

/// Write to stdout, or atomically to a file: the body lands in `path + ".tmp"`
/// first and is renamed over the target only after a clean close, so readers
/// never observe a half-written result.
void deliver(const std::string& body, const std::string& path) {
    if (path.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f.write(body.data(), static_cast<std::streamsize>(body.size()));
        f.flush();
        if (!f) throw std::runtime_error("cannot write output file '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Input parsing helpers
// ---------------------------------------------------------------------------

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) parts.push_back(item);
    return parts;
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used])))
            ++used;
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("cannot parse '" + text + "' as a number in " + what);
    }
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split_csv(text)) out.push_back(parse_double(item, what));
    if (out.empty()) throw UsageError(what + " is empty");
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
    std::vector<std::size_t> out;
    for (const auto& item : split_csv(text)) {
        const double v = parse_double(item, what);
        if (v < 1.0 || v != std::floor(v))
            throw UsageError(what + " entries must be positive integers (got '" + item + "')");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw UsageError(what + " is empty");
    return out;
}

/// One number per line; blank lines and '#' comments are skipped.
std::vector<double> read_number_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open file '" + path + "'");
    std::vector<double> out;
    std::string line;
    while (std::getline(f, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        out.push_back(parse_double(line.substr(first), "file '" + path + "'"));
    }
    if (out.empty()) throw UsageError("file '" + path + "' holds no numbers");
    return out;
}

// ---------------------------------------------------------------------------
// Environment and config
// ---------------------------------------------------------------------------

/// FERMI_CAVITY_THREADS caps internal parallelism.  All current routines are
/// single-threaded, so any valid cap is honored trivially; the value is still
/// validated so a misconfigured environment fails loudly instead of silently.
void validate_thread_cap() {
    const char* v = std::getenv("FERMI_CAVITY_THREADS");
    if (v == nullptr) return;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1)
        throw UsageError(std::string("FERMI_CAVITY_THREADS must be a positive integer (got '") +
                         v + "')");
}

/// Strip --config from the raw arguments, load the JSON object it names, and
/// append one synthesized "--key=value" token per entry.  Appended tokens win
/// (every option takes the last occurrence), which is exactly the promised
/// precedence: config overrides flags.  Unknown keys fall through the normal
/// unknown-option path and exit 64.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::string path;
    bool found = false;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config requires a file path");
            path = args[i + 1];
            found = true;
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            found = true;
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (!found) return args;

    std::ifstream f(path);
    if (!f) throw UsageError("cannot open config file '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::parse_error& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object())
        throw UsageError("config file '" + path + "' must hold a JSON object of option names");

    for (const auto& [key, value] : cfg.items()) {
        if (value.is_boolean()) {
            if (!value.get<bool>())
                throw UsageError("config key '" + key +
                                 "': false is not supported, omit the key instead");
            args.push_back("--" + key);
        } else if (value.is_number() || value.is_string()) {
            const std::string text =
                value.is_string() ? value.get<std::string>() : value.dump();
            args.push_back("--" + key + "=" + text);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ',';
                joined += item.is_string() ? item.get<std::string>() : item.dump();
            }
            args.push_back("--" + key + "=" + joined);
        } else {
            throw UsageError("config key '" + key + "' has an unsupported value type");
        }
    }
    return args;
}

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

/// Cavity geometry flags shared by the spatial commands.  The defaults give a
/// 100 x 100 box, roomy enough that centered lattice subsystems keep the
/// required clearance from the walls at order-one temperatures.
struct CavityOpts {
    thermo::CavityModel cav;

    void attach(CLI::App* cmd) {
        cav.volume = 1.0e4;
        cav.linear_size = 100.0;
        cmd->add_option("--volume", cav.volume, "cavity area");
        cmd->add_option("--size", cav.linear_size, "cavity linear size L");
        cmd->add_option("--hbar", cav.hbar, "reduced Planck constant");
        cmd->add_option("--mass", cav.mass, "particle mass");
    }
};

/// The thermal block: exactly one of (--T, --mu) or (--E, --N).  The (E, N)
/// form is inverted through the cavity's continuous spectrum; the (T, mu)
/// form is completed forward so the result always carries all four numbers.
struct ThermalOpts {
    double T = 0.0, mu = 0.0, E = 0.0, N = 0.0;
    CLI::Option *oT = nullptr, *oMu = nullptr, *oE = nullptr, *oN = nullptr;

    void attach(CLI::App* cmd) {
        oT = cmd->add_option("--T", T, "temperature");
        oMu = cmd->add_option("--mu", mu, "chemical potential");
        oE = cmd->add_option("--E", E, "total energy");
        oN = cmd->add_option("--N", N, "particle number");
    }

    thermo::ThermalState resolve(const thermo::CavityModel& cav) const {
        const bool tm = oT->count() > 0 || oMu->count() > 0;
        const bool en = oE->count() > 0 || oN->count() > 0;
        if (tm && en) throw UsageError("give either --T/--mu or --E/--N, not both");
        if (!tm && !en) throw UsageError("a thermal state is required: --T/--mu or --E/--N");
        if ((oT->count() > 0) != (oMu->count() > 0))
            throw UsageError("--T and --mu must be given together");
        if ((oE->count() > 0) != (oN->count() > 0))
            throw UsageError("--E and --N must be given together");
        const auto spec = thermo::SpectrumModel::continuous(cav.spectral_density());
        if (tm) {
            thermo::ThermalState ts;
            ts.T = T;
            ts.mu = mu;
            ts.N = thermo::number_of(spec, T, mu);
            ts.E = thermo::energy_of(spec, T, mu);
            return ts;
        }
        return thermo::solve_thermal(spec, E, N);
    }
};

json thermal_echo(const thermo::ThermalState& ts) {
    json j;
    j["T"] = ts.T;
    j["mu"] = ts.mu;
    j["E"] = ts.E;
    j["N"] = ts.N;
    return j;
}

// ---------------------------------------------------------------------------
// thermo solve
// ---------------------------------------------------------------------------

struct ThermoSolveOpts {
    std::string levels;
    std::size_t count = 6000;
    double rho = 0.0;
    std::string file;
    std::string levels_list;
    ThermalOpts thermal;
    std::string out;
    CLI::Option *oRho = nullptr, *oFile = nullptr, *oList = nullptr;
};

std::string run_thermo_solve(const ThermoSolveOpts& o) {
    thermo::SpectrumModel spec;
    if (o.levels == "harmonic") {
        spec = thermo::SpectrumModel::harmonic(o.count);
    } else if (o.levels == "continuous") {
        if (o.oRho->count() == 0)
            throw UsageError("--levels continuous requires --rho");
        spec = thermo::SpectrumModel::continuous(o.rho);
    } else { // discrete
        const bool from_file = o.oFile->count() > 0;
        const bool from_list = o.oList->count() > 0;
        if (from_file == from_list)
            throw UsageError("--levels discrete requires exactly one of --file / --levels-list");
        spec = thermo::SpectrumModel::discrete(
            from_file ? read_number_file(o.file)
                      : parse_number_list(o.levels_list, "--levels-list"));
    }

    const auto& t = o.thermal;
    const bool tm = t.oT->count() > 0 || t.oMu->count() > 0;
    const bool en = t.oE->count() > 0 || t.oN->count() > 0;
    if (tm && en) throw UsageError("give either --T/--mu or --E/--N, not both");
    if (!tm && !en) throw UsageError("a thermal state is required: --T/--mu or --E/--N");
    if ((t.oT->count() > 0) != (t.oMu->count() > 0))
        throw UsageError("--T and --mu must be given together");
    if ((t.oE->count() > 0) != (t.oN->count() > 0))
        throw UsageError("--E and --N must be given together");

    thermo::ThermalState ts;
    if (tm) {
        ts.T = t.T;
        ts.mu = t.mu;
        ts.N = thermo::number_of(spec, t.T, t.mu);
        ts.E = thermo::energy_of(spec, t.T, t.mu);
    } else {
        ts = thermo::solve_thermal(spec, t.E, t.N);
    }

    json j = thermal_echo(ts);
    j["schema"] = kSchemaTag;
    j["levels"] = o.levels;
    return render_json(j);
}

// ---------------------------------------------------------------------------
// partition sample / fit
// ---------------------------------------------------------------------------

struct PartitionOpts {
    long long E = 0, N = 0;
    long long group_size = 20;
    long long samples = 10000;
    std::uint64_t seed = 1;
    long long burn_in = 1'000'000;
    long long thinning = 1'000;
    long long max_shift = 64;
    std::string out, format = "csv";

    partitions::McmcConfig config() const {
        partitions::McmcConfig cfg;
        cfg.seed = seed;
        cfg.burn_in = burn_in;
        cfg.thinning = thinning;
        cfg.max_shift = max_shift;
        return cfg;
    }

    json echo() const {
        json j;
        j["E"] = E;
        j["N"] = N;
        j["group_size"] = group_size;
        j["samples"] = samples;
        j["seed"] = seed;
        j["burn_in"] = burn_in;
        j["thinning"] = thinning;
        return j;
    }
};

void attach_partition_opts(CLI::App* cmd, PartitionOpts& o) {
    cmd->add_option("--E", o.E, "partition energy (positive integer)")->required();
    cmd->add_option("--N", o.N, "number of parts (positive integer)")->required();
    cmd->add_option("--group-size", o.group_size, "levels per block");
    cmd->add_option("--samples", o.samples, "retained samples");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--burn-in", o.burn_in, "proposals discarded up front");
    cmd->add_option("--thinning", o.thinning, "proposals between retained samples");
    cmd->add_option("--max-shift", o.max_shift, "energy-transfer proposal range");
}

std::string run_partition_sample(const PartitionOpts& o) {
    const auto stats =
        partitions::sample_ensemble(o.E, o.N, o.group_size, o.samples, o.config());
    Table t;
    t.columns = {"m", "eps_m", "ratio_mean", "ratio_std"};
    for (std::size_t m = 0; m < stats.eps.size(); ++m)
        t.rows.push_back({json(static_cast<long long>(m + 1)), json(stats.eps[m]),
                          json(stats.mean_ratios[m]), json(stats.std_ratios[m])});
    t.meta = o.echo();
    return render_table(t, o.format);
}

std::string run_partition_fit(const PartitionOpts& o) {
    const auto stats =
        partitions::sample_ensemble(o.E, o.N, o.group_size, o.samples, o.config());
    const auto fit = partitions::fit_fermi_dirac(stats.mean_ratios, o.group_size);
    json j = o.echo();
    j["schema"] = kSchemaTag;
    j["T"] = fit.T;
    j["mu"] = fit.mu;
    j["rms"] = fit.rms;
    return render_json(j);
}

// ---------------------------------------------------------------------------
// corr pair
// ---------------------------------------------------------------------------

struct CorrOpts {
    double sep = 0.0;
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
    CavityOpts cavity;
    ThermalOpts thermal;
    std::string out;
    CLI::Option *oSep = nullptr, *oX1 = nullptr, *oY1 = nullptr, *oX2 = nullptr,
                *oY2 = nullptr;
};

std::string run_corr_pair(const CorrOpts& o) {
    const auto ts = o.thermal.resolve(o.cavity.cav);
    const auto pat = correlations::OccupationPattern::thermal(ts);

    const int points =
        static_cast<int>(o.oX1->count() > 0) + static_cast<int>(o.oY1->count() > 0) +
        static_cast<int>(o.oX2->count() > 0) + static_cast<int>(o.oY2->count() > 0);
    const bool by_sep = o.oSep->count() > 0;
    if (by_sep == (points > 0))
        throw UsageError("give either --sep or the four point coordinates --x1 --y1 --x2 --y2");
    if (!by_sep && points != 4)
        throw UsageError("explicit points need all of --x1 --y1 --x2 --y2");

    double separation = o.sep;
    double value = 0.0;
    if (by_sep) {
        value = correlations::relaxed_one_particle(separation, pat, o.cavity.cav);
    } else {
        const correlations::Point a{o.x1, o.y1};
        const correlations::Point b{o.x2, o.y2};
        separation = correlations::distance(a, b);
        value = correlations::relaxed_one_particle(a, b, pat, o.cavity.cav);
        if (!correlations::within_boundary_margin({a, b}, ts, o.cavity.cav))
            std::cerr << "warning: points are within five thermal wavelengths of the "
                         "cavity walls; relaxed correlations are bulk results\n";
    }

    json j = thermal_echo(ts);
    j["schema"] = kSchemaTag;
    j["separation"] = separation;
    j["value"] = value;
    return render_json(j);
}

// ---------------------------------------------------------------------------
// ee lattice
// ---------------------------------------------------------------------------

struct EeOpts {
    std::string shape;
    std::size_t side = 0;
    std::size_t length = 0;
    double radius = 0.0;
    double a = 0.0;
    bool check_volume_law = false;
    CavityOpts cavity;
    ThermalOpts thermal;
    std::string out;
    CLI::Option *oSide = nullptr, *oLength = nullptr, *oRadius = nullptr;
};

std::string run_ee_lattice(const EeOpts& o) {
    thermo::CavityModel cav = o.cavity.cav;
    cav.lattice_a = o.a;

    entanglement::SubsystemMask mask;
    if (o.shape == "square") {
        if (o.oSide->count() == 0) throw UsageError("--shape square requires --side");
        mask = entanglement::SubsystemMask::square(o.side, o.a);
    } else if (o.shape == "chain") {
        if (o.oLength->count() == 0) throw UsageError("--shape chain requires --length");
        mask = entanglement::SubsystemMask::chain(o.length, o.a);
    } else { // disk
        if (o.oRadius->count() == 0) throw UsageError("--shape disk requires --radius");
        mask = entanglement::SubsystemMask::disk(o.radius, o.a);
    }
    if (o.check_volume_law && o.shape != "square")
        throw UsageError("--check-volume-law applies to --shape square only");

    const auto ts = o.thermal.resolve(cav);
    const auto m = entanglement::build_corr_matrix(mask, ts, cav);
    const double entropy = entanglement::entanglement_entropy(m);
    const auto n_sites = static_cast<double>(mask.size());

    json j = thermal_echo(ts);
    j["schema"] = kSchemaTag;
    j["shape"] = o.shape;
    j["a"] = o.a;
    j["n_sites"] = static_cast<long long>(mask.size());
    j["entropy"] = entropy;
    j["entropy_per_site"] = entropy / n_sites;
    if (o.check_volume_law) {
        const auto r = entanglement::doktorsky_check_2d(ts, cav, o.side);
        j["formula_value"] = r.formula_value;
        j["gap"] = r.gap;
    }
    return render_json(j);
}

// ---------------------------------------------------------------------------
// szego
// ---------------------------------------------------------------------------

struct SzegoOpts {
    double lambda = 3.0;
    std::string sizes = "64,128,256";
    double a = 0.0;
    CavityOpts cavity;
    ThermalOpts thermal;
    std::string out, format = "csv";
};

std::string run_szego(const SzegoOpts& o) {
    thermo::CavityModel cav = o.cavity.cav;
    cav.lattice_a = o.a;
    const auto sizes = parse_size_list(o.sizes, "--sizes");
    const auto ts = o.thermal.resolve(cav);
    const auto devs = entanglement::szego_check_1d(ts, cav, o.lambda, sizes);

    Table t;
    t.columns = {"size", "deviation"};
    for (std::size_t i = 0; i < sizes.size(); ++i)
        t.rows.push_back({json(static_cast<long long>(sizes[i])), json(devs[i])});
    t.meta = thermal_echo(ts);
    t.meta["lambda"] = o.lambda;
    t.meta["a"] = o.a;
    return render_table(t, o.format);
}

// ---------------------------------------------------------------------------
// kinetics run
// ---------------------------------------------------------------------------

struct KineticsOpts {
    std::size_t levels = 64;
    double eps0 = 0.0;
    double spacing = 1.0;
    bool double_step = false;
    std::string init;
    double dt = 0.0;
    std::size_t steps = 0;
    std::size_t kernel_max = 8;
    double kernel_rate = 1.0;
    std::size_t record_every = 1;
    std::string out, format = "csv";
    CLI::Option* oInit = nullptr;
};

/// The canonical relaxation demo: first and third quarter of the ladder
/// filled, the rest empty — two Fermi steps far from equilibrium.
std::vector<double> double_step_occupations(std::size_t levels) {
    if (levels < 4 || levels % 4 != 0)
        throw UsageError("--double-step needs a level count divisible by 4");
    std::vector<double> occ(levels, 0.0);
    for (std::size_t k = 0; k < levels / 4; ++k) occ[k] = 1.0;
    for (std::size_t k = levels / 2; k < 3 * levels / 4; ++k) occ[k] = 1.0;
    return occ;
}

Table kinetics_trace(const kinetics::KineticState& initial,
                     const kinetics::CollisionKernel& kernel, double dt,
                     std::size_t steps, std::size_t record_every) {
    if (record_every == 0) throw UsageError("--record-every must be at least 1");
    const auto eq = kinetics::equilibrium_state(initial);
    std::vector<double> target(initial.levels());
    for (std::size_t k = 0; k < target.size(); ++k)
        target[k] = thermo::fermi_dirac(initial.energies[k], eq.T, eq.mu);

    const auto traj = kinetics::evolve(initial, kernel, dt, steps);
    Table t;
    t.columns = {"step", "t", "sup_norm", "number", "energy"};
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (i % record_every != 0 && i + 1 != traj.size()) continue;
        double sup = 0.0;
        for (std::size_t k = 0; k < target.size(); ++k)
            sup = std::max(sup, std::fabs(traj[i].occupations[k] - target[k]));
        t.rows.push_back({json(static_cast<long long>(i)), json(traj[i].t), json(sup),
                          json(traj[i].particle_number()), json(traj[i].energy())});
    }
    t.meta["T_equilibrium"] = eq.T;
    t.meta["mu_equilibrium"] = eq.mu;
    t.meta["dt"] = dt;
    return t;
}

std::string run_kinetics(const KineticsOpts& o) {
    if (o.double_step == (o.oInit->count() > 0))
        throw UsageError("give exactly one of --double-step / --init FILE");
    std::vector<double> occ = o.double_step ? double_step_occupations(o.levels)
                                            : read_number_file(o.init);
    const auto state = kinetics::KineticState::uniform(o.eps0, o.spacing, std::move(occ));
    const std::size_t max_transfer =
        o.kernel_max > 0 ? o.kernel_max : state.levels() - 1;
    const auto kernel = kinetics::CollisionKernel::flat(max_transfer, o.kernel_rate);

    Table t = kinetics_trace(state, kernel, o.dt, o.steps, o.record_every);
    t.meta["kernel_max"] = static_cast<long long>(max_transfer);
    t.meta["kernel_rate"] = o.kernel_rate;
    return render_table(t, o.format);
}

// ---------------------------------------------------------------------------
// recurrence
// ---------------------------------------------------------------------------

struct RecurrenceOpts {
    std::size_t d_F = 0;
    double c_min = 0.0, c_max = 0.0, delta_eps = 0.0, eps_rec = 0.0, hbar = 1.0;
    std::string out;
};

std::string run_recurrence(const RecurrenceOpts& o) {
    recurrence::RecurrenceInput in;
    in.d_F = o.d_F;
    in.c_min = o.c_min;
    in.c_max = o.c_max;
    in.delta_eps = o.delta_eps;
    in.eps_rec = o.eps_rec;
    in.hbar = o.hbar;
    const auto b = recurrence::recurrence_bounds(in);

    constexpr double kLn10 = 2.302585092994045684;
    json j;
    j["schema"] = kSchemaTag;
    j["t_minus"] = b.t_minus;
    j["t_plus"] = b.t_plus;
    j["log10_t_minus"] = b.ln_t_minus / kLn10;
    j["log10_t_plus"] = b.ln_t_plus / kLn10;
    j["note"] = "typical-case heuristic estimates, not certified bounds";
    return render_json(j);
}

// ---------------------------------------------------------------------------
// repro
// ---------------------------------------------------------------------------

struct ReproOpts {
    std::string id;
    std::string panel;
    std::uint64_t seed = 7;
    long long samples = 10000;
    long long burn_in = 1'000'000;
    long long thinning = 1'000;
    long long group_size = 0; // 0 = per-figure default
    std::string out, format = "csv";
    CLI::Option* oPanel = nullptr;
};

/// Canonical spatial setup for the lattice reproductions: a cold dilute gas
/// in the 100 x 100 box, lattice spacing well inside the resolution bound.
struct CanonicalLattice {
    thermo::CavityModel cav;
    thermo::ThermalState ts;
};

CanonicalLattice canonical_lattice() {
    CanonicalLattice c;
    c.cav.volume = 1.0e4;
    c.cav.linear_size = 100.0;
    c.cav.lattice_a = 1.2;
    const auto spec = thermo::SpectrumModel::continuous(c.cav.spectral_density());
    c.ts.T = 1.0;
    c.ts.mu = -2.0;
    c.ts.N = thermo::number_of(spec, c.ts.T, c.ts.mu);
    c.ts.E = thermo::energy_of(spec, c.ts.T, c.ts.mu);
    return c;
}

Table repro_fig4(const ReproOpts& o, long long E, long long N, long long default_group) {
    partitions::McmcConfig cfg;
    cfg.seed = o.seed;
    cfg.burn_in = o.burn_in;
    cfg.thinning = o.thinning;
    const long long group = o.group_size > 0 ? o.group_size : default_group;

    const auto stats = partitions::sample_ensemble(E, N, group, o.samples, cfg);
    const auto fit = partitions::fit_fermi_dirac(stats.mean_ratios, group);

    Table t;
    t.columns = {"m", "eps_m", "ratio_mean", "fd_fit"};
    for (std::size_t m = 0; m < stats.eps.size(); ++m)
        t.rows.push_back({json(static_cast<long long>(m + 1)), json(stats.eps[m]),
                          json(stats.mean_ratios[m]),
                          json(thermo::fermi_dirac(stats.eps[m], fit.T, fit.mu))});
    t.meta["E"] = E;
    t.meta["N"] = N;
    t.meta["group_size"] = group;
    t.meta["samples"] = o.samples;
    t.meta["seed"] = o.seed;
    t.meta["burn_in"] = o.burn_in;
    t.meta["thinning"] = o.thinning;
    t.meta["T"] = fit.T;
    t.meta["mu"] = fit.mu;
    t.meta["rms"] = fit.rms;
    return t;
}

Table repro_volume_law() {
    const auto c = canonical_lattice();
    Table t;
    t.columns = {"side", "n_sites", "entropy", "entropy_per_site", "formula_value", "gap"};
    for (const std::size_t side : {std::size_t{12}, std::size_t{20}, std::size_t{30}}) {
        const auto r = entanglement::doktorsky_check_2d(c.ts, c.cav, side);
        const auto n = static_cast<double>(side * side);
        t.rows.push_back({json(static_cast<long long>(side)),
                          json(static_cast<long long>(side * side)),
                          json(r.entropy_per_site * n), json(r.entropy_per_site),
                          json(r.formula_value), json(r.gap)});
    }
    t.meta["T"] = c.ts.T;
    t.meta["mu"] = c.ts.mu;
    t.meta["a"] = c.cav.lattice_a;
    return t;
}

Table repro_continuum_limit() {
    auto c = canonical_lattice();
    const double lam = thermo::thermal_wavelength(c.ts, c.cav);
    Table t;
    t.columns = {"a", "entropy_per_site", "density", "continuum", "rel_gap"};
    // Coarse spacings alias visibly; the gap shrinks through the sweep and
    // is far below the 1% mark by a = lambda_T / 10.
    for (const double f : {4.0, 3.0, 2.0, 1.5, 1.0, 0.5, 0.25, 0.1}) {
        c.cav.lattice_a = lam * f;
        const auto d = entanglement::ee_density(c.ts, c.cav);
        const double density = d.per_site / (c.cav.lattice_a * c.cav.lattice_a);
        t.rows.push_back({json(c.cav.lattice_a), json(d.per_site), json(density),
                          json(d.continuum),
                          json((density - d.continuum) / d.continuum)});
    }
    t.meta["T"] = c.ts.T;
    t.meta["mu"] = c.ts.mu;
    t.meta["thermal_wavelength"] = lam;
    return t;
}

Table repro_kinetics_relax() {
    const auto state =
        kinetics::KineticState::uniform(0.0, 1.0, double_step_occupations(64));
    const auto kernel = kinetics::CollisionKernel::flat(8, 1.0);
    Table t = kinetics_trace(state, kernel, 6.0e-4, 476, 1);
    t.meta["kernel_max"] = 8;
    t.meta["kernel_rate"] = 1.0;
    return t;
}

std::string run_repro(const ReproOpts& o) {
    std::string id = o.id;
    if (id == "fig4") {
        if (o.panel == "b") id = "fig4b";
        else if (o.panel == "d") id = "fig4d";
        else throw UsageError("repro fig4 requires --panel b or --panel d");
    } else if (o.oPanel->count() > 0) {
        throw UsageError("--panel only applies to the 'fig4' id");
    }

    Table t;
    if (id == "fig4b") t = repro_fig4(o, 21900, 200, 20);
    else if (id == "fig4d") t = repro_fig4(o, 87800, 400, 40);
    else if (id == "volume-law") t = repro_volume_law();
    else if (id == "continuum-limit") t = repro_continuum_limit();
    else if (id == "kinetics-relax") t = repro_kinetics_relax();
    else
        throw UsageError("unknown reproduction id '" + id +
                         "' (expected fig4b, fig4d, volume-law, continuum-limit, "
                         "kinetics-relax, or fig4 with --panel)");
    return render_table(t, o.format);
}

// ---------------------------------------------------------------------------
// Wiring
// ---------------------------------------------------------------------------

void add_out_option(CLI::App* cmd, std::string& out) {
    cmd->add_option("--out", out, "write the result to this file (atomic); default stdout");
}

void add_format_option(CLI::App* cmd, std::string& format) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

int run(int argc, char** argv) {
    validate_thread_cap();

    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config(std::move(args));
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());

    CLI::App app{"Equilibrium and relaxation observables of an ideal Fermi gas "
                 "in a chaotic two-dimensional cavity"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.add_option("--config", "JSON file of option values; overrides flags")
        ->type_name("FILE");

    std::string rendered;
    std::string out_path;

    // thermo solve
    auto* thermo_cmd = app.add_subcommand("thermo", "thermodynamics of a level spectrum");
    thermo_cmd->require_subcommand(1);
    ThermoSolveOpts ts_opts;
    {
        auto* solve = thermo_cmd->add_subcommand(
            "solve", "connect (T, mu) and (E, N) on a spectrum");
        solve->add_option("--levels", ts_opts.levels, "spectrum kind")
            ->required()
            ->check(CLI::IsMember({"harmonic", "continuous", "discrete"}));
        solve->add_option("--count", ts_opts.count, "harmonic tower size");
        ts_opts.oRho = solve->add_option("--rho", ts_opts.rho, "continuous spectral density");
        ts_opts.oFile = solve->add_option("--file", ts_opts.file,
                                          "discrete levels, one per line");
        ts_opts.oList = solve->add_option("--levels-list", ts_opts.levels_list,
                                          "discrete levels, comma-separated");
        ts_opts.thermal.attach(solve);
        add_out_option(solve, ts_opts.out);
        solve->callback([&] {
            rendered = run_thermo_solve(ts_opts);
            out_path = ts_opts.out;
        });
    }

    // partition sample / fit
    auto* partition_cmd =
        app.add_subcommand("partition", "random-partition block occupancies via MCMC");
    partition_cmd->require_subcommand(1);
    PartitionOpts ps_opts, pf_opts;
    {
        auto* sample = partition_cmd->add_subcommand(
            "sample", "mean and spread of block occupancies");
        attach_partition_opts(sample, ps_opts);
        add_out_option(sample, ps_opts.out);
        add_format_option(sample, ps_opts.format);
        sample->callback([&] {
            rendered = run_partition_sample(ps_opts);
            out_path = ps_opts.out;
        });

        auto* fit = partition_cmd->add_subcommand(
            "fit", "Fermi-Dirac fit of the sampled occupancies");
        attach_partition_opts(fit, pf_opts);
        add_out_option(fit, pf_opts.out);
        fit->callback([&] {
            rendered = run_partition_fit(pf_opts);
            out_path = pf_opts.out;
        });
    }

    // corr pair
    auto* corr_cmd = app.add_subcommand("corr", "relaxed correlation functions");
    corr_cmd->require_subcommand(1);
    CorrOpts corr_opts;
    {
        auto* pair = corr_cmd->add_subcommand("pair", "one-particle correlation");
        corr_opts.oSep = pair->add_option("--sep", corr_opts.sep, "point separation");
        corr_opts.oX1 = pair->add_option("--x1", corr_opts.x1, "first point x");
        corr_opts.oY1 = pair->add_option("--y1", corr_opts.y1, "first point y");
        corr_opts.oX2 = pair->add_option("--x2", corr_opts.x2, "second point x");
        corr_opts.oY2 = pair->add_option("--y2", corr_opts.y2, "second point y");
        corr_opts.cavity.attach(pair);
        corr_opts.thermal.attach(pair);
        add_out_option(pair, corr_opts.out);
        pair->callback([&] {
            rendered = run_corr_pair(corr_opts);
            out_path = corr_opts.out;
        });
    }

    // ee lattice
    auto* ee_cmd = app.add_subcommand("ee", "entanglement entropy of lattice subsystems");
    ee_cmd->require_subcommand(1);
    EeOpts ee_opts;
    {
        auto* lattice = ee_cmd->add_subcommand("lattice", "entropy of a lattice region");
        lattice->add_option("--shape", ee_opts.shape, "subsystem shape")
            ->required()
            ->check(CLI::IsMember({"chain", "square", "disk"}));
        ee_opts.oSide = lattice->add_option("--side", ee_opts.side, "square side (sites)");
        ee_opts.oLength =
            lattice->add_option("--length", ee_opts.length, "chain length (sites)");
        ee_opts.oRadius =
            lattice->add_option("--radius", ee_opts.radius, "disk radius (lattice units)");
        lattice->add_option("--a", ee_opts.a, "lattice spacing")->required();
        lattice->add_flag("--check-volume-law", ee_opts.check_volume_law,
                          "square only: add the symbol-entropy zone integral and gap");
        ee_opts.cavity.attach(lattice);
        ee_opts.thermal.attach(lattice);
        add_out_option(lattice, ee_opts.out);
        lattice->callback([&] {
            rendered = run_ee_lattice(ee_opts);
            out_path = ee_opts.out;
        });
    }

    // szego
    SzegoOpts sz_opts;
    {
        auto* szego = app.add_subcommand(
            "szego", "Toeplitz-determinant deviation sequence on chains");
        szego->add_option("--lambda", sz_opts.lambda, "test parameter");
        szego->add_option("--sizes", sz_opts.sizes, "chain sizes, comma-separated");
        szego->add_option("--a", sz_opts.a, "lattice spacing")->required();
        sz_opts.cavity.attach(szego);
        sz_opts.thermal.attach(szego);
        add_out_option(szego, sz_opts.out);
        add_format_option(szego, sz_opts.format);
        szego->callback([&] {
            rendered = run_szego(sz_opts);
            out_path = sz_opts.out;
        });
    }

    // kinetics run
    auto* kinetics_cmd =
        app.add_subcommand("kinetics", "collision-kernel relaxation on a level ladder");
    kinetics_cmd->require_subcommand(1);
    KineticsOpts kin_opts;
    {
        auto* kin_run = kinetics_cmd->add_subcommand("run", "integrate and trace relaxation");
        kin_run->add_option("--levels", kin_opts.levels, "ladder size (with --double-step)");
        kin_run->add_option("--eps0", kin_opts.eps0, "lowest level energy");
        kin_run->add_option("--spacing", kin_opts.spacing, "level spacing");
        kin_run->add_flag("--double-step", kin_opts.double_step,
                          "start from the two-block double-step occupation");
        kin_opts.oInit =
            kin_run->add_option("--init", kin_opts.init, "initial occupations, one per line");
        kin_run->add_option("--dt", kin_opts.dt, "time step")->required();
        kin_run->add_option("--steps", kin_opts.steps, "number of steps")->required();
        kin_run->add_option("--kernel-max", kin_opts.kernel_max,
                            "largest level transfer (0 = full ladder)");
        kin_run->add_option("--kernel-rate", kin_opts.kernel_rate, "flat kernel rate");
        kin_run->add_option("--record-every", kin_opts.record_every,
                            "keep every k-th step (first and last always kept)");
        add_out_option(kin_run, kin_opts.out);
        add_format_option(kin_run, kin_opts.format);
        kin_run->callback([&] {
            rendered = run_kinetics(kin_opts);
            out_path = kin_opts.out;
        });
    }

    // recurrence
    RecurrenceOpts rec_opts;
    {
        auto* rec = app.add_subcommand("recurrence", "typical-case recurrence-time window");
        rec->add_option("--dF", rec_opts.d_F, "number of active frequencies")->required();
        rec->add_option("--cmin", rec_opts.c_min, "smallest coefficient magnitude")->required();
        rec->add_option("--cmax", rec_opts.c_max, "largest coefficient magnitude")->required();
        rec->add_option("--deps", rec_opts.delta_eps, "RMS gap scale")->required();
        rec->add_option("--eps", rec_opts.eps_rec, "recurrence threshold")->required();
        rec->add_option("--hbar", rec_opts.hbar, "reduced Planck constant");
        add_out_option(rec, rec_opts.out);
        rec->callback([&] {
            rendered = run_recurrence(rec_opts);
            out_path = rec_opts.out;
        });
    }

    // repro
    ReproOpts rp_opts;
    {
        auto* repro = app.add_subcommand("repro", "canned end-to-end reproductions");
        repro->add_option("id", rp_opts.id,
                          "fig4b | fig4d | volume-law | continuum-limit | kinetics-relax "
                          "| fig4 (with --panel)")
            ->required();
        rp_opts.oPanel = repro->add_option("--panel", rp_opts.panel, "fig4 panel: b or d");
        repro->add_option("--seed", rp_opts.seed, "RNG seed");
        repro->add_option("--samples", rp_opts.samples, "retained MCMC samples");
        repro->add_option("--burn-in", rp_opts.burn_in, "MCMC burn-in proposals");
        repro->add_option("--thinning", rp_opts.thinning, "MCMC thinning");
        repro->add_option("--group-size", rp_opts.group_size,
                          "levels per block (0 = per-figure default)");
        add_out_option(repro, rp_opts.out);
        add_format_option(repro, rp_opts.format);
        repro->callback([&] {
            rendered = run_repro(rp_opts);
            out_path = rp_opts.out;
        });
    }

    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    deliver(rendered, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 64;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
