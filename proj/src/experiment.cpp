#include "aclab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "aclab/analysis.hpp"
#include "aclab/ansatz.hpp"
#include "aclab/csv.hpp"
#include "aclab/errors.hpp"
#include "aclab/eta.hpp"
#include "aclab/picard.hpp"
#include "aclab/profile.hpp"
#include "aclab/toda.hpp"

#ifndef ACLAB_VERSION
#define ACLAB_VERSION "unknown"
#endif

namespace aclab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_version() { return ACLAB_VERSION; }

// ---------------------------------------------------------------------------------------------
// Field registry shared by the parser, the JSON dump and the defaults printer.

namespace {

struct Field {
    std::string section;
    std::string key;
    std::string help;
    std::function<void(const std::string&)> set;
    std::function<std::string()> text;
    std::function<json()> value;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& name, const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(name, "expected a number, got '" + s + "'");
    }
    if (used != s.size()) throw ConfigError(name, "expected a number, got '" + s + "'");
    return v;
}

long long parse_integer(const std::string& name, const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(name, "expected an integer, got '" + s + "'");
    }
    if (used != s.size()) throw ConfigError(name, "expected an integer, got '" + s + "'");
    return v;
}

std::string number_text(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Field real(const char* sec, const char* key, double& ref, const char* help) {
    const std::string name = std::string(sec) + "." + key;
    return {sec, key, help, [&ref, name](const std::string& s) { ref = parse_double(name, s); },
            [&ref] { return number_text(ref); }, [&ref] { return json(ref); }};
}

Field integer(const char* sec, const char* key, int& ref, const char* help) {
    const std::string name = std::string(sec) + "." + key;
    return {sec, key, help,
            [&ref, name](const std::string& s) {
                const long long v = parse_integer(name, s);
                if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(name, "out of range");
                ref = static_cast<int>(v);
            },
            [&ref] { return std::to_string(ref); }, [&ref] { return json(ref); }};
}

Field seed_field(const char* sec, const char* key, std::uint64_t& ref, const char* help) {
    const std::string name = std::string(sec) + "." + key;
    return {sec, key, help,
            [&ref, name](const std::string& s) {
                const long long v = parse_integer(name, s);
                if (v < 0) throw ConfigError(name, "must be nonnegative");
                ref = static_cast<std::uint64_t>(v);
            },
            [&ref] { return std::to_string(ref); }, [&ref] { return json(ref); }};
}

Field text(const char* sec, const char* key, std::string& ref, const char* help) {
    return {sec, key, help, [&ref](const std::string& s) { ref = trim(s); }, [&ref] { return ref; },
            [&ref] { return json(ref); }};
}

Field flag(const char* sec, const char* key, bool& ref, const char* help) {
    const std::string name = std::string(sec) + "." + key;
    return {sec, key, help,
            [&ref, name](const std::string& raw) {
                const std::string s = trim(raw);
                if (s == "true" || s == "1" || s == "yes") ref = true;
                else if (s == "false" || s == "0" || s == "no") ref = false;
                else throw ConfigError(name, "expected true or false, got '" + s + "'");
            },
            [&ref] { return std::string(ref ? "true" : "false"); }, [&ref] { return json(ref); }};
}

Field list(const char* sec, const char* key, std::vector<double>& ref, const char* help) {
    const std::string name = std::string(sec) + "." + key;
    return {sec, key, help,
            [&ref, name](const std::string& s) {
                ref.clear();
                std::stringstream ss(s);
                for (std::string item; std::getline(ss, item, ',');)
                    if (!trim(item).empty()) ref.push_back(parse_double(name, item));
            },
            [&ref] {
                std::string out;
                for (std::size_t i = 0; i < ref.size(); ++i) out += (i ? ", " : "") + number_text(ref[i]);
                return out;
            },
            [&ref] { return json(ref); }};
}

std::vector<Field> registry(ExperimentConfig& c) {
    return {
        text("run", "scenario", c.scenario, "constants | eta | toda | picard | pde | end2end | rescale"),
        text("run", "output_dir", c.output_dir, "run directory (created if missing)"),
        seed_field("run", "seed", c.seed, "seed for the initial-data perturbation"),
        integer("run", "k", c.k, "number of layers, 1..10"),
        integer("run", "n", c.n, "spatial dimension, 2..8"),
        real("constants", "quad_tol", c.constants.quad_tol, "quadrature tolerance for beta, (0, 1e-6]"),
        real("eta", "t_end", c.eta.t_end, "eta is solved on [-t_end, -1], t_end >= 10"),
        real("eta", "rel_tol", c.eta.rel_tol, "integrator tolerance, (0, 1e-8]"),
        integer("eta", "samples_per_decade", c.eta.samples_per_decade, "rows per decade in eta.csv"),
        real("toda", "t_start", c.toda.t_start, "time of the first approximation"),
        real("toda", "t_stop", c.toda.t_stop, "end of the integration (either side of t_start)"),
        real("toda", "rel_tol", c.toda.rel_tol, "integrator tolerance"),
        real("toda", "gap_floor", c.toda.gap_floor, "collision threshold on consecutive gaps"),
        integer("toda", "samples_per_decade", c.toda.samples_per_decade, "output rows per decade of |t|"),
        real("picard", "t0", c.picard.t0, "data are zero at t = -t0"),
        real("picard", "t_end", c.picard.t_end, "iteration window is [-t_end, -t0]"),
        integer("picard", "nodes_per_decade", c.picard.nodes_per_decade, "log-grid density, >= 32"),
        integer("picard", "max_iters", c.picard.max_iters, "iteration cap"),
        real("picard", "tol", c.picard.tol, "sup-norm change that counts as converged"),
        flag("picard", "include_nonlinear", c.picard.include_nonlinear,
             "add curvature and interaction remainders to the forcing"),
        list("picard", "threshold_candidates", c.picard.threshold_candidates,
             "ascending T0 values scanned for contraction"),
        real("pde", "t_start", c.pde.t_start, "initial time (ansatz seeded here)"),
        real("pde", "t_stop", c.pde.t_stop, "final time, t_start < t_stop < 0"),
        real("pde", "h", c.pde.h, "cell width"),
        real("pde", "dt", c.pde.dt, "time step, <= 0.25"),
        text("pde", "scheme", c.pde.scheme, "imex | cn-heun"),
        real("pde", "margin", c.pde.margin, "r_max = outermost radius + margin"),
        real("pde", "track_interval", c.pde.track_interval, "time between interface extractions"),
        real("pde", "snapshot_interval", c.pde.snapshot_interval, "0 writes only the final field"),
        real("pde", "perturbation", c.pde.perturbation, "uniform noise amplitude on the initial data, [0, 0.5]"),
        real("ansatz", "sigma", c.ansatz.sigma, "weight exponent, inside (sqrt(2)/2, sqrt(2))"),
        flag("ansatz", "symmetric_weight", c.ansatz.symmetric_weight,
             "innermost band uses both exponentials"),
        list("ansatz", "bound_times", c.ansatz.bound_times, "times at which the error bound is evaluated"),
        real("rescale", "epsilon", c.rescale.epsilon, "scale factor, (0, 1]"),
        real("rescale", "t_start", c.rescale.t_start, "unscaled start time"),
        real("rescale", "t_stop", c.rescale.t_stop, "unscaled stop time"),
    };
}

const std::set<std::string> kScenarios = {"constants", "eta", "toda", "picard", "pde", "end2end", "rescale"};

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

}  // namespace

void ExperimentConfig::validate() const {
    require(kScenarios.count(scenario) == 1, "run.scenario",
            "unknown scenario '" + scenario + "' (constants, eta, toda, picard, pde, end2end, rescale)");
    require(!output_dir.empty(), "run.output_dir", "must not be empty");
    require(k >= 1 && k <= 10, "run.k", "must lie in 1..10");
    require(n >= 2 && n <= 8, "run.n", "must lie in 2..8");

    require(constants.quad_tol > 0.0 && constants.quad_tol <= 1e-6, "constants.quad_tol",
            "must lie in (0, 1e-6]");

    require(eta.t_end >= 10.0, "eta.t_end", "must be at least 10");
    require(eta.rel_tol > 0.0 && eta.rel_tol <= 1e-8, "eta.rel_tol", "must lie in (0, 1e-8]");
    require(eta.samples_per_decade >= 1, "eta.samples_per_decade", "must be positive");

    require(toda.t_start < 0.0 && toda.t_stop < 0.0, "toda.t_start", "times must be negative");
    require(toda.t_start != toda.t_stop, "toda.t_stop", "must differ from toda.t_start");
    require(std::max(-toda.t_start, -toda.t_stop) <= eta.t_end, "eta.t_end",
            "must cover the Toda window");
    require(std::min(-toda.t_start, -toda.t_stop) >= 1.0, "toda.t_start", "eta is defined for t <= -1");
    require(toda.rel_tol > 0.0 && toda.rel_tol <= 1e-6, "toda.rel_tol", "must lie in (0, 1e-6]");
    require(toda.gap_floor > 0.0, "toda.gap_floor", "must be positive");
    require(toda.samples_per_decade >= 1, "toda.samples_per_decade", "must be positive");

    require(picard.t0 > 1.0, "picard.t0", "must exceed 1");
    require(picard.t_end > picard.t0, "picard.t_end", "must exceed picard.t0");
    require(picard.t_end <= eta.t_end, "eta.t_end", "must cover picard.t_end");
    require(picard.nodes_per_decade >= 32, "picard.nodes_per_decade", "must be at least 32");
    require(picard.max_iters >= 1, "picard.max_iters", "must be positive");
    require(picard.tol > 0.0, "picard.tol", "must be positive");
    for (std::size_t i = 0; i < picard.threshold_candidates.size(); ++i) {
        require(picard.threshold_candidates[i] > 1.0, "picard.threshold_candidates", "entries must exceed 1");
        require(i == 0 || picard.threshold_candidates[i] > picard.threshold_candidates[i - 1],
                "picard.threshold_candidates", "must be strictly ascending");
    }

    require(pde.t_start < pde.t_stop && pde.t_stop < 0.0, "pde.t_stop", "need t_start < t_stop < 0");
    require(k == 1 || -pde.t_start <= eta.t_end, "eta.t_end", "must cover pde.t_start");
    require(k == 1 || -pde.t_start >= 1.0, "pde.t_start", "eta is defined for t <= -1");
    require(pde.h > 0.0 && pde.h <= 0.5, "pde.h", "must lie in (0, 0.5]");
    require(pde.dt > 0.0 && pde.dt <= 0.25, "pde.dt", "must lie in (0, 0.25]");
    require(pde.scheme == "imex" || pde.scheme == "cn-heun", "pde.scheme", "expected imex or cn-heun");
    require(pde.margin >= 5.0, "pde.margin", "must be at least 5");
    require(pde.track_interval > 0.0, "pde.track_interval", "must be positive");
    require(pde.snapshot_interval >= 0.0, "pde.snapshot_interval", "must be nonnegative");
    require(pde.perturbation >= 0.0 && pde.perturbation <= 0.5, "pde.perturbation", "must lie in [0, 0.5]");

    char window[160];
    std::snprintf(window, sizeof window,
                  "sigma = %g lies outside the window (sqrt(2)/2, sqrt(2)) = (%.6f, %.6f)",
                  ansatz.sigma, kSqrt2 / 2.0, kSqrt2);
    require(ansatz.sigma > kSqrt2 / 2.0 && ansatz.sigma < kSqrt2, "ansatz.sigma", window);
    for (double t : ansatz.bound_times) {
        require(t <= -1.0, "ansatz.bound_times", "entries must be <= -1");
        require(-t <= eta.t_end, "eta.t_end", "must cover ansatz.bound_times");
    }

    require(rescale.epsilon > 0.0 && rescale.epsilon <= 1.0, "rescale.epsilon", "must lie in (0, 1]");
    require(rescale.t_start < rescale.t_stop && rescale.t_stop < 0.0, "rescale.t_stop",
            "need t_start < t_stop < 0");
    require(k == 1 || -rescale.t_start <= eta.t_end, "eta.t_end", "must cover rescale.t_start");
    require(k == 1 || -rescale.t_start >= 1.0, "rescale.t_start", "eta is defined for t <= -1");
    require(pde.dt <= 0.25 * rescale.epsilon * rescale.epsilon, "pde.dt",
            "the scaled run needs dt * epsilon^-2 <= 0.25");
}

json ExperimentConfig::to_json() const {
    ExperimentConfig copy = *this;
    json out = json::object();
    for (const auto& f : registry(copy)) out[f.section][f.key] = f.value();
    return out;
}

ExperimentConfig parse_config(const std::string& ini_text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(ini_text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config", std::string("malformed INI: ") + e.message() + " (line " +
                                        std::to_string(e.line()) + ")");
    }
    ExperimentConfig cfg;
    auto fields = registry(cfg);
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(section, "top-level keys must live inside a [section]");
        for (const auto& [key, value] : body) {
            auto it = std::find_if(fields.begin(), fields.end(),
                                   [&](const Field& f) { return f.section == section && f.key == key; });
            if (it == fields.end()) throw ConfigError(section + "." + key, "unknown setting");
            it->set(value.data());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string default_config_text() {
    ExperimentConfig cfg;
    std::ostringstream os;
    os << "; aclab experiment configuration (defaults)\n";
    std::string current;
    for (const auto& f : registry(cfg)) {
        if (f.section != current) {
            os << (current.empty() ? "" : "\n") << "[" << f.section << "]\n";
            current = f.section;
        }
        os << "; " << f.help << "\n" << f.key << " = " << f.text() << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------------------------
// Scenario helpers.

namespace {

json track_json(const InterfaceTrack& tr) {
    return {{"times", tr.times}, {"radii", tr.radii}, {"truncated", tr.truncated},
            {"truncated_at", tr.truncated_at}};
}

CsvTable track_table(const InterfaceTrack& tr, int k) {
    CsvTable t;
    t.header.push_back("t");
    for (int j = 1; j <= k; ++j) t.header.push_back("rho_" + std::to_string(j));
    for (std::size_t m = 0; m < tr.size(); ++m) {
        std::vector<double> row{tr.times[m]};
        row.insert(row.end(), tr.radii[m].begin(), tr.radii[m].end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<double> log_samples(double t_a, double t_b, int per_decade) {
    const double la = std::log10(-t_a), lb = std::log10(-t_b);
    const int count = std::max(2, static_cast<int>(std::ceil(std::abs(lb - la) * per_decade)) + 1);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = -std::pow(10.0, la + (lb - la) * i / (count - 1));
    out.front() = t_a;
    out.back() = t_b;
    return out;
}

struct Context {
    const ExperimentConfig& cfg;
    fs::path dir;
    std::vector<std::string> outputs;
    std::optional<InteractionConstants> beta_cache;
    std::optional<EtaSolution> eta_cache;
    json run_stats = json::object();  ///< bookkeeping that belongs in the manifest, not the report

    double beta() {
        if (!beta_cache) beta_cache = compute_beta(cfg.constants.quad_tol);
        return beta_cache->beta;
    }
    const EtaSolution& eta() {
        if (!eta_cache) eta_cache = solve_eta(cfg.eta.t_end, cfg.eta.rel_tol);
        return *eta_cache;
    }
    void csv(const std::string& name, const CsvTable& table) {
        const fs::path p = dir / name;
        fs::create_directories(p.parent_path());
        write_csv(p, table);
        outputs.push_back(name);
    }
    std::vector<double> initial_layers(double t) {
        const TodaConstants c = toda_constants(cfg.k, beta());
        if (cfg.k == 1) return {shrinking_sphere(cfg.n, t)};
        return first_approximation(cfg.n, c, eta(), t).rho;
    }
};

json scenario_constants(Context& ctx) {
    ctx.beta();
    const auto& ic = *ctx.beta_cache;
    const TodaConstants c = toda_constants(ctx.cfg.k, ic.beta);
    json r = {{"beta", ic.beta},
              {"i_kinetic", ic.i_kinetic},
              {"i_tail", ic.i_tail},
              {"truncation", ic.truncation},
              {"beta_closed_form", 12.0 * kSqrt2},
              {"beta_relative_error", std::abs(ic.beta - 12.0 * kSqrt2) / (12.0 * kSqrt2)},
              {"b", c.b},
              {"gamma", c.gamma}};
    if (ctx.cfg.k >= 2) {
        const ReductionMatrices rm = reduction_matrices(ctx.cfg.k);
        r["reduction"] = {{"C_eigenvalues", rm.C_eigs}, {"A_eigenvalues", rm.A_eigs}, {"a", rm.a}};
    }
    return r;
}

json scenario_eta(Context& ctx) {
    const EtaSolution& eta = ctx.eta();
    const double t_end = ctx.cfg.eta.t_end;
    CsvTable table{{"t", "eta", "asymptote", "upper_bound", "relative_residual"}, {}};
    for (double t : log_samples(-10.0, -t_end, ctx.cfg.eta.samples_per_decade))
        table.rows.push_back({t, eta.value(t), EtaSolution::asymptote(t), EtaSolution::upper_bound(t),
                              eta.relative_residual(t)});
    ctx.csv("eta.csv", table);
    json probes = json::array();
    for (double a = 1e2; a <= t_end * (1 + 1e-12); a *= 10.0) probes.push_back({{"t", -a}, {"eta", eta.value(-a)}});
    json r = {{"max_midpoint_residual", eta.max_midpoint_residual()},
              {"accepted_steps", eta.dense().accepted_steps()},
              {"probes", probes}};
    if (t_end >= 1e3) r["asymptotic_offset"] = eta.asymptotic_offset(-t_end, -1e3);
    return r;
}

json gap_report(const InterfaceTrack& tr, const TodaConstants& c, const EtaSolution& eta) {
    double all = 0.0, late = 0.0;
    for (std::size_t m = 0; m < tr.size(); ++m) {
        const double e = eta.value(tr.times[m]);
        for (int j = 0; j + 1 < c.k; ++j) {
            const double dev = std::abs(tr.radii[m][j + 1] - tr.radii[m][j] - (e + c.b[j]));
            all = std::max(all, dev);
            if (tr.times[m] <= -1e3) late = std::max(late, dev);
        }
    }
    return {{"max_abs_all", all}, {"max_abs_t_le_minus_1000", late}};
}

json fit_json(const InterfaceTrack& tr, int n, int k) {
    try {
        const AsymptoticFit f = fit_theorem12(tr, n, k);
        return {{"slopes", f.slopes},           {"intercepts", f.intercepts},
                {"slope_stderr", f.slope_stderr}, {"residual_rms", f.residual_rms},
                {"window", {f.window_lo, f.window_hi}}, {"samples", f.samples}};
    } catch (const WindowTooShort& e) {
        return {{"error", e.what()}};
    }
}

/// Backward (or forward) Toda run from the first approximation at toda.t_start.
json toda_block(Context& ctx, const std::string& csv_name, InterfaceTrack* out_track) {
    const auto& cfg = ctx.cfg;
    const double beta = ctx.beta();
    const TodaConstants c = toda_constants(cfg.k, beta);
    LayerState start = first_approximation(cfg.n, c, ctx.eta(), cfg.toda.t_start);
    TodaOptions opt;
    opt.rel_tol = cfg.toda.rel_tol;
    opt.abs_tol = cfg.toda.rel_tol;
    opt.gap_floor = cfg.toda.gap_floor;
    opt.sample_times = log_samples(cfg.toda.t_start, cfg.toda.t_stop, cfg.toda.samples_per_decade);
    json r;
    try {
        const auto states = integrate_toda(cfg.n, beta, start, cfg.toda.t_stop, opt);
        InterfaceTrack tr = track_from_states(states);
        ctx.csv(csv_name, track_table(tr, cfg.k));
        r["track"] = track_json(tr);
        r["fit"] = fit_json(tr, cfg.n, cfg.k);
        if (cfg.k >= 2) r["gap_deviation"] = gap_report(tr, c, ctx.eta());
        r["collision"] = nullptr;
        if (out_track) *out_track = std::move(tr);
    } catch (const CollisionError& e) {
        r["collision"] = {{"time", e.time()}, {"layer", e.layer()}, {"message", e.what()}};
    }
    return r;
}

json scenario_picard(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const TodaConstants c = toda_constants(cfg.k, ctx.beta());
    PicardOptions opt;
    opt.nodes_per_decade = cfg.picard.nodes_per_decade;
    opt.max_iters = cfg.picard.max_iters;
    opt.tol = cfg.picard.tol;
    opt.include_nonlinear = cfg.picard.include_nonlinear;

    std::vector<double> cands;
    for (double t0 : cfg.picard.threshold_candidates)
        if (t0 < cfg.picard.t_end) cands.push_back(t0);
    const double threshold = picard_threshold(cfg.n, c, ctx.eta(), cands, cfg.picard.t_end, opt);
    json damping = json::array();
    for (double t0 : cands)
        damping.push_back({{"t0", t0}, {"value", damping_factor(ctx.eta(), t0, cfg.picard.t_end, 0.5)}});

    const PicardResult res = picard_correction(cfg.n, c, ctx.eta(), cfg.picard.t0, cfg.picard.t_end, opt);
    CsvTable table;
    table.header.push_back("t");
    for (int j = 1; j <= cfg.k; ++j) table.header.push_back("h_" + std::to_string(j));
    table.header.push_back("envelope");
    for (std::size_t m = 0; m < res.times.size(); ++m) {
        std::vector<double> row{res.times[m]};
        row.insert(row.end(), res.h[m].begin(), res.h[m].end());
        row.push_back(res.envelope[m]);
        table.rows.push_back(std::move(row));
    }
    ctx.csv("picard_h.csv", table);
    return {{"converged", res.converged},
            {"iterations", res.iterations},
            {"changes", res.changes},
            {"max_contraction_ratio", res.max_contraction_ratio},
            {"threshold_t0", threshold},
            {"delta", res.delta},
            {"mode_rates", res.mode_rates},
            {"damping_factor", damping},
            {"envelope_fit",
             {{"coefficient", res.envelope_fit.coefficient},
              {"relative_rms", res.envelope_fit.relative_rms},
              {"samples", res.envelope_fit.samples}}}};
}

struct PdeRun {
    EvolveResult result;
    std::vector<double> initial_layers;
};

PdeRun run_pde(Context& ctx, const std::string& prefix) {
    const auto& cfg = ctx.cfg;
    PdeRun run;
    run.initial_layers = ctx.initial_layers(cfg.pde.t_start);
    const auto grid = RadialGrid::with_spacing(cfg.n, run.initial_layers.back() + cfg.pde.margin, cfg.pde.h);
    const MultiLayerAnsatz ansatz(run.initial_layers);
    RadialField init = RadialField::sample(grid, cfg.pde.t_start, [&](double r) { return evaluate_z(ansatz, r); });
    if (cfg.pde.perturbation > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> noise(-cfg.pde.perturbation, cfg.pde.perturbation);
        for (double& v : init.u) v = std::clamp(v + noise(rng), -1.0, 1.0);
    }
    SolverConfig sc;
    sc.dt = cfg.pde.dt;
    sc.scheme = time_scheme_from_string(cfg.pde.scheme);
    sc.outer_value = far_field_value(cfg.k);
    EvolveOptions eo;
    eo.expected_k = cfg.k;
    eo.track_interval = cfg.pde.track_interval;
    eo.snapshot_interval = cfg.pde.snapshot_interval;
    eo.stop_on_interface_change = true;
    run.result = evolve(init, sc, cfg.pde.t_stop, eo);
    ctx.run_stats[prefix + "steps"] = run.result.steps;

    const auto field_table = [](const RadialField& f) {
        CsvTable t{{"r", "u"}, {}};
        for (std::size_t i = 0; i < f.u.size(); ++i) t.rows.push_back({f.grid->nodes[i], f.u[i]});
        return t;
    };
    for (std::size_t s = 0; s < run.result.snapshots.size(); ++s) {
        char name[64];
        std::snprintf(name, sizeof name, "%ssnapshots/u_%05zu.csv", prefix.c_str(), s);
        ctx.csv(name, field_table(run.result.snapshots[s]));
    }
    ctx.csv(prefix + "final_field.csv", field_table(run.result.final_field));
    ctx.csv(prefix + "interfaces.csv", track_table(run.result.track, cfg.k));
    CsvTable norms{{"t", "min_u", "max_u", "far_field"}, {}};
    for (const auto& ns : run.result.norms) norms.rows.push_back({ns.t, ns.min_u, ns.max_u, ns.far_field});
    ctx.csv(prefix + "norms.csv", norms);
    return run;
}

json pde_block(Context& ctx, const PdeRun& run) {
    const auto& cfg = ctx.cfg;
    const auto& res = run.result;
    json r;
    r["track"] = track_json(res.track);
    r["max_overshoot"] = res.max_overshoot;
    double far_dev = 0.0;
    for (const auto& ns : res.norms) far_dev = std::max(far_dev, std::abs(ns.far_field - far_field_value(cfg.k)));
    r["far_field_max_deviation"] = far_dev;

    const McfResidual mr = mcf_residual(res.track, cfg.n);
    std::vector<double> worst(cfg.k, 0.0);
    for (std::size_t i = 0; i < mr.times.size(); ++i)
        for (int j = 0; j < cfg.k; ++j) {
            const double curv = (cfg.n - 1) / res.track.radii[i + 2][j];
            worst[j] = std::max(worst[j], std::abs(mr.residual[i][j]) / curv);
        }
    r["mcf_relative_residual_max"] = worst;
    if (res.track.size() >= 4) {
        const SphereFit sf = fit_sphere_constant(res.track, cfg.n, 4, 0);
        r["sphere_fit"] = {{"c", sf.c}, {"window_c", sf.window_c}, {"drift", sf.drift}, {"log_slope", sf.log_slope}};
    }
    if (!res.track.radii.empty()) {
        const ProjectionDiagnostics pd = project_residual(res.final_field, res.track.radii.back(), cfg.n);
        r["projection"] = {{"projections", pd.projections},
                           {"max_offdiag_ratio", pd.max_offdiag_ratio},
                           {"diagonally_dominant", pd.diagonally_dominant}};
    }
    return r;
}

json error_bound_block(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double beta = ctx.beta();
    const TodaConstants c = toda_constants(cfg.k, beta);
    json rows = json::array();
    double lo = INFINITY, hi = 0.0;
    for (double t : cfg.ansatz.bound_times) {
        const LayerState s = first_approximation(cfg.n, c, ctx.eta(), t);
        const auto vel = toda_rhs(cfg.n, beta, s.rho);
        const WeightFunction wf(cfg.ansatz.sigma, s.rho, ctx.eta().value(t), cfg.ansatz.symmetric_weight);
        std::vector<double> nodes;
        for (double r = 0.005; r < s.rho.back() + 40.0; r += 0.01) nodes.push_back(r);
        const ErrorBound eb = check_error_bound(MultiLayerAnsatz(s.rho), vel, wf, cfg.n, nodes);
        rows.push_back({{"t", t}, {"constant", eb.constant}, {"r", eb.r_at}});
        lo = std::min(lo, eb.constant);
        hi = std::max(hi, eb.constant);
    }
    return {{"samples", rows}, {"variation_ratio", rows.empty() ? 0.0 : hi / lo}};
}

json scenario_end2end(Context& ctx) {
    const auto& cfg = ctx.cfg;
    json r;
    r["toda"] = toda_block(ctx, "toda_track.csv", nullptr);
    const PdeRun run = run_pde(ctx, "pde/");
    r["pde"] = pde_block(ctx, run);

    // Truncated Toda system over the PDE window from the same initial layers.
    TodaOptions opt;
    opt.rel_tol = cfg.toda.rel_tol;
    opt.abs_tol = cfg.toda.rel_tol;
    opt.gap_floor = cfg.toda.gap_floor;
    opt.sample_times = run.result.track.times;
    if (run.result.track.size() < 2) {
        r["comparison"] = {{"error", "PDE track has fewer than two samples"}};
        r["error_bound"] = error_bound_block(ctx);
        return r;
    }
    try {
        const auto states = integrate_toda(cfg.n, ctx.beta(), {cfg.pde.t_start, run.initial_layers},
                                           run.result.track.times.back(), opt);
        const InterfaceTrack toda = track_from_states(states);
        ctx.csv("toda_forward.csv", track_table(toda, cfg.k));
        const TrackComparison cmp = compare_pde_vs_toda(run.result.track, toda);
        CsvTable table;
        table.header.push_back("t");
        for (int j = 1; j <= cfg.k; ++j) table.header.push_back("layer_error_" + std::to_string(j));
        for (int j = 1; j < cfg.k; ++j) table.header.push_back("gap_error_" + std::to_string(j));
        for (std::size_t m = 0; m < cmp.times.size(); ++m) {
            std::vector<double> row{cmp.times[m]};
            row.insert(row.end(), cmp.layer_error[m].begin(), cmp.layer_error[m].end());
            row.insert(row.end(), cmp.gap_error[m].begin(), cmp.gap_error[m].end());
            table.rows.push_back(std::move(row));
        }
        ctx.csv("comparison.csv", table);
        r["comparison"] = {{"max_layer_error", cmp.max_layer_error}, {"max_gap_error", cmp.max_gap_error}};
    } catch (const CollisionError& e) {
        r["comparison"] = {{"collision", {{"time", e.time()}, {"layer", e.layer()}, {"message", e.what()}}}};
    }
    r["error_bound"] = error_bound_block(ctx);
    return r;
}

json scenario_rescale(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double eps = cfg.rescale.epsilon;
    const std::vector<double> layers = ctx.initial_layers(cfg.rescale.t_start);
    const MultiLayerAnsatz ansatz(layers);
    const double r_max = layers.back() + cfg.pde.margin;
    const TimeScheme scheme = time_scheme_from_string(cfg.pde.scheme);

    // Unscaled problem in variables (x, t); the scaled one lives at (eps x, eps^2 t).
    auto run = [&](double h, double dt, double e) {
        const auto grid = RadialGrid::with_spacing(cfg.n, e * r_max, h);
        RadialField f = RadialField::sample(grid, e * e * cfg.rescale.t_start,
                                            [&](double y) { return evaluate_z(ansatz, y / e); });
        SolverConfig sc;
        sc.dt = dt;
        sc.scheme = scheme;
        sc.outer_value = far_field_value(cfg.k);
        sc.reaction_scale = 1.0 / (e * e);
        EvolveOptions eo;
        eo.expected_k = cfg.k;
        eo.track_interval = e * e * (cfg.rescale.t_stop - cfg.rescale.t_start);
        return evolve(f, sc, e * e * cfg.rescale.t_stop, eo).final_field;
    };
    const double h = cfg.pde.h, dt = cfg.pde.dt;
    const RadialField a = run(h, dt, 1.0);
    const RadialField fine = run(0.5 * h, 0.25 * dt, 1.0);
    const RadialField scaled = run(h, dt, eps);
    const RadialField matched = run(eps * h, eps * eps * dt, eps);

    const double raw = rescale_check(a, fine, 1.0).max_abs;
    // Richardson: the error at (h, dt) is 4/3 of the (h, dt) vs (h/2, dt/4) difference.
    const double err = raw * 4.0 / 3.0;
    const RescaleDiscrepancy d = rescale_check(a, scaled, eps);
    const RescaleDiscrepancy dm = rescale_check(a, matched, eps);
    CsvTable table{{"x", "u", "u_scaled_at_eps_x"}, {}};
    for (std::size_t i = 0; i < a.u.size(); ++i) {
        const double x = eps * a.grid->nodes[i];
        if (x < scaled.grid->nodes.front() || x > scaled.grid->nodes.back()) continue;
        table.rows.push_back({a.grid->nodes[i], a.u[i], interpolate(scaled, x)});
    }
    ctx.csv("rescale.csv", table);
    return {{"epsilon", eps},
            {"discrepancy", d.max_abs},
            {"discrepancy_at_x", d.worst_x},
            {"matched_grid_discrepancy", dm.max_abs},
            {"refinement_difference", raw},
            {"discretization_error", err},
            {"ratio", err > 0.0 ? d.max_abs / err : 0.0},
            {"within_factor_5", d.max_abs <= 5.0 * err}};
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg) {
    RunOutcome out;
    out.directory = cfg.output_dir;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        out.exit_code = 2;
        out.message = std::string("config error: ") + e.what();
        return out;
    }
    const auto start = std::chrono::steady_clock::now();
    Context ctx{cfg, cfg.output_dir, {}, {}, {}};
    json report = {{"scenario", cfg.scenario}, {"k", cfg.k}, {"n", cfg.n}};
    try {
        fs::create_directories(ctx.dir);
        json body;
        if (cfg.scenario == "constants") body = scenario_constants(ctx);
        else if (cfg.scenario == "eta") body = scenario_eta(ctx);
        else if (cfg.scenario == "toda") body = toda_block(ctx, "trajectory.csv", nullptr);
        else if (cfg.scenario == "picard") body = scenario_picard(ctx);
        else if (cfg.scenario == "pde") body = pde_block(ctx, run_pde(ctx, ""));
        else if (cfg.scenario == "end2end") body = scenario_end2end(ctx);
        else body = scenario_rescale(ctx);
        report.update(body);
        if (ctx.beta_cache) report["beta"] = ctx.beta_cache->beta;
        write_json(ctx.dir / "report.json", report);
        ctx.outputs.push_back("report.json");
        out.message = "ok";
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.message = e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"code_version", code_version()},
                     {"scenario", cfg.scenario},
                     {"config", cfg.to_json()},
                     {"outputs", ctx.outputs},
                     {"run_stats", ctx.run_stats},
                     {"exit_code", out.exit_code},
                     {"message", out.message},
                     {"wall_time_seconds", wall}};
    try {
        fs::create_directories(ctx.dir);
        write_json(ctx.dir / "manifest.json", manifest);
    } catch (const std::exception& e) {
        if (out.exit_code == 0) {
            out.exit_code = 1;
            out.message = e.what();
        }
    }
    out.report = std::move(report);
    return out;
}

std::vector<RunOutcome> run_experiments(const std::vector<ExperimentConfig>& configs, int jobs) {
    std::set<fs::path> dirs;
    for (const auto& c : configs)
        if (!dirs.insert(fs::weakly_canonical(c.output_dir)).second)
            throw ConfigError("run.output_dir", "two configurations share " + c.output_dir);
    std::vector<RunOutcome> outcomes(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) outcomes[i] = run_experiment(configs[i]);
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, configs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return outcomes;
}

// ---------------------------------------------------------------------------------------------
// Report comparison and plot data.

namespace {

json load_report(const fs::path& p) {
    const fs::path file = fs::is_directory(p) ? p / "report.json" : p;
    std::ifstream in(file);
    if (!in) throw SchemaMismatch("cannot read report " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaMismatch("report " + file.string() + " is not valid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("scenario") || !j["scenario"].is_string())
        throw SchemaMismatch("report " + file.string() + " has no scenario field");
    return j;
}

void diff_walk(const std::string& path, const std::string& leaf, const json& a, const json& b,
               const CompareOptions& opt, std::vector<DiffEntry>& out) {
    auto tol_for = [&]() {
        if (auto it = opt.field_tols.find(path); it != opt.field_tols.end()) return it->second;
        if (auto it = opt.field_tols.find(leaf); it != opt.field_tols.end()) return it->second;
        return opt.tol;
    };
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        const double tol = tol_for();
        const double d = std::abs(x - y);
        if (d > tol || (std::isnan(x) != std::isnan(y))) {
            std::ostringstream os;
            os.precision(17);
            os << x << " vs " << y;
            out.push_back({path, os.str(), d, tol});
        }
        return;
    }
    if (a.type() != b.type()) {
        out.push_back({path, std::string("type differs: ") + a.type_name() + " vs " + b.type_name(), 0.0, 0.0});
        return;
    }
    if (a.is_object()) {
        std::set<std::string> keys;
        for (const auto& [k, v] : a.items()) keys.insert(k);
        for (const auto& [k, v] : b.items()) keys.insert(k);
        for (const auto& k : keys) {
            const std::string sub = path.empty() ? k : path + "." + k;
            if (!a.contains(k)) out.push_back({sub, "missing in first report", 0.0, 0.0});
            else if (!b.contains(k)) out.push_back({sub, "missing in second report", 0.0, 0.0});
            else diff_walk(sub, k, a[k], b[k], opt, out);
        }
        return;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) {
            out.push_back({path, "length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()), 0.0, 0.0});
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i)
            diff_walk(path + "[" + std::to_string(i) + "]", leaf, a[i], b[i], opt, out);
        return;
    }
    if (a != b) out.push_back({path, a.dump() + " vs " + b.dump(), 0.0, 0.0});
}

void collect_tracks(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
    if (!j.is_object()) return;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_object()) continue;
        const std::string name = prefix.empty() ? k : prefix + "_" + k;
        if (k == "track" && v.contains("times") && v.contains("radii")) {
            out.emplace_back(prefix.empty() ? "track" : prefix, v);
        } else {
            collect_tracks(v, name, out);
        }
    }
}

}  // namespace

CompareResult compare_reports(const fs::path& a, const fs::path& b, const CompareOptions& options) {
    const json ja = load_report(a), jb = load_report(b);
    if (ja["scenario"] != jb["scenario"])
        throw SchemaMismatch("scenarios differ: " + ja["scenario"].get<std::string>() + " vs " +
                             jb["scenario"].get<std::string>());
    CompareResult res;
    diff_walk("", "", ja, jb, options, res.diffs);
    return res;
}

std::vector<fs::path> emit_plot_data(const fs::path& report, const fs::path& out_dir) {
    const json j = load_report(report);
    const fs::path base = fs::is_directory(report) ? report : report.parent_path();
    const fs::path dir = out_dir.empty() ? base : out_dir;
    fs::create_directories(dir);
    const int k = j.value("k", 1);
    const int n = j.value("n", 2);

    std::vector<std::pair<std::string, json>> tracks;
    collect_tracks(j, "", tracks);

    std::vector<fs::path> written;
    for (const auto& [name, tr] : tracks) {
        const auto times = tr["times"].get<std::vector<double>>();
        const auto radii = tr["radii"].get<std::vector<std::vector<double>>>();
        CsvTable table;
        table.header.push_back("t");
        for (int i = 1; i <= k; ++i) table.header.push_back("rho_" + std::to_string(i));
        for (int i = 1; i <= k; ++i) table.header.push_back("rho_theory_" + std::to_string(i));
        for (int i = 1; i < k; ++i) table.header.push_back("gap_" + std::to_string(i));
        for (int i = 1; i < k; ++i) table.header.push_back("eta_plus_b_" + std::to_string(i));

        std::optional<EtaSolution> eta;
        std::optional<TodaConstants> c;
        if (k >= 2 && !times.empty()) {
            double far = 10.0;
            for (double t : times) far = std::max(far, -t);
            eta = solve_eta(far, 1e-10);
            c = toda_constants(k, j.contains("beta") ? j["beta"].get<double>() : 12.0 * kSqrt2);
        }
        for (std::size_t m = 0; m < times.size(); ++m) {
            const double t = times[m];
            std::vector<double> row{t};
            row.insert(row.end(), radii[m].begin(), radii[m].end());
            const double xi = shrinking_sphere(n, t);
            if (k == 1) {
                row.push_back(xi);
            } else {
                const bool has_eta = t <= -1.0;
                const double e = has_eta ? eta->value(t) : std::nan("");
                const auto off = first_approximation_offsets(*c, e);
                for (int i = 0; i < k; ++i) row.push_back(xi + off[i]);
                for (int i = 0; i + 1 < k; ++i) row.push_back(radii[m][i + 1] - radii[m][i]);
                for (int i = 0; i + 1 < k; ++i) row.push_back(e + c->b[i]);
            }
            table.rows.push_back(std::move(row));
        }
        const fs::path p = dir / ("plot_" + name + ".csv");
        write_csv(p, table);
        written.push_back(p);
    }
    return written;
}

}  // namespace aclab
