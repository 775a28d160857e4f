#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace aclab {

/// Every knob of a named scenario. Sections of the INI file map onto the nested structs.
struct ExperimentConfig {
    std::string scenario = "constants";  ///< constants|eta|toda|picard|pde|end2end|rescale
    std::string output_dir = "runs/out";
    std::uint64_t seed = 1;
    int k = 2;
    int n = 2;

    struct Constants {
        double quad_tol = 1e-12;
    } constants;

    struct Eta {
        double t_end = 1e6;
        double rel_tol = 1e-10;
        int samples_per_decade = 20;
    } eta;

    struct Toda {
        double t_start = -1e2;  ///< first approximation is placed here
        double t_stop = -1e5;
        double rel_tol = 1e-10;
        double gap_floor = 1e-3;
        int samples_per_decade = 40;
    } toda;

    struct Picard {
        double t0 = 100.0;
        double t_end = 1e5;
        int nodes_per_decade = 64;
        int max_iters = 60;
        double tol = 1e-12;
        bool include_nonlinear = true;
        std::vector<double> threshold_candidates = {5, 10, 20, 50, 100, 200};
    } picard;

    struct Pde {
        double t_start = -50.0;
        double t_stop = -5.0;
        double h = 0.05;
        double dt = 1e-3;
        std::string scheme = "imex";
        double margin = 20.0;             ///< r_max = rho_k(t_start) + margin
        double track_interval = 0.25;
        double snapshot_interval = 0.0;   ///< 0 writes only the final field
        double perturbation = 0.0;        ///< amplitude of seeded uniform noise on the initial data
    } pde;

    struct Ansatz {
        double sigma = 1.0;
        bool symmetric_weight = false;
        std::vector<double> bound_times = {-1e2, -1e3, -1e4};
    } ansatz;

    struct Rescale {
        double epsilon = 0.5;
        double t_start = -20.0;
        double t_stop = -15.0;
    } rescale;

    /// Checks every field against the preconditions of the modules it feeds.
    /// Throws ConfigError naming the offending field.
    void validate() const;
    nlohmann::json to_json() const;
};

/// Parses INI text; unknown sections or keys are errors. Missing keys keep their defaults.
ExperimentConfig parse_config(const std::string& ini_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Annotated INI with every default.
std::string default_config_text();

struct RunOutcome {
    int exit_code = 0;
    std::string message;
    std::filesystem::path directory;
    nlohmann::json report;
};

/// Validates, executes the scenario and writes manifest.json, report.json and the CSVs into
/// config.output_dir. Module errors give a nonzero exit code and a message, never an exception.
RunOutcome run_experiment(const ExperimentConfig& config);

/// Runs independent configurations on up to `jobs` worker threads. Output directories must be
/// distinct (ConfigError otherwise).
std::vector<RunOutcome> run_experiments(const std::vector<ExperimentConfig>& configs, int jobs);

struct CompareOptions {
    double tol = 1e-8;
    /// Tolerance overrides keyed by the leaf field name or the full dotted path.
    std::map<std::string, double> field_tols;
};

struct DiffEntry {
    std::string path;
    std::string detail;
    double difference = 0.0;
    double tolerance = 0.0;
};

struct CompareResult {
    std::vector<DiffEntry> diffs;
    bool within_tolerance() const noexcept { return diffs.empty(); }
};

/// Field-wise numeric diff of two reports (report.json files or run directories).
/// Throws SchemaMismatch if the scenarios differ or the files are not reports.
CompareResult compare_reports(const std::filesystem::path& a, const std::filesystem::path& b,
                              const CompareOptions& options = {});

/// Writes plot_<track>.csv for each track in the report and returns the paths. The columns
/// are t, rho_j, rho_theory_j and, for k >= 2, gap_l and eta_plus_b_l.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& report,
                                                  const std::filesystem::path& out_dir = {});

std::string code_version();

}  // namespace aclab
