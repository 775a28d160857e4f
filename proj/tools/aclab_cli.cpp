// Command line front end: run scenarios, diff reports, export plot columns.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aclab/errors.hpp"
#include "aclab/experiment.hpp"

namespace {

int cmd_run(const std::vector<std::string>& paths, const std::string& out, int jobs) {
    std::vector<aclab::ExperimentConfig> configs;
    for (const auto& p : paths) {
        try {
            configs.push_back(aclab::load_config(p));
        } catch (const aclab::ConfigError& e) {
            std::cerr << p << ": config error: " << e.what() << '\n';
            return 2;
        }
        if (!out.empty()) {
            // One subdirectory per config when several share an --out root.
            const std::filesystem::path stem = std::filesystem::path(p).stem();
            configs.back().output_dir =
                (paths.size() == 1 ? std::filesystem::path(out) : std::filesystem::path(out) / stem).string();
        }
    }
    std::vector<aclab::RunOutcome> outcomes;
    try {
        outcomes = aclab::run_experiments(configs, jobs);
    } catch (const aclab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    int status = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        std::cout << paths[i] << " -> " << o.directory.string() << ": " << o.message << '\n';
        status = std::max(status, o.exit_code);
    }
    return status;
}

int cmd_compare(const std::string& a, const std::string& b, double tol,
                const std::vector<std::string>& field_tols) {
    aclab::CompareOptions opt;
    opt.tol = tol;
    for (const auto& spec : field_tols) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "--field-tol expects name=value, got '" << spec << "'\n";
            return 2;
        }
        try {
            opt.field_tols[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
        } catch (const std::exception&) {
            std::cerr << "--field-tol: bad number in '" << spec << "'\n";
            return 2;
        }
    }
    try {
        const auto res = aclab::compare_reports(a, b, opt);
        for (const auto& d : res.diffs) {
            std::cout << d.path << ": " << d.detail;
            if (d.tolerance > 0.0) std::cout << " (|diff| = " << d.difference << " > tol " << d.tolerance << ")";
            std::cout << '\n';
        }
        std::cout << (res.within_tolerance() ? "reports agree\n"
                                             : std::to_string(res.diffs.size()) + " field(s) differ\n");
        return res.within_tolerance() ? 0 : 1;
    } catch (const aclab::SchemaMismatch& e) {
        std::cerr << "schema mismatch: " << e.what() << '\n';
        return 2;
    }
}

int cmd_plot(const std::string& report, const std::string& out) {
    try {
        for (const auto& p : aclab::emit_plot_data(report, out)) std::cout << p.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "plot-data: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aclab: multi-layer Allen-Cahn experiments"};
    app.set_version_flag("--version", aclab::code_version());
    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults, "Print the annotated default configuration and exit");

    auto* run = app.add_subcommand("run", "Run one or more scenario configurations");
    std::vector<std::string> configs;
    std::string run_out;
    int jobs = 1;
    run->add_option("config", configs, "INI configuration file(s)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "Override the output directory");
    run->add_option("--jobs,-j", jobs, "Worker threads for independent configs")->check(CLI::PositiveNumber);

    auto* cmp = app.add_subcommand("compare", "Field-wise diff of two reports; exit 0 iff within tolerance");
    std::string rep_a, rep_b;
    double tol = 1e-8;
    std::vector<std::string> field_tols;
    cmp->add_option("a", rep_a, "First report.json or run directory")->required();
    cmp->add_option("b", rep_b, "Second report.json or run directory")->required();
    cmp->add_option("--tol", tol, "Absolute tolerance for numeric fields")->check(CLI::NonNegativeNumber);
    cmp->add_option("--field-tol", field_tols, "Per-field tolerance override, name=value (repeatable)");

    auto* plot = app.add_subcommand("plot-data", "Write plotting CSVs for every track of a report");
    std::string plot_report, plot_out;
    plot->add_option("report", plot_report, "report.json or run directory")->required();
    plot->add_option("--out", plot_out, "Destination directory (default: next to the report)");

    CLI11_PARSE(app, argc, argv);

    if (print_defaults) {
        std::cout << aclab::default_config_text();
        return 0;
    }
    if (*run) return cmd_run(configs, run_out, jobs);
    if (*cmp) return cmd_compare(rep_a, rep_b, tol, field_tols);
    if (*plot) return cmd_plot(plot_report, plot_out);
    std::cout << app.help();
    return 0;
}
