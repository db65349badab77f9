// stc: simulate, tune and batch-run self-triggered sampled-data loops.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stc/config.hpp"
#include "stc/errors.hpp"
#include "stc/experiment.hpp"
#include "stc/simulation.hpp"
#include "stc/trace_io.hpp"

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw stc::ConfigError("cannot write " + path);
    return os;
}

int run_simulate(const std::string& config, const std::string& out, const std::string& svg) {
    const stc::Scenario scenario = stc::parse_scenario(stc::load_json(config));
    const stc::Trace trace = stc::simulate(scenario);
    {
        auto os = open_out(out);
        stc::write_trace_csv(trace, os);
    }
    if (!svg.empty()) {
        auto os = open_out(svg);
        stc::write_trace_svg(trace, os);
    }
    std::cerr << scenario.id << ": " << trace.size() << " points, " << trace.sample_instants.size() << " samples";
    if (trace.diverged) std::cerr << ", diverged at t = " << trace.divergence_time;
    std::cerr << '\n';
    return trace.diverged ? 3 : 0;
}

int run_tune(const std::string& config) {
    const auto outcome = stc::tune_from_config(stc::load_json(config));
    std::cout << outcome.report.dump(2) << '\n';
    return outcome.feasible ? 0 : 1;
}

int run_experiment(const std::string& config, const std::string& out, const std::string& csv_dir, std::size_t threads) {
    const stc::ExperimentConfig cfg = stc::parse_experiment(stc::load_json(config));
    stc::RunOptions options;
    options.threads = threads;
    if (!csv_dir.empty()) options.csv_dir = csv_dir;
    const stc::TableReport report = stc::run_table_experiment(cfg, options);
    const stc::Json j = stc::to_json(report);
    {
        auto os = open_out(out);
        os << j.dump(2) << '\n';
    }
    for (const auto& row : report.rows) {
        std::fprintf(stderr, "%-24s J_avg %-10.5f avg interval %s ms\n", row.label.c_str(), row.j_avg,
                     row.avg_interval ? std::to_string(*row.avg_interval * 1e3).c_str() : "-");
    }
    for (const auto& a : report.assertions) {
        std::cerr << (a.passed ? "PASS " : "FAIL ") << a.assertion.a << (a.assertion.b.empty() ? "" : " / ")
                  << a.assertion.b << ": " << a.detail << '\n';
    }
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-triggered sampling simulator"};
    app.require_subcommand(1);

    std::string config, out, svg, csv_dir;
    std::size_t threads = 0;

    auto* sim = app.add_subcommand("simulate", "Run one scenario and write its trace as CSV");
    sim->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "Trace CSV path")->required();
    sim->add_option("--svg", svg, "Optional SVG plot path");

    auto* tune = app.add_subcommand("tune", "Check the tuning constraint of a policy; exit 0 iff feasible");
    tune->add_option("--config", config, "Scenario or tuning JSON")->required()->check(CLI::ExistingFile);

    auto* exp = app.add_subcommand("experiment", "Run a batch table experiment");
    exp->add_option("--config", config, "Table JSON")->required()->check(CLI::ExistingFile);
    exp->add_option("--out", out, "Report JSON path")->required();
    exp->add_option("--csv-dir", csv_dir, "Directory for per-run trace CSVs");
    exp->add_option("--threads", threads, "Worker threads (default: STC_THREADS or hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(config, out, svg);
        if (tune->parsed()) return run_tune(config);
        if (exp->parsed()) return run_experiment(config, out, csv_dir, threads);
    } catch (const stc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
