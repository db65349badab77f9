#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stc/dynamics.hpp"
#include "stc/metrics.hpp"
#include "stc/samplers.hpp"
#include "stc/simulation.hpp"

namespace stc {

struct PolicySpec {
    std::string label;
    TriggerPolicy policy;
};

/// A check evaluated on the finished table.
///  - kWithin:  |J_avg(a) − J_avg(b)| ≤ tolerance · J_avg(b)
///  - kGreater: J_avg(a) > J_avg(b)
///  - kBounded: no run of `a` diverged
///  - kUltimateBound: every run of `a` has ultimate-bound estimate ≤ tolerance
struct Assertion {
    enum class Kind { kWithin, kGreater, kBounded, kUltimateBound };
    Kind kind = Kind::kWithin;
    std::string a;
    std::string b;
    double tolerance = 0.05;
};

struct AssertionResult {
    Assertion assertion;
    bool passed = false;
    std::string detail;
};

/// A batch of initial conditions run against every policy on one plant.
struct ExperimentConfig {
    std::string id = "experiment";
    PlantBundle plant;
    EtaSchedule eta;
    double horizon = 15.0;
    double dt = 1e-4;
    DisturbanceProfile disturbance;
    double blowup_radius = 1e6;
    std::size_t ic_count = 25;
    double ic_radius = 1.0;
    std::uint64_t ic_seed = 0;
    std::optional<double> ultimate_cutoff{};  ///< defaults to horizon / 2
    std::vector<PolicySpec> policies{};
    std::vector<Assertion> assertions{};
};

/// One table row: a policy over every initial condition.
struct BatchReport {
    std::string label;
    std::string kind;
    std::vector<MetricsReport> runs;
    double j_avg = 0.0;
    std::optional<double> avg_interval;  ///< mean over runs of the per-run average
    std::optional<double> min_interval;
    double max_ultimate_bound = 0.0;
    std::size_t diverged_runs = 0;
};

struct TableReport {
    std::string id;
    std::size_t ic_count = 0;
    double horizon = 0.0;
    double dt = 0.0;
    std::vector<BatchReport> rows;
    std::vector<AssertionResult> assertions;

    [[nodiscard]] bool all_passed() const;
    [[nodiscard]] const BatchReport& row(const std::string& label) const;
};

/// Called once per finished run, possibly from several threads at once.
using TraceObserver = std::function<void(const std::string& label, std::size_t ic_index, const Trace& trace)>;

struct RunOptions {
    std::size_t threads = 0;  ///< 0 picks thread_budget()
    std::optional<std::filesystem::path> csv_dir;
    TraceObserver observer;
};

/// Worker count: STC_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
[[nodiscard]] std::size_t thread_budget();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Builds the scenario for one (policy, initial condition) cell.
[[nodiscard]] Scenario make_scenario(const ExperimentConfig& config, const PolicySpec& policy, const Vector& x0,
                                     std::size_t ic_index);

/// Runs every policy on every initial condition and evaluates the assertions.
/// Results are independent of the thread count.
[[nodiscard]] TableReport run_table_experiment(const ExperimentConfig& config, const RunOptions& options = {});

[[nodiscard]] BatchReport aggregate(std::string label, std::string kind, std::vector<MetricsReport> runs);

[[nodiscard]] std::vector<AssertionResult> evaluate_assertions(const std::vector<Assertion>& assertions,
                                                               const std::vector<BatchReport>& rows);

}  // namespace stc
