#include "stc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "stc/errors.hpp"
#include "stc/trace_io.hpp"

namespace stc {

bool TableReport::all_passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& r) { return r.passed; });
}

const BatchReport& TableReport::row(const std::string& label) const {
    for (const auto& r : rows) {
        if (r.label == label) return r;
    }
    throw ContractViolation("no table row labelled '" + label + "'");
}

std::size_t thread_budget() {
    if (const char* env = std::getenv("STC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, count));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!stop.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

Scenario make_scenario(const ExperimentConfig& c, const PolicySpec& p, const Vector& x0, std::size_t ic_index) {
    return Scenario{
        .id = c.id + "/" + p.label + "/" + std::to_string(ic_index),
        .model = c.plant.model,
        .law = c.plant.law,
        .policy = p.policy,
        .eta = c.eta,
        .x0 = x0,
        .horizon = c.horizon,
        .dt = c.dt,
        .disturbance = c.disturbance,
        .seed = c.ic_seed + ic_index,
        .blowup_radius = c.blowup_radius,
    };
}

BatchReport aggregate(std::string label, std::string kind, std::vector<MetricsReport> runs) {
    BatchReport b;
    b.label = std::move(label);
    b.kind = std::move(kind);
    b.runs = std::move(runs);
    double j_sum = 0.0;
    double interval_sum = 0.0;
    std::size_t with_intervals = 0;
    double min_interval = std::numeric_limits<double>::infinity();
    for (const auto& r : b.runs) {
        j_sum += r.cost;
        if (r.diverged) ++b.diverged_runs;
        b.max_ultimate_bound = std::max(b.max_ultimate_bound, r.ultimate_bound);
        if (r.intervals) {
            interval_sum += r.intervals->avg;
            min_interval = std::min(min_interval, r.intervals->min);
            ++with_intervals;
        }
    }
    b.j_avg = b.runs.empty() ? 0.0 : j_sum / static_cast<double>(b.runs.size());
    if (with_intervals > 0) {
        b.avg_interval = interval_sum / static_cast<double>(with_intervals);
        b.min_interval = min_interval;
    }
    return b;
}

namespace {

const BatchReport* find_row(const std::vector<BatchReport>& rows, const std::string& label) {
    for (const auto& r : rows) {
        if (r.label == label) return &r;
    }
    return nullptr;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::vector<AssertionResult> evaluate_assertions(const std::vector<Assertion>& assertions,
                                                 const std::vector<BatchReport>& rows) {
    std::vector<AssertionResult> out;
    for (const auto& a : assertions) {
        AssertionResult r{a, false, {}};
        const BatchReport* ra = find_row(rows, a.a);
        const BatchReport* rb = find_row(rows, a.b);
        const bool needs_b = a.kind == Assertion::Kind::kWithin || a.kind == Assertion::Kind::kGreater;
        if (ra == nullptr || (needs_b && rb == nullptr)) {
            r.detail = "unknown policy label";
            out.push_back(std::move(r));
            continue;
        }
        switch (a.kind) {
            case Assertion::Kind::kWithin: {
                const double gap = std::abs(ra->j_avg - rb->j_avg) / rb->j_avg;
                r.passed = ra->diverged_runs == 0 && rb->diverged_runs == 0 && gap <= a.tolerance;
                r.detail = "relative gap " + fmt(gap) + " (limit " + fmt(a.tolerance) + ")";
                break;
            }
            case Assertion::Kind::kGreater:
                r.passed = ra->j_avg > rb->j_avg;
                r.detail = fmt(ra->j_avg) + " vs " + fmt(rb->j_avg);
                break;
            case Assertion::Kind::kBounded:
                r.passed = ra->diverged_runs == 0;
                r.detail = std::to_string(ra->diverged_runs) + " diverged run(s)";
                break;
            case Assertion::Kind::kUltimateBound:
                r.passed = ra->diverged_runs == 0 && ra->max_ultimate_bound <= a.tolerance;
                r.detail = "max estimate " + fmt(ra->max_ultimate_bound) + " (limit " + fmt(a.tolerance) + ")";
                break;
        }
        out.push_back(std::move(r));
    }
    return out;
}

TableReport run_table_experiment(const ExperimentConfig& c, const RunOptions& options) {
    if (c.policies.empty()) throw ConfigError("experiment: no policies configured");
    if (c.ic_count == 0) throw ConfigError("experiment: ic_count must be positive");
    for (std::size_t i = 0; i < c.policies.size(); ++i) {
        for (std::size_t j = i + 1; j < c.policies.size(); ++j) {
            if (c.policies[i].label == c.policies[j].label)
                throw ConfigError("experiment: duplicate policy label '" + c.policies[i].label + "'");
        }
    }
    const auto ics = sphere_initial_conditions(c.ic_count, c.ic_radius, c.ic_seed, c.plant.model.dim_state());
    const double cutoff = c.ultimate_cutoff.value_or(0.5 * c.horizon);
    if (options.csv_dir) std::filesystem::create_directories(*options.csv_dir);

    const std::size_t cells = c.policies.size() * ics.size();
    std::vector<MetricsReport> metrics(cells);
    const std::size_t threads = options.threads > 0 ? options.threads : thread_budget();
    parallel_for(cells, threads, [&](std::size_t cell) {
        const std::size_t p = cell / ics.size();
        const std::size_t i = cell % ics.size();
        const Trace trace = simulate(make_scenario(c, c.policies[p], ics[i], i));
        metrics[cell] = compute_metrics(trace, cutoff);
        if (options.csv_dir) {
            const auto path = *options.csv_dir / (c.id + "_" + c.policies[p].label + "_" + std::to_string(i) + ".csv");
            std::ofstream os(path);
            if (!os) throw ConfigError("cannot write " + path.string());
            write_trace_csv(trace, os);
        }
        if (options.observer) options.observer(c.policies[p].label, i, trace);
    });

    TableReport report;
    report.id = c.id;
    report.ic_count = ics.size();
    report.horizon = c.horizon;
    report.dt = c.dt;
    for (std::size_t p = 0; p < c.policies.size(); ++p) {
        std::vector<MetricsReport> runs(metrics.begin() + static_cast<std::ptrdiff_t>(p * ics.size()),
                                        metrics.begin() + static_cast<std::ptrdiff_t>((p + 1) * ics.size()));
        report.rows.push_back(aggregate(c.policies[p].label, c.policies[p].policy.kind_name(), std::move(runs)));
    }
    report.assertions = evaluate_assertions(c.assertions, report.rows);
    return report;
}

}  // namespace stc
