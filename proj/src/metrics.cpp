#include "stc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "stc/errors.hpp"

namespace stc {

double quadratic_cost(const Trace& trace) {
    double cost = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double h = trace.times[i] - trace.times[i - 1];
        const double xs = 0.5 * (squared_norm(trace.state(i - 1)) + squared_norm(trace.state(i)));
        cost += h * (xs + squared_norm(trace.input(i - 1)));
    }
    return cost;
}

IntervalStats interval_stats(std::span<const double> t) {
    if (t.size() < 2) throw StatisticsError("interval statistics need at least two samples");
    IntervalStats s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double h = t[i] - t[i - 1];
        s.min = std::min(s.min, h);
        s.max = std::max(s.max, h);
    }
    s.count = t.size() - 1;
    s.avg = (t.back() - t.front()) / static_cast<double>(s.count);
    s.avg = std::clamp(s.avg, s.min, s.max);
    return s;
}

IntervalStats interval_stats(const Trace& trace) { return interval_stats(trace.sample_instants); }

double ultimate_bound_estimate(const Trace& trace, double cutoff) {
    if (trace.diverged) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.times[i] >= cutoff) m = std::max(m, norm(trace.state(i)));
    }
    return m;
}

std::vector<Vector> sphere_initial_conditions(std::size_t n, double radius, std::uint64_t seed, std::size_t dim) {
    if (dim == 0) throw ContractViolation("sphere_initial_conditions: dimension must be positive");
    if (!(radius >= 0.0)) throw ContractViolation("sphere_initial_conditions: radius must be non-negative");
    std::mt19937_64 rng(seed);
    std::vector<Vector> out;
    out.reserve(n);
    if (dim == 3) {
        const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
        const double offset = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = offset + golden_angle * static_cast<double>(i);
            out.push_back({radius * rho * std::cos(phi), radius * rho * std::sin(phi), radius * z});
        }
        return out;
    }
    std::normal_distribution<double> gauss;
    for (std::size_t i = 0; i < n; ++i) {
        Vector v(dim);
        double nv = 0.0;
        while (nv == 0.0) {
            for (auto& c : v) c = gauss(rng);
            nv = norm(v);
        }
        for (auto& c : v) c *= radius / nv;
        out.push_back(std::move(v));
    }
    return out;
}

MetricsReport compute_metrics(const Trace& trace, double ultimate_cutoff) {
    MetricsReport r;
    r.cost = quadratic_cost(trace);
    if (trace.sample_instants.size() >= 2) r.intervals = interval_stats(trace);
    r.ultimate_bound = ultimate_bound_estimate(trace, ultimate_cutoff);
    r.samples = trace.sample_instants.size();
    r.diverged = trace.diverged;
    r.divergence_time = trace.diverged ? trace.divergence_time : 0.0;
    r.prediction_cap_hits = trace.prediction_cap_hits;
    return r;
}

}  // namespace stc
