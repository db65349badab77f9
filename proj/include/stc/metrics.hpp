#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stc/simulation.hpp"
#include "stc/vector_ops.hpp"

namespace stc {

struct IntervalStats {
    double avg = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

/// J = ∫ ‖x‖² + ‖u‖² dt over the stored trace. ‖x‖² uses the trapezoid rule;
/// the held input is exact per segment.
[[nodiscard]] double quadratic_cost(const Trace& trace);

/// Statistics of t_{k+1} − t_k. StatisticsError with fewer than two samples.
[[nodiscard]] IntervalStats interval_stats(std::span<const double> sample_instants);
[[nodiscard]] IntervalStats interval_stats(const Trace& trace);

/// max ‖x(t)‖ for t ≥ cutoff; +∞ for a diverged trace.
[[nodiscard]] double ultimate_bound_estimate(const Trace& trace, double cutoff);

/// n points on the sphere of the given radius. For dim 3 a Fibonacci lattice
/// turned by a seed-dependent angle about the vertical axis; otherwise
/// normalised Gaussian draws.
[[nodiscard]] std::vector<Vector> sphere_initial_conditions(std::size_t n, double radius, std::uint64_t seed,
                                                            std::size_t dim = 3);

struct MetricsReport {
    double cost = 0.0;
    std::optional<IntervalStats> intervals;
    double ultimate_bound = 0.0;
    std::size_t samples = 0;
    bool diverged = false;
    double divergence_time = 0.0;
    std::size_t prediction_cap_hits = 0;
};

[[nodiscard]] MetricsReport compute_metrics(const Trace& trace, double ultimate_cutoff);

}  // namespace stc
