#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stc/dynamics.hpp"
#include "stc/samplers.hpp"

namespace stc {

/// Time-stamped record of one sampled-data run. Per-time vectors are stored
/// row-major in flat arrays. The input recorded at a sample instant is the
/// new held value, so inputs are right-continuous.
struct Trace {
    std::string scenario_id;
    std::size_t dim_state = 0;
    std::size_t dim_input = 0;
    std::size_t dim_disturbance = 0;

    std::vector<double> times;
    std::vector<double> states;
    std::vector<double> inputs;
    std::vector<double> disturbances;
    std::vector<std::uint8_t> is_sample;

    std::vector<double> sample_instants;
    /// Interval requested by the policy at each sample (periodic, closed-form
    /// and prediction policies); empty for event-triggered runs.
    std::vector<double> requested_intervals;

    EtaSchedule eta_schedule;
    bool diverged = false;
    double divergence_time = std::numeric_limits<double>::quiet_NaN();
    std::size_t prediction_cap_hits = 0;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] std::span<const double> state(std::size_t i) const {
        return {states.data() + i * dim_state, dim_state};
    }
    [[nodiscard]] std::span<const double> input(std::size_t i) const {
        return {inputs.data() + i * dim_input, dim_input};
    }
    [[nodiscard]] std::span<const double> disturbance(std::size_t i) const {
        return {disturbances.data() + i * dim_disturbance, dim_disturbance};
    }
    /// Index of the trace point at each sample instant.
    [[nodiscard]] std::vector<std::size_t> sample_indices() const;
};

/// Everything needed for one closed-loop run.
struct Scenario {
    std::string id;
    PlantModel model;
    ControlLaw law;
    TriggerPolicy policy;
    EtaSchedule eta;
    Vector x0;
    double horizon = 15.0;
    double dt = 1e-4;
    DisturbanceProfile disturbance;
    std::uint64_t seed = 0;
    double blowup_radius = 1e6;
};

/// Throws ContractViolation / DomainError when the scenario is inconsistent.
void validate(const Scenario& scenario);

/// Runs the sampled-data loop ẋ = f(η, x, κ(x_k), w) on [0, T].
///
/// Closed-form and prediction policies fix t_{k+1} at t_k; event policies
/// check Γ after every RK4 step and bisect the crossing to 1e-9 s. Sample
/// instants and disturbance/η switch times are integration breakpoints. A
/// state leaving the blow-up radius ends the trace with `diverged` set.
[[nodiscard]] Trace simulate(const Scenario& scenario);

/// For each inter-sample segment of a stored trace, the first up-crossing of
/// `rule` (state linearly interpolated between trace points, bisected to
/// 1e-9 s). Segments where the rule never fires are omitted.
[[nodiscard]] std::vector<double> replay_event_times(const Trace& trace, const EventRule& rule);

}  // namespace stc
