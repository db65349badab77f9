#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "stc/bounds.hpp"
#include "stc/experiment.hpp"
#include "stc/samplers.hpp"
#include "stc/simulation.hpp"
#include "stc/tuning.hpp"

namespace stc {

using Json = nlohmann::json;

/// Reads and parses a JSON file; ConfigError on I/O or syntax problems.
[[nodiscard]] Json load_json(const std::filesystem::path& path);

/// {"m1", "m2", "l", "w_bar", "delta"}; missing fields take the defaults.
[[nodiscard]] ExpCertificate parse_certificate(const Json& j);

/// {"beta0", "gamma1", "gamma2", "l"}; functions are presets or numbers.
[[nodiscard]] KLCertificate parse_kl_certificate(const Json& j);

/// A preset string ("linear:c", "sqrt:c", "poly:c,p", "const:c") or a number.
[[nodiscard]] RadialFunction parse_radial(const Json& j);

/// {"kind": ..., ...}. "continuous" is shorthand for periodic with h = dt.
[[nodiscard]] TriggerPolicy parse_policy(const Json& j, const PlantBundle& plant, double dt);

/// η as a number, a vector, {"schedule": [[t, η], ...]} or {"draw": "uniform"}
/// (drawn from the model's box with `seed`).
[[nodiscard]] EtaSchedule parse_eta(const Json& j, const PlantModel& model, std::uint64_t seed);

/// {"bound": w̄, "segments": [{"start", "end", "value"}]}; absent means none.
[[nodiscard]] DisturbanceProfile parse_disturbance(const Json* j, const PlantModel& model);

[[nodiscard]] Scenario parse_scenario(const Json& j);
[[nodiscard]] ExperimentConfig parse_experiment(const Json& j);

/// Evaluates the tuning constraint for the config's "policy" block and, when
/// present, the "suggest" and "bounds" blocks.
struct TuneOutcome {
    Json report;
    bool feasible = false;
};
[[nodiscard]] TuneOutcome tune_from_config(const Json& j);

[[nodiscard]] Json to_json(const TuningReport& r);
[[nodiscard]] Json to_json(const IntervalBounds& b);
[[nodiscard]] Json to_json(const MetricsReport& m);
[[nodiscard]] Json to_json(const TableReport& t);

}  // namespace stc
