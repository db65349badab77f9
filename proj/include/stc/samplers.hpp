#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "stc/bounds.hpp"
#include "stc/dynamics.hpp"
#include "stc/radial_function.hpp"

namespace stc {

/// Gain of the relative event rule ‖x_k − x‖² − 0.79²σ²‖x‖².
inline constexpr double kRelativeRuleGain = 0.79;

/// Event-detection and predicted-crossing resolution, in seconds.
inline constexpr double kEventResolution = 1e-9;

/// Constant coefficients of the universal sampler
/// h = (1/ν₁) ln(1 + ν₀ / (ν₂‖x_k‖ + ν₃)).
struct NuConstants {
    double nu0 = 1.0;
    double nu1 = 1.0;
    double nu2 = 1.0;
    double nu3 = 1.0;
};

/// Requires ν₀ > 0, ν₁ > 0, ν₂ ≥ 0, ν₃ > 0 (denominator positive at r = 0).
void validate(const NuConstants& nu);

/// Radius-dependent coefficients h = (1/ν₁(r)) ln(1 + ν₀(r) / (ν₂(r) + ν₃(r))).
/// The nonlinear sampler only lets ν₂ vary; the global one lets all vary.
struct NuFunctions {
    RadialFunction nu0;
    RadialFunction nu1;
    RadialFunction nu2;
    RadialFunction nu3;
};

/// Grid check on [0, r_max]: ν₀ > 0, ν₁ > 0, ν₂ ≥ 0, ν₃ ≥ 0, ν₂ + ν₃ > 0.
void validate(const NuFunctions& nu, double r_max = 1e3);

/// The universal coefficients as functions, with ν₂(r) = ν₂·r.
[[nodiscard]] NuFunctions to_functions(const NuConstants& nu);

/// (1/L) ln(1 + δ / (M₁‖x_k‖ + M₂w̄)); returns `cap` when the envelope is zero.
[[nodiscard]] double next_interval_lebesgue(const ExpCertificate& cert, double x_k_norm, double cap = 1.0);

[[nodiscard]] double next_interval_universal(const NuConstants& nu, double x_k_norm);

/// Same formula with ν₂ a function of ‖x_k‖.
[[nodiscard]] double next_interval_nonlinear(const NuFunctions& nu, double x_k_norm);

/// All four coefficients evaluated at ‖x_k‖.
[[nodiscard]] double next_interval_global(const NuFunctions& nu, double x_k_norm);

/// ‖x_k − x‖ − δ.
[[nodiscard]] double event_value_lebesgue(std::span<const double> x, std::span<const double> x_k, double delta);

/// ‖x_k − x‖² − 0.79²σ²‖x‖².
[[nodiscard]] double event_value_relative(std::span<const double> x, std::span<const double> x_k, double sigma);

struct IntervalBounds {
    double h_min = 0.0;
    double h_mid = 0.0;
    double h_max = 0.0;
};

/// Closed-form interval bracket of the universal sampler. `x0_envelope` is
/// M₁‖x₀‖ + M₂w̄ and `ultimate_bound` is b.
[[nodiscard]] IntervalBounds interval_bounds(const NuConstants& nu, double x0_envelope, double ultimate_bound);

/// Trigger function Γ(x, x_k); an event is its first zero up-crossing.
struct EventRule {
    enum class Kind { kLebesgue, kRelative };
    Kind kind = Kind::kRelative;
    double parameter = 0.1;  ///< δ or σ

    [[nodiscard]] double value(std::span<const double> x, std::span<const double> x_k) const {
        return kind == Kind::kLebesgue ? event_value_lebesgue(x, x_k, parameter)
                                       : event_value_relative(x, x_k, parameter);
    }
};

struct PredictedInterval {
    double interval = 0.0;
    bool capped = false;
};

/// Integrates the nominal held-input model (η = eta_nominal, w = 0) forward
/// from x_k until `rule` fires, refines the crossing by bisection to 1e-9 s,
/// and returns that interval. Returns `horizon_cap` with `capped` set when the
/// rule never fires.
[[nodiscard]] PredictedInterval next_interval_nominal_prediction(const PlantModel& model, const ControlLaw& law,
                                                                 std::span<const double> eta_nominal,
                                                                 const EventRule& rule, std::span<const double> x_k,
                                                                 double prediction_dt, double horizon_cap);

// Trigger policies --------------------------------------------------------

struct Periodic {
    double h = 0.0;
};
struct EventLebesgue {
    double delta = 0.0;
};
struct EventRelative {
    double sigma = 0.1;
};
struct SelfTrigLebesgue {
    ExpCertificate cert;
    double interval_cap = 1.0;
};
struct SelfTrigUniversal {
    ExpCertificate cert;
    NuConstants nu;
};
struct SelfTrigNonlinear {
    KLCertificate cert;
    NuFunctions nu;
    double delta = 1.0;
    double w_bar = 0.0;
};
struct SelfTrigGlobal {
    KLCertificate cert;
    LipschitzEnvelope envelope;
    NuFunctions nu;
    double delta = 1.0;
    double w_bar = 0.0;
};
struct NominalPrediction {
    Vector eta_nominal;
    EventRule rule;
    double prediction_dt = 1e-4;
    double horizon_cap = 1.0;
};

enum class Verification { kRequired, kWaived };

/// How and when the next sampling instant is decided. Self-triggered variants
/// check their tuning constraint at construction unless waived; a failed
/// check throws ConfigError.
class TriggerPolicy {
  public:
    using Variant = std::variant<Periodic, EventLebesgue, EventRelative, SelfTrigLebesgue, SelfTrigUniversal,
                                 SelfTrigNonlinear, SelfTrigGlobal, NominalPrediction>;

    static TriggerPolicy periodic(double h);
    static TriggerPolicy event_lebesgue(double delta);
    static TriggerPolicy event_relative(double sigma = 0.1);
    static TriggerPolicy self_trig_lebesgue(const ExpCertificate& cert, double interval_cap = 1.0);
    static TriggerPolicy self_trig_universal(const ExpCertificate& cert, const NuConstants& nu,
                                             Verification verification = Verification::kRequired);
    static TriggerPolicy self_trig_nonlinear(const KLCertificate& cert, const NuFunctions& nu, double delta,
                                             double w_bar, Verification verification = Verification::kRequired);
    static TriggerPolicy self_trig_global(const KLCertificate& cert, const LipschitzEnvelope& envelope,
                                          const NuFunctions& nu, double delta, double w_bar,
                                          Verification verification = Verification::kRequired);
    static TriggerPolicy nominal_prediction(Vector eta_nominal, EventRule rule, double prediction_dt,
                                            double horizon_cap = 1.0);

    [[nodiscard]] const Variant& variant() const noexcept { return variant_; }
    [[nodiscard]] std::string kind_name() const;

    /// True when Γ is monitored along the true trajectory.
    [[nodiscard]] bool is_event_triggered() const noexcept;
    /// True for the closed-form samplers (interval is a function of ‖x_k‖).
    [[nodiscard]] bool is_closed_form() const noexcept;
    /// Closed-form interval for ‖x_k‖; ContractViolation for other kinds.
    [[nodiscard]] double closed_form_interval(double x_k_norm) const;

    /// Event rule monitored by event-triggered kinds.
    [[nodiscard]] EventRule event_rule() const;

    /// Lower bound on consecutive sampling instants while ‖x_k‖ ≤ radius.
    [[nodiscard]] double declared_min_interval(double radius) const;

    [[nodiscard]] bool verification_waived() const noexcept { return waived_; }
    /// δ − sup φ from the construction-time tuning check (ν kinds, when not waived).
    [[nodiscard]] const std::optional<double>& tuning_margin() const noexcept { return margin_; }

  private:
    explicit TriggerPolicy(Variant v) : variant_(std::move(v)) {}

    Variant variant_;
    bool waived_ = false;
    std::optional<double> margin_;
};

}  // namespace stc
