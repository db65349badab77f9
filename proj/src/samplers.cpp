#include "stc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stc/errors.hpp"
#include "stc/tuning.hpp"

namespace stc {

void validate(const NuConstants& nu) {
    const bool finite = std::isfinite(nu.nu0) && std::isfinite(nu.nu1) && std::isfinite(nu.nu2) && std::isfinite(nu.nu3);
    if (!finite) throw ContractViolation("NuConstants: non-finite coefficient");
    if (!(nu.nu0 > 0.0)) throw ContractViolation("NuConstants: nu0 must be > 0");
    if (!(nu.nu1 > 0.0)) throw ContractViolation("NuConstants: nu1 must be > 0");
    if (!(nu.nu2 >= 0.0)) throw ContractViolation("NuConstants: nu2 must be >= 0");
    if (!(nu.nu3 > 0.0)) throw ContractViolation("NuConstants: nu3 must be > 0");
}

void validate(const NuFunctions& nu, double r_max) {
    constexpr int kPoints = 2001;
    for (int i = 0; i < kPoints; ++i) {
        const double r = r_max * i / (kPoints - 1);
        if (r > nu.nu0.domain_max() || r > nu.nu1.domain_max() || r > nu.nu2.domain_max() || r > nu.nu3.domain_max())
            break;
        const double n0 = nu.nu0(r), n1 = nu.nu1(r), n2 = nu.nu2(r), n3 = nu.nu3(r);
        if (!(n0 > 0.0)) throw ContractViolation("NuFunctions: nu0 must be > 0");
        if (!(n1 > 0.0)) throw ContractViolation("NuFunctions: nu1 must be > 0");
        if (!(n2 >= 0.0) || !(n3 >= 0.0)) throw ContractViolation("NuFunctions: nu2 and nu3 must be >= 0");
        if (!(n2 + n3 > 0.0)) throw ContractViolation("NuFunctions: nu2 + nu3 must be > 0");
    }
}

NuFunctions to_functions(const NuConstants& nu) {
    return {RadialFunction::constant(nu.nu0), RadialFunction::constant(nu.nu1), RadialFunction::linear(nu.nu2),
            RadialFunction::constant(nu.nu3)};
}

double next_interval_lebesgue(const ExpCertificate& cert, double x_k_norm, double cap) {
    const double env = cert.envelope(x_k_norm);
    if (env == 0.0) return cap;
    return std::log1p(cert.delta / env) / cert.l;
}

double next_interval_universal(const NuConstants& nu, double x_k_norm) {
    return std::log1p(nu.nu0 / (nu.nu2 * x_k_norm + nu.nu3)) / nu.nu1;
}

double next_interval_nonlinear(const NuFunctions& nu, double x_k_norm) {
    return std::log1p(nu.nu0(x_k_norm) / (nu.nu2(x_k_norm) + nu.nu3(x_k_norm))) / nu.nu1(x_k_norm);
}

double next_interval_global(const NuFunctions& nu, double x_k_norm) {
    return std::log1p(nu.nu0(x_k_norm) / (nu.nu2(x_k_norm) + nu.nu3(x_k_norm))) / nu.nu1(x_k_norm);
}

double event_value_lebesgue(std::span<const double> x, std::span<const double> x_k, double delta) {
    return distance(x_k, x) - delta;
}

double event_value_relative(std::span<const double> x, std::span<const double> x_k, double sigma) {
    const double d = distance(x_k, x);
    return d * d - kRelativeRuleGain * kRelativeRuleGain * sigma * sigma * squared_norm(x);
}

IntervalBounds interval_bounds(const NuConstants& nu, double x0_envelope, double ultimate_bound) {
    if (!(x0_envelope > 0.0) || !(ultimate_bound > 0.0))
        throw ContractViolation("interval_bounds: envelope and ultimate bound must be positive");
    return {next_interval_universal(nu, x0_envelope), next_interval_universal(nu, ultimate_bound),
            next_interval_universal(nu, 0.0)};
}

PredictedInterval next_interval_nominal_prediction(const PlantModel& model, const ControlLaw& law,
                                                   std::span<const double> eta_nominal, const EventRule& rule,
                                                   std::span<const double> x_k, double prediction_dt,
                                                   double horizon_cap) {
    if (!(prediction_dt > 0.0) || !(horizon_cap > 0.0))
        throw ContractViolation("nominal prediction: dt and horizon cap must be positive");
    if (x_k.size() != model.dim_state() || eta_nominal.size() != model.dim_eta())
        throw ContractViolation("nominal prediction: dimension mismatch");

    const Vector u = law(x_k);
    const auto quiet = DisturbanceProfile::none(model.dim_disturbance());
    Rk4Integrator integrator(model);

    // x_k = 0 under the relative rule gives Γ ≡ 0 at the start; then only a
    // strictly positive value counts as an event.
    const bool degenerate = !(rule.value(x_k, x_k) < 0.0);
    auto fired = [degenerate](double g) { return std::isnan(g) || (degenerate ? g > 0.0 : g >= 0.0); };

    Vector x(x_k.begin(), x_k.end());
    Vector start(x.size());
    Vector probe(x.size());
    double t = 0.0;
    while (t < horizon_cap) {
        const double h = std::min(prediction_dt, horizon_cap - t);
        start = x;
        integrator.step(u, eta_nominal, quiet, x, t, h);
        if (fired(rule.value(x, x_k))) {
            if (degenerate) return {t + h, false};
            double lo = 0.0, hi = h;
            while (hi - lo > kEventResolution) {
                const double mid = 0.5 * (lo + hi);
                probe = start;
                integrator.step(u, eta_nominal, quiet, probe, t, mid);
                if (fired(rule.value(probe, x_k))) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return {t + hi, false};
        }
        t += h;
    }
    return {horizon_cap, true};
}

// TriggerPolicy ----------------------------------------------------------

namespace {

void require_nonlinear_shape(const NuFunctions& nu) {
    if (!nu.nu0.is_constant() || !nu.nu1.is_constant() || !nu.nu3.is_constant())
        throw ContractViolation("nonlinear sampler: only nu2 may depend on the radius");
}

std::string margin_message(const char* what, const TuningReport& r) {
    std::ostringstream os;
    os << what << ": tuning constraint violated (sup " << r.sup_value << " > delta " << r.delta_budget << ")";
    return os.str();
}

}  // namespace

TriggerPolicy TriggerPolicy::periodic(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ContractViolation("periodic policy: h must be positive");
    return TriggerPolicy(Periodic{h});
}

TriggerPolicy TriggerPolicy::event_lebesgue(double delta) {
    if (!(delta > 0.0)) throw ContractViolation("event_lebesgue policy: delta must be positive");
    return TriggerPolicy(EventLebesgue{delta});
}

TriggerPolicy TriggerPolicy::event_relative(double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw ContractViolation("event_relative policy: sigma must lie in (0, 1)");
    return TriggerPolicy(EventRelative{sigma});
}

TriggerPolicy TriggerPolicy::self_trig_lebesgue(const ExpCertificate& cert, double interval_cap) {
    validate(cert);
    if (!(interval_cap > 0.0)) throw ContractViolation("self_trig_lebesgue policy: interval cap must be positive");
    return TriggerPolicy(SelfTrigLebesgue{cert, interval_cap});
}

TriggerPolicy TriggerPolicy::self_trig_universal(const ExpCertificate& cert, const NuConstants& nu,
                                                 Verification verification) {
    validate(cert);
    validate(nu);
    TriggerPolicy p(SelfTrigUniversal{cert, nu});
    p.waived_ = verification == Verification::kWaived;
    if (!p.waived_) {
        const auto report = perturbation_sup_exponential(cert, nu);
        if (!report.feasible) throw ConfigError(margin_message("self_trig_universal", report));
        p.margin_ = report.margin;
    }
    return p;
}

TriggerPolicy TriggerPolicy::self_trig_nonlinear(const KLCertificate& cert, const NuFunctions& nu, double delta,
                                                 double w_bar, Verification verification) {
    validate(cert);
    validate(nu);
    require_nonlinear_shape(nu);
    if (!(delta > 0.0) || !(w_bar >= 0.0)) throw ContractViolation("self_trig_nonlinear: need delta > 0, w_bar >= 0");
    TriggerPolicy p(SelfTrigNonlinear{cert, nu, delta, w_bar});
    p.waived_ = verification == Verification::kWaived;
    if (!p.waived_) {
        const auto report = perturbation_sup_asymptotic(cert, w_bar, delta, nu);
        if (!report.feasible) throw ConfigError(margin_message("self_trig_nonlinear", report));
        p.margin_ = report.margin;
    }
    return p;
}

TriggerPolicy TriggerPolicy::self_trig_global(const KLCertificate& cert, const LipschitzEnvelope& envelope,
                                              const NuFunctions& nu, double delta, double w_bar,
                                              Verification verification) {
    validate(cert);
    validate(nu, std::min(1e3, envelope.max_radius()));
    if (!(delta > 0.0) || !(w_bar >= 0.0)) throw ContractViolation("self_trig_global: need delta > 0, w_bar >= 0");
    TriggerPolicy p(SelfTrigGlobal{cert, envelope, nu, delta, w_bar});
    p.waived_ = verification == Verification::kWaived;
    if (!p.waived_) {
        const auto report = perturbation_sup_global(cert, envelope, w_bar, delta, nu);
        if (!report.feasible) throw ConfigError(margin_message("self_trig_global", report));
        p.margin_ = report.margin;
    }
    return p;
}

TriggerPolicy TriggerPolicy::nominal_prediction(Vector eta_nominal, EventRule rule, double prediction_dt,
                                                double horizon_cap) {
    if (!(prediction_dt > 0.0) || !(horizon_cap > 0.0))
        throw ContractViolation("nominal_prediction policy: dt and horizon cap must be positive");
    if (rule.kind == EventRule::Kind::kRelative && !(rule.parameter > 0.0 && rule.parameter < 1.0))
        throw ContractViolation("nominal_prediction policy: sigma must lie in (0, 1)");
    if (rule.kind == EventRule::Kind::kLebesgue && !(rule.parameter > 0.0))
        throw ContractViolation("nominal_prediction policy: delta must be positive");
    return TriggerPolicy(NominalPrediction{std::move(eta_nominal), rule, prediction_dt, horizon_cap});
}

std::string TriggerPolicy::kind_name() const {
    struct Visitor {
        std::string operator()(const Periodic&) const { return "periodic"; }
        std::string operator()(const EventLebesgue&) const { return "event_lebesgue"; }
        std::string operator()(const EventRelative&) const { return "event_relative"; }
        std::string operator()(const SelfTrigLebesgue&) const { return "self_trig_lebesgue"; }
        std::string operator()(const SelfTrigUniversal&) const { return "self_trig_universal"; }
        std::string operator()(const SelfTrigNonlinear&) const { return "self_trig_nonlinear"; }
        std::string operator()(const SelfTrigGlobal&) const { return "self_trig_global"; }
        std::string operator()(const NominalPrediction&) const { return "nominal_prediction"; }
    };
    return std::visit(Visitor{}, variant_);
}

bool TriggerPolicy::is_event_triggered() const noexcept {
    return std::holds_alternative<EventLebesgue>(variant_) || std::holds_alternative<EventRelative>(variant_);
}

bool TriggerPolicy::is_closed_form() const noexcept {
    return std::holds_alternative<SelfTrigLebesgue>(variant_) || std::holds_alternative<SelfTrigUniversal>(variant_) ||
           std::holds_alternative<SelfTrigNonlinear>(variant_) || std::holds_alternative<SelfTrigGlobal>(variant_);
}

double TriggerPolicy::closed_form_interval(double x_k_norm) const {
    if (const auto* p = std::get_if<SelfTrigLebesgue>(&variant_))
        return next_interval_lebesgue(p->cert, x_k_norm, p->interval_cap);
    if (const auto* p = std::get_if<SelfTrigUniversal>(&variant_)) return next_interval_universal(p->nu, x_k_norm);
    if (const auto* p = std::get_if<SelfTrigNonlinear>(&variant_)) return next_interval_nonlinear(p->nu, x_k_norm);
    if (const auto* p = std::get_if<SelfTrigGlobal>(&variant_)) return next_interval_global(p->nu, x_k_norm);
    throw ContractViolation("closed_form_interval: policy '" + kind_name() + "' has no closed form");
}

EventRule TriggerPolicy::event_rule() const {
    if (const auto* p = std::get_if<EventLebesgue>(&variant_)) return {EventRule::Kind::kLebesgue, p->delta};
    if (const auto* p = std::get_if<EventRelative>(&variant_)) return {EventRule::Kind::kRelative, p->sigma};
    if (const auto* p = std::get_if<NominalPrediction>(&variant_)) return p->rule;
    throw ContractViolation("event_rule: policy '" + kind_name() + "' has no event rule");
}

double TriggerPolicy::declared_min_interval(double radius) const {
    if (const auto* p = std::get_if<Periodic>(&variant_)) return p->h;
    if (std::holds_alternative<SelfTrigLebesgue>(variant_) || std::holds_alternative<SelfTrigUniversal>(variant_))
        return closed_form_interval(radius);
    if (is_closed_form()) {
        // No monotonicity is assumed for radius-dependent coefficients.
        constexpr int kPoints = 1001;
        double lowest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kPoints; ++i) lowest = std::min(lowest, closed_form_interval(radius * i / (kPoints - 1)));
        return lowest;
    }
    return 0.0;
}

}  // namespace stc
