#include "stc/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "stc/errors.hpp"

namespace stc {

namespace {

const Json& require(const Json& j, const char* key, const std::string& context) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(context + ": missing field '" + key + "'");
    return j.at(key);
}

double number(const Json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + ": expected a number");
    return j.get<double>();
}

double number_or(const Json& j, const char* key, double fallback, const std::string& context) {
    if (!j.contains(key)) return fallback;
    return number(j.at(key), context + "." + key);
}

Vector vector_of(const Json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array()) throw ConfigError(what + ": expected a number or an array of numbers");
    Vector v;
    for (const auto& e : j) v.push_back(number(e, what));
    return v;
}

template <class Fn>
auto wrap(const std::string& context, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(context + ": " + e.what());
    }
}

NuConstants parse_nu_constants(const Json& j) {
    const std::string ctx = "nu";
    return NuConstants{number(require(j, "nu0", ctx), "nu0"), number(require(j, "nu1", ctx), "nu1"),
                       number(require(j, "nu2", ctx), "nu2"), number(require(j, "nu3", ctx), "nu3")};
}

NuFunctions parse_nu_functions(const Json& j) {
    const std::string ctx = "nu";
    return NuFunctions{parse_radial(require(j, "nu0", ctx)), parse_radial(require(j, "nu1", ctx)),
                       parse_radial(require(j, "nu2", ctx)), parse_radial(require(j, "nu3", ctx))};
}

Verification verification_of(const Json& j) {
    return j.value("verify", true) ? Verification::kRequired : Verification::kWaived;
}

EventRule parse_rule(const Json& j) {
    const auto kind = require(j, "kind", "rule").get<std::string>();
    if (kind == "relative") return {EventRule::Kind::kRelative, number_or(j, "sigma", 0.1, "rule")};
    if (kind == "lebesgue") return {EventRule::Kind::kLebesgue, number(require(j, "delta", "rule"), "rule.delta")};
    throw ConfigError("rule: unknown kind '" + kind + "'");
}

LipschitzEnvelope parse_envelope(const Json& j, const PlantBundle& plant, const KLCertificate& kl, double w_bar,
                                 double delta) {
    if (j.is_object() && j.contains("estimate")) {
        const Json& e = j.at("estimate");
        LipschitzEstimateOptions opts;
        opts.resolution = e.value("resolution", opts.resolution);
        opts.eta_points = e.value("eta_points", opts.eta_points);
        opts.safety_factor = e.value("safety_factor", opts.safety_factor);
        const auto radii = vector_of(require(e, "radii", "envelope.estimate"), "envelope.estimate.radii");
        return build_lipschitz_envelope(plant.model, plant.law, kl, w_bar, delta, radii, opts);
    }
    return LipschitzEnvelope(parse_radial(j));
}

Json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

const char* assertion_kind_name(Assertion::Kind k) {
    switch (k) {
        case Assertion::Kind::kWithin: return "within";
        case Assertion::Kind::kGreater: return "greater";
        case Assertion::Kind::kBounded: return "bounded";
        case Assertion::Kind::kUltimateBound: return "ultimate_bound";
    }
    return "unknown";
}

}  // namespace

Json load_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path.string());
    try {
        return Json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ExpCertificate parse_certificate(const Json& j) {
    return wrap("certificate", [&] {
        ExpCertificate c;
        const std::string ctx = "certificate";
        c.m1 = number_or(j, "m1", c.m1, ctx);
        c.m2 = number_or(j, "m2", c.m2, ctx);
        c.l = number_or(j, "l", c.l, ctx);
        c.w_bar = number_or(j, "w_bar", c.w_bar, ctx);
        c.delta = number_or(j, "delta", c.delta, ctx);
        return c;
    });
}

KLCertificate parse_kl_certificate(const Json& j) {
    return wrap("kl_certificate", [&] {
        const std::string ctx = "kl_certificate";
        return KLCertificate{parse_radial(require(j, "beta0", ctx)), parse_radial(require(j, "gamma1", ctx)),
                             parse_radial(require(j, "gamma2", ctx)), number(require(j, "l", ctx), ctx + ".l")};
    });
}

RadialFunction parse_radial(const Json& j) {
    if (j.is_number()) return RadialFunction::constant(j.get<double>());
    if (j.is_string()) return RadialFunction::parse(j.get<std::string>());
    throw ConfigError("radial function: expected a preset string or a number");
}

TriggerPolicy parse_policy(const Json& j, const PlantBundle& plant, double dt) {
    return wrap("policy", [&]() -> TriggerPolicy {
        const auto kind = require(j, "kind", "policy").get<std::string>();
        const std::string ctx = "policy(" + kind + ")";
        if (kind == "continuous") return TriggerPolicy::periodic(dt);
        if (kind == "periodic") return TriggerPolicy::periodic(number(require(j, "h", ctx), ctx + ".h"));
        if (kind == "event_lebesgue")
            return TriggerPolicy::event_lebesgue(number(require(j, "delta", ctx), ctx + ".delta"));
        if (kind == "event_relative") return TriggerPolicy::event_relative(number_or(j, "sigma", 0.1, ctx));
        if (kind == "self_trig_lebesgue")
            return TriggerPolicy::self_trig_lebesgue(parse_certificate(require(j, "certificate", ctx)),
                                                     number_or(j, "interval_cap", 1.0, ctx));
        if (kind == "self_trig_universal")
            return TriggerPolicy::self_trig_universal(parse_certificate(require(j, "certificate", ctx)),
                                                      parse_nu_constants(require(j, "nu", ctx)), verification_of(j));
        if (kind == "self_trig_nonlinear")
            return TriggerPolicy::self_trig_nonlinear(
                parse_kl_certificate(require(j, "kl_certificate", ctx)), parse_nu_functions(require(j, "nu", ctx)),
                number(require(j, "delta", ctx), ctx + ".delta"), number_or(j, "w_bar", 0.0, ctx), verification_of(j));
        if (kind == "self_trig_global") {
            const auto kl = parse_kl_certificate(require(j, "kl_certificate", ctx));
            const double delta = number(require(j, "delta", ctx), ctx + ".delta");
            const double w_bar = number_or(j, "w_bar", 0.0, ctx);
            const auto env = parse_envelope(require(j, "envelope", ctx), plant, kl, w_bar, delta);
            return TriggerPolicy::self_trig_global(kl, env, parse_nu_functions(require(j, "nu", ctx)), delta, w_bar,
                                                   verification_of(j));
        }
        if (kind == "nominal_prediction") {
            const auto eta = vector_of(require(j, "eta_nominal", ctx), ctx + ".eta_nominal");
            if (!plant.model.eta_range().contains(eta))
                throw DomainError("nominal_prediction: eta_nominal outside the model's box");
            const EventRule rule = j.contains("rule") ? parse_rule(j.at("rule")) : EventRule{};
            return TriggerPolicy::nominal_prediction(eta, rule, number_or(j, "prediction_dt", dt, ctx),
                                                     number_or(j, "horizon_cap", 1.0, ctx));
        }
        throw ConfigError("policy: unknown kind '" + kind + "'");
    });
}

namespace {

void check_eta(const Vector& eta, const PlantModel& model) {
    if (!model.eta_range().contains(eta)) throw ConfigError("eta: value outside the model's parameter box");
}

}  // namespace

EtaSchedule parse_eta(const Json& j, const PlantModel& model, std::uint64_t seed) {
    return wrap("eta", [&] {
        if (j.is_object() && j.contains("draw")) {
            if (j.at("draw") != "uniform") throw ConfigError("eta: only uniform draws are supported");
            std::mt19937_64 rng(seed);
            const Box& box = model.eta_range();
            Vector eta(box.dim());
            for (std::size_t i = 0; i < eta.size(); ++i)
                eta[i] = std::uniform_real_distribution<double>(box.lower[i], box.upper[i])(rng);
            return EtaSchedule(eta);
        }
        if (j.is_object() && j.contains("schedule")) {
            std::vector<std::pair<double, Vector>> pieces;
            for (const auto& p : j.at("schedule")) {
                if (!p.is_array() || p.size() != 2) throw ConfigError("eta.schedule: entries are [t, eta]");
                pieces.emplace_back(number(p[0], "eta.schedule time"), vector_of(p[1], "eta.schedule value"));
            }
            for (const auto& [t, eta] : pieces) check_eta(eta, model);
            return EtaSchedule(std::move(pieces));
        }
        Vector eta = vector_of(j, "eta");
        check_eta(eta, model);
        return EtaSchedule(std::move(eta));
    });
}

DisturbanceProfile parse_disturbance(const Json* j, const PlantModel& model) {
    if (j == nullptr || j->is_null()) return DisturbanceProfile::none(model.dim_disturbance());
    return wrap("disturbance", [&] {
        std::vector<DisturbanceSegment> segments;
        if (j->contains("segments")) {
            for (const auto& s : j->at("segments")) {
                segments.push_back({number(require(s, "start", "segment"), "segment.start"),
                                    number(require(s, "end", "segment"), "segment.end"),
                                    vector_of(require(s, "value", "segment"), "segment.value")});
            }
        }
        double bound = 0.0;
        for (const auto& s : segments) bound = std::max(bound, norm(s.value));
        bound = number_or(*j, "bound", bound, "disturbance");
        return DisturbanceProfile(model.dim_disturbance(), std::move(segments), bound);
    });
}

Scenario parse_scenario(const Json& j) {
    return wrap("scenario", [&] {
        const std::string ctx = "scenario";
        PlantBundle plant = make_plant(j.value("plant", std::string("rigid_body")));
        const double dt = number_or(j, "dt", 1e-4, ctx);
        const auto seed = j.value("seed", std::uint64_t{0});
        const Json* dist = j.contains("disturbance") ? &j.at("disturbance") : nullptr;
        Scenario s{
            .id = j.value("id", std::string("scenario")),
            .model = plant.model,
            .law = plant.law,
            .policy = parse_policy(require(j, "policy", ctx), plant, dt),
            .eta = parse_eta(require(j, "eta", ctx), plant.model, seed),
            .x0 = vector_of(require(j, "x0", ctx), "scenario.x0"),
            .horizon = number_or(j, "horizon", 15.0, ctx),
            .dt = dt,
            .disturbance = parse_disturbance(dist, plant.model),
            .seed = seed,
            .blowup_radius = number_or(j, "blowup_radius", 1e6, ctx),
        };
        try {
            validate(s);
        } catch (const std::logic_error& e) {
            throw ConfigError(std::string("scenario: ") + e.what());
        }
        return s;
    });
}

ExperimentConfig parse_experiment(const Json& j) {
    return wrap("experiment", [&] {
        const std::string ctx = "experiment";
        PlantBundle plant = make_plant(j.value("plant", std::string("rigid_body")));
        const double dt = number_or(j, "dt", 1e-4, ctx);
        const Json* dist = j.contains("disturbance") ? &j.at("disturbance") : nullptr;
        ExperimentConfig c{
            .id = j.value("id", std::string("experiment")),
            .plant = plant,
            .eta = parse_eta(require(j, "eta", ctx), plant.model, j.value("seed", std::uint64_t{0})),
            .horizon = number_or(j, "horizon", 15.0, ctx),
            .dt = dt,
            .disturbance = parse_disturbance(dist, plant.model),
            .blowup_radius = number_or(j, "blowup_radius", 1e6, ctx),
        };
        if (j.contains("initial_conditions")) {
            const Json& ic = j.at("initial_conditions");
            c.ic_count = ic.value("count", c.ic_count);
            c.ic_radius = number_or(ic, "radius", c.ic_radius, "initial_conditions");
            c.ic_seed = ic.value("seed", c.ic_seed);
        }
        if (j.contains("ultimate_cutoff")) c.ultimate_cutoff = number(j.at("ultimate_cutoff"), "ultimate_cutoff");
        for (const auto& p : require(j, "policies", ctx)) {
            const auto label = require(p, "label", "policies[]").get<std::string>();
            c.policies.push_back({label, parse_policy(require(p, "policy", "policies[" + label + "]"), plant, dt)});
        }
        if (j.contains("assertions")) {
            for (const auto& a : j.at("assertions")) {
                Assertion as;
                const auto kind = require(a, "kind", "assertion").get<std::string>();
                if (kind == "within") {
                    as.kind = Assertion::Kind::kWithin;
                } else if (kind == "greater") {
                    as.kind = Assertion::Kind::kGreater;
                } else if (kind == "bounded") {
                    as.kind = Assertion::Kind::kBounded;
                } else if (kind == "ultimate_bound") {
                    as.kind = Assertion::Kind::kUltimateBound;
                } else {
                    throw ConfigError("assertion: unknown kind '" + kind + "'");
                }
                as.a = require(a, "a", "assertion").get<std::string>();
                as.b = a.value("b", std::string{});
                as.tolerance = number_or(a, "tolerance", as.tolerance, "assertion");
                c.assertions.push_back(std::move(as));
            }
        }
        return c;
    });
}

TuneOutcome tune_from_config(const Json& j) {
    return wrap("tune", [&] {
        PlantBundle plant = make_plant(j.value("plant", std::string("rigid_body")));
        const Json& pj = require(j, "policy", "tune");
        Json waived = pj;
        waived["verify"] = false;
        const TriggerPolicy policy = parse_policy(waived, plant, number_or(j, "dt", 1e-4, "tune"));

        TuneOutcome out;
        TuningReport report;
        if (const auto* p = std::get_if<SelfTrigUniversal>(&policy.variant())) {
            report = perturbation_sup_exponential(p->cert, p->nu);
            if (pj.contains("bounds")) {
                const Json& b = pj.at("bounds");
                const double x0 = number(require(b, "x0_norm", "bounds"), "bounds.x0_norm");
                const double ub = number(require(b, "ultimate_bound", "bounds"), "bounds.ultimate_bound");
                out.report["interval_bounds"] = to_json(interval_bounds(p->nu, p->cert.envelope(x0), ub));
            }
        } else if (const auto* p = std::get_if<SelfTrigNonlinear>(&policy.variant())) {
            report = perturbation_sup_asymptotic(p->cert, p->w_bar, p->delta, p->nu);
        } else if (const auto* p = std::get_if<SelfTrigGlobal>(&policy.variant())) {
            report = perturbation_sup_global(p->cert, p->envelope, p->w_bar, p->delta, p->nu);
        } else {
            throw ConfigError("tune: policy '" + policy.kind_name() + "' has no tuning constraint");
        }
        out.report["kind"] = policy.kind_name();
        out.report["tuning"] = to_json(report);
        out.feasible = report.feasible;

        if (j.contains("suggest")) {
            const Json& s = j.at("suggest");
            const auto cert = parse_certificate(require(s, "certificate", "suggest"));
            const auto sug = suggest_nu(cert, number(require(s, "h_mid", "suggest"), "suggest.h_mid"),
                                        number(require(s, "h_max", "suggest"), "suggest.h_max"),
                                        number(require(s, "ultimate_bound", "suggest"), "suggest.ultimate_bound"),
                                        number_or(s, "nu2", 1.0, "suggest"));
            out.report["suggestion"] = {
                {"nu", {{"nu0", sug.nu.nu0}, {"nu1", sug.nu.nu1}, {"nu2", sug.nu.nu2}, {"nu3", sug.nu.nu3}}},
                {"limiting_case", sug.limiting_case},
                {"tuning", to_json(sug.report)},
            };
        }
        return out;
    });
}

Json to_json(const TuningReport& r) {
    return {{"sup_value", finite_or_string(r.sup_value)}, {"argmax_r", finite_or_string(r.argmax_r)},
            {"delta_budget", r.delta_budget},             {"feasible", r.feasible},
            {"margin", finite_or_string(r.margin)}};
}

Json to_json(const IntervalBounds& b) { return {{"h_min", b.h_min}, {"h_mid", b.h_mid}, {"h_max", b.h_max}}; }

Json to_json(const MetricsReport& m) {
    Json j{{"J", m.cost},
           {"ultimate_bound_est", finite_or_string(m.ultimate_bound)},
           {"samples", m.samples},
           {"diverged", m.diverged},
           {"prediction_cap_hits", m.prediction_cap_hits}};
    if (m.intervals) {
        j["avg_interval"] = m.intervals->avg;
        j["min_interval"] = m.intervals->min;
        j["max_interval"] = m.intervals->max;
    } else {
        j["avg_interval"] = nullptr;
        j["min_interval"] = nullptr;
        j["max_interval"] = nullptr;
    }
    if (m.diverged) j["divergence_time"] = m.divergence_time;
    return j;
}

Json to_json(const TableReport& t) {
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        Json runs = Json::array();
        for (const auto& m : r.runs) runs.push_back(to_json(m));
        rows.push_back({{"label", r.label},
                        {"kind", r.kind},
                        {"J_avg", r.j_avg},
                        {"avg_interval_ms", r.avg_interval ? Json(*r.avg_interval * 1e3) : Json(nullptr)},
                        {"min_interval_ms", r.min_interval ? Json(*r.min_interval * 1e3) : Json(nullptr)},
                        {"max_ultimate_bound", finite_or_string(r.max_ultimate_bound)},
                        {"diverged_runs", r.diverged_runs},
                        {"runs", std::move(runs)}});
    }
    Json assertions = Json::array();
    for (const auto& a : t.assertions) {
        assertions.push_back({{"kind", assertion_kind_name(a.assertion.kind)},
                              {"a", a.assertion.a},
                              {"b", a.assertion.b},
                              {"tolerance", a.assertion.tolerance},
                              {"passed", a.passed},
                              {"detail", a.detail}});
    }
    return {{"id", t.id},
            {"initial_conditions", t.ic_count},
            {"horizon", t.horizon},
            {"dt", t.dt},
            {"table", std::move(rows)},
            {"assertions", std::move(assertions)},
            {"all_passed", t.all_passed()}};
}

}  // namespace stc
