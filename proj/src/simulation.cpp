#include "stc/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "stc/errors.hpp"

namespace stc {

std::vector<std::size_t> Trace::sample_indices() const {
    std::vector<std::size_t> idx;
    idx.reserve(sample_instants.size());
    for (std::size_t i = 0; i < is_sample.size(); ++i) {
        if (is_sample[i]) idx.push_back(i);
    }
    return idx;
}

void validate(const Scenario& s) {
    if (!(s.horizon > 0.0) || !std::isfinite(s.horizon)) throw ContractViolation("scenario: horizon must be positive");
    if (!(s.dt > 0.0)) throw ContractViolation("scenario: dt must be positive");
    if (!(s.blowup_radius > 0.0)) throw ContractViolation("scenario: blow-up radius must be positive");
    if (s.x0.size() != s.model.dim_state()) throw ContractViolation("scenario: x0 dimension mismatch");
    if (norm(s.x0) > s.model.state_domain_radius()) throw DomainError("scenario: x0 outside the model domain");
    if (s.law.dim_state() != s.model.dim_state() || s.law.dim_input() != s.model.dim_input())
        throw ContractViolation("scenario: control law does not match the plant");
    if (s.disturbance.dim() != s.model.dim_disturbance())
        throw ContractViolation("scenario: disturbance dimension mismatch");
    if (s.eta.pieces().empty()) throw ContractViolation("scenario: empty eta schedule");
    for (const auto& [t, eta] : s.eta.pieces()) {
        if (!s.model.eta_range().contains(eta)) throw DomainError("scenario: eta schedule leaves the model's box");
    }
    if (const auto* np = std::get_if<NominalPrediction>(&s.policy.variant())) {
        if (np->eta_nominal.size() != s.model.dim_eta())
            throw ContractViolation("scenario: nominal eta dimension mismatch");
    }
}

namespace {

class TraceWriter {
  public:
    TraceWriter(Trace& trace, const DisturbanceProfile& profile)
        : trace_(trace), profile_(profile), w_(profile.dim()) {}

    void push(double t, std::span<const double> x, std::span<const double> u) {
        trace_.times.push_back(t);
        trace_.states.insert(trace_.states.end(), x.begin(), x.end());
        trace_.inputs.insert(trace_.inputs.end(), u.begin(), u.end());
        profile_.value_at(t, w_);
        trace_.disturbances.insert(trace_.disturbances.end(), w_.begin(), w_.end());
        trace_.is_sample.push_back(0);
    }

    // The last point becomes a sample instant carrying the new held input.
    void mark_last_as_sample(std::span<const double> u) {
        const std::size_t i = trace_.times.size() - 1;
        std::copy(u.begin(), u.end(), trace_.inputs.begin() + static_cast<std::ptrdiff_t>(i * trace_.dim_input));
        trace_.is_sample[i] = 1;
        trace_.sample_instants.push_back(trace_.times[i]);
    }

  private:
    Trace& trace_;
    const DisturbanceProfile& profile_;
    Vector w_;
};

std::vector<double> merged_breakpoints(const Scenario& s) {
    auto bp = s.disturbance.breakpoints();
    const auto eb = s.eta.breakpoints();
    bp.insert(bp.end(), eb.begin(), eb.end());
    std::erase_if(bp, [&](double t) { return !(t > 0.0 && t < s.horizon); });
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

}  // namespace

Trace simulate(const Scenario& s) {
    validate(s);
    const PlantModel& model = s.model;
    const std::size_t n = model.dim_state();

    Trace tr;
    tr.scenario_id = s.id;
    tr.dim_state = n;
    tr.dim_input = model.dim_input();
    tr.dim_disturbance = model.dim_disturbance();
    tr.eta_schedule = s.eta;
    const auto expected = static_cast<std::size_t>(s.horizon / s.dt * 1.05) + 16;
    tr.times.reserve(expected);
    tr.states.reserve(expected * n);
    tr.inputs.reserve(expected * tr.dim_input);
    tr.disturbances.reserve(expected * tr.dim_disturbance);
    tr.is_sample.reserve(expected);

    const auto breakpoints = merged_breakpoints(s);
    const TriggerPolicy& policy = s.policy;
    const bool event_driven = policy.is_event_triggered();
    const EventRule rule = event_driven ? policy.event_rule() : EventRule{};
    const auto* periodic = std::get_if<Periodic>(&policy.variant());
    const auto* prediction = std::get_if<NominalPrediction>(&policy.variant());

    TraceWriter writer(tr, s.disturbance);
    Rk4Integrator integrator(model);
    Vector x = s.x0;
    Vector x_k(n), start(n), probe(n), u(model.dim_input());
    double t = 0.0;
    std::size_t k = 0;
    writer.push(t, x, u);

    while (true) {
        x_k = x;
        s.law.evaluate(x_k, u);
        writer.mark_last_as_sample(u);

        double target = std::numeric_limits<double>::infinity();
        if (periodic != nullptr) {
            target = static_cast<double>(k + 1) * periodic->h;
            tr.requested_intervals.push_back(periodic->h);
        } else if (policy.is_closed_form()) {
            const double h = policy.closed_form_interval(norm(x_k));
            tr.requested_intervals.push_back(h);
            target = t + h;
        } else if (prediction != nullptr) {
            const auto p = next_interval_nominal_prediction(model, s.law, prediction->eta_nominal, prediction->rule, x_k,
                                                            prediction->prediction_dt, prediction->horizon_cap);
            tr.requested_intervals.push_back(p.interval);
            if (p.capped) ++tr.prediction_cap_hits;
            target = t + p.interval;
        }

        const bool degenerate = event_driven && !(rule.value(x_k, x_k) < 0.0);
        auto fired = [degenerate](double g) { return std::isnan(g) || (degenerate ? g > 0.0 : g >= 0.0); };

        const double end = std::min(target, s.horizon);
        bool resample = false;
        while (t < end) {
            double step_end = t + s.dt;
            const auto next_bp = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
            if (next_bp != breakpoints.end() && *next_bp < step_end) step_end = *next_bp;
            // Fold slivers into the step that lands on the interval end.
            if (step_end >= end || end - step_end < 1e-3 * s.dt) step_end = end;
            double h = step_end - t;

            const Vector& eta = s.eta.at(t);
            start = x;
            integrator.step(u, eta, s.disturbance, x, t, h);

            bool event = false;
            if (event_driven && fired(rule.value(x, x_k))) {
                event = true;
                if (!degenerate) {
                    double lo = 0.0, hi = h;
                    while (hi - lo > kEventResolution) {
                        const double mid = 0.5 * (lo + hi);
                        probe = start;
                        integrator.step(u, eta, s.disturbance, probe, t, mid);
                        if (fired(rule.value(probe, x_k))) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    if (hi < h) {
                        x = start;
                        integrator.step(u, eta, s.disturbance, x, t, hi);
                        h = hi;
                        step_end = t + hi;
                    }
                }
            }

            if (!all_finite(x) || norm(x) > s.blowup_radius) {
                tr.diverged = true;
                tr.divergence_time = step_end;
                return tr;
            }
            t = step_end;
            writer.push(t, x, u);
            if (event) {
                resample = true;
                break;
            }
        }
        if (t >= s.horizon) break;
        if (!resample && t < target) break;  // defensive: loop exited without reaching a sample
        ++k;
    }
    return tr;
}

std::vector<double> replay_event_times(const Trace& trace, const EventRule& rule) {
    std::vector<double> events;
    const auto samples = trace.sample_indices();
    const std::size_t n = trace.dim_state;
    Vector interp(n);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const std::size_t first = samples[s];
        const std::size_t last = s + 1 < samples.size() ? samples[s + 1] : trace.size() - 1;
        const auto x_k = trace.state(first);
        const bool degenerate = !(rule.value(x_k, x_k) < 0.0);
        auto fired = [degenerate](double g) { return std::isnan(g) || (degenerate ? g > 0.0 : g >= 0.0); };
        for (std::size_t i = first + 1; i <= last; ++i) {
            if (!fired(rule.value(trace.state(i), x_k))) continue;
            const double t0 = trace.times[i - 1];
            const double t1 = trace.times[i];
            if (degenerate) {
                events.push_back(t1);
                break;
            }
            const auto a = trace.state(i - 1);
            const auto b = trace.state(i);
            double lo = 0.0, hi = 1.0;
            while ((hi - lo) * (t1 - t0) > kEventResolution) {
                const double mid = 0.5 * (lo + hi);
                for (std::size_t j = 0; j < n; ++j) interp[j] = a[j] + mid * (b[j] - a[j]);
                if (fired(rule.value(interp, x_k))) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            events.push_back(t0 + hi * (t1 - t0));
            break;
        }
    }
    return events;
}

}  // namespace stc
