#include "stc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stc/errors.hpp"

namespace stc {

bool Box::contains(std::span<const double> p) const noexcept {
    if (p.size() != lower.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= lower[i] && p[i] <= upper[i])) return false;
    }
    return true;
}

PlantModel::PlantModel(std::string name, std::size_t dim_state, std::size_t dim_input, std::size_t dim_disturbance,
                       VectorField dynamics, Box eta_range, double state_domain_radius)
    : name_(std::move(name)),
      dim_state_(dim_state),
      dim_input_(dim_input),
      dim_disturbance_(dim_disturbance),
      dynamics_(std::move(dynamics)),
      eta_range_(std::move(eta_range)),
      state_domain_radius_(state_domain_radius) {
    if (dim_state_ == 0 || dim_input_ == 0) throw ContractViolation("PlantModel: dimensions must be positive");
    if (!dynamics_) throw ContractViolation("PlantModel: empty vector field");
    if (eta_range_.lower.size() != eta_range_.upper.size())
        throw ContractViolation("PlantModel: eta box bounds differ in size");
    for (std::size_t i = 0; i < eta_range_.dim(); ++i) {
        if (!(eta_range_.lower[i] <= eta_range_.upper[i]))
            throw ContractViolation("PlantModel: eta box lower bound exceeds upper bound");
    }
    if (!(state_domain_radius_ > 0.0)) throw ContractViolation("PlantModel: state domain radius must be positive");
}

ControlLaw::ControlLaw(std::size_t dim_state, std::size_t dim_input, FeedbackFunction law, double lipschitz_x)
    : dim_state_(dim_state), dim_input_(dim_input), law_(std::move(law)), lipschitz_x_(lipschitz_x) {
    if (!law_) throw ContractViolation("ControlLaw: empty feedback function");
    if (!(lipschitz_x_ >= 0.0)) throw ContractViolation("ControlLaw: Lipschitz constant must be nonnegative");
}

Vector ControlLaw::operator()(std::span<const double> x) const {
    if (x.size() != dim_state_) throw ContractViolation("ControlLaw: state dimension mismatch");
    Vector u(dim_input_, 0.0);
    law_(x, u);
    return u;
}

DisturbanceProfile::DisturbanceProfile(std::size_t dim, std::vector<DisturbanceSegment> segments, double bound)
    : dim_(dim), segments_(std::move(segments)), bound_(bound) {
    if (!(bound_ >= 0.0)) throw ContractViolation("DisturbanceProfile: bound must be nonnegative");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (s.value.size() != dim_) throw ContractViolation("DisturbanceProfile: segment dimension mismatch");
        if (!(s.t_start < s.t_end)) throw ContractViolation("DisturbanceProfile: empty or reversed segment");
        if (i > 0 && s.t_start < segments_[i - 1].t_end)
            throw ContractViolation("DisturbanceProfile: segments overlap or are out of order");
        if (norm(s.value) > bound_ * (1.0 + 1e-12))
            throw ContractViolation("DisturbanceProfile: segment value exceeds the declared bound");
    }
}

void DisturbanceProfile::value_at(double t, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& s : segments_) {
        if (t >= s.t_start && t < s.t_end) {
            std::copy(s.value.begin(), s.value.end(), out.begin());
            return;
        }
    }
}

void DisturbanceProfile::left_limit(double t, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& s : segments_) {
        if (t > s.t_start && t <= s.t_end) {
            std::copy(s.value.begin(), s.value.end(), out.begin());
            return;
        }
    }
}

std::vector<double> DisturbanceProfile::breakpoints() const {
    std::vector<double> bp;
    for (const auto& s : segments_) {
        bp.push_back(s.t_start);
        bp.push_back(s.t_end);
    }
    return bp;
}

EtaSchedule::EtaSchedule(Vector constant) { pieces_.emplace_back(0.0, std::move(constant)); }

EtaSchedule::EtaSchedule(std::vector<std::pair<double, Vector>> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw ContractViolation("EtaSchedule: no pieces");
    if (pieces_.front().first != 0.0) throw ContractViolation("EtaSchedule: first piece must start at t = 0");
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
        if (!(pieces_[i].first > pieces_[i - 1].first))
            throw ContractViolation("EtaSchedule: piece start times must increase");
        if (pieces_[i].second.size() != pieces_[0].second.size())
            throw ContractViolation("EtaSchedule: inconsistent eta dimension");
    }
}

const Vector& EtaSchedule::at(double t) const {
    if (pieces_.empty()) throw ContractViolation("EtaSchedule: empty schedule");
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](double v, const auto& piece) { return v < piece.first; });
    if (it == pieces_.begin()) return pieces_.front().second;
    return std::prev(it)->second;
}

std::vector<double> EtaSchedule::breakpoints() const {
    std::vector<double> bp;
    for (std::size_t i = 1; i < pieces_.size(); ++i) bp.push_back(pieces_[i].first);
    return bp;
}

Vector eval_closed_loop(const PlantModel& model, const ControlLaw& law, std::span<const double> eta,
                        std::span<const double> x, std::span<const double> u_held, std::span<const double> w) {
    if (x.size() != model.dim_state() || u_held.size() != model.dim_input() ||
        w.size() != model.dim_disturbance() || eta.size() != model.dim_eta() ||
        law.dim_state() != model.dim_state() || law.dim_input() != model.dim_input()) {
        throw ContractViolation("eval_closed_loop: dimension mismatch");
    }
    if (!model.eta_range().contains(eta)) throw DomainError("eval_closed_loop: eta outside the model's box");
    Vector dx(model.dim_state(), 0.0);
    model.evaluate(eta, x, u_held, w, dx);
    return dx;
}

Rk4Integrator::Rk4Integrator(const PlantModel& model)
    : model_(&model),
      k1_(model.dim_state()),
      k2_(model.dim_state()),
      k3_(model.dim_state()),
      k4_(model.dim_state()),
      tmp_(model.dim_state()),
      w0_(model.dim_disturbance()),
      wm_(model.dim_disturbance()),
      w1_(model.dim_disturbance()) {}

void Rk4Integrator::step(std::span<const double> u, std::span<const double> eta, const DisturbanceProfile& profile,
                         std::span<double> x, double t, double dt) {
    const std::size_t n = x.size();
    profile.value_at(t, w0_);
    profile.value_at(t + 0.5 * dt, wm_);
    profile.left_limit(t + dt, w1_);

    model_->evaluate(eta, x, u, w0_, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
    model_->evaluate(eta, tmp_, u, wm_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
    model_->evaluate(eta, tmp_, u, wm_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
    model_->evaluate(eta, tmp_, u, w1_, k4_);
    for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
}

Vector rk4_step(const PlantModel& model, std::span<const double> u_held, std::span<const double> eta,
                const DisturbanceProfile& profile, std::span<const double> x, double t, double dt) {
    if (!(dt > 0.0)) throw ContractViolation("rk4_step: dt must be positive");
    if (x.size() != model.dim_state() || u_held.size() != model.dim_input() || eta.size() != model.dim_eta() ||
        profile.dim() != model.dim_disturbance()) {
        throw ContractViolation("rk4_step: dimension mismatch");
    }
    Vector next(x.begin(), x.end());
    Rk4Integrator integrator(model);
    integrator.step(u_held, eta, profile, next, t, dt);
    if (!all_finite(next)) throw DivergenceError("rk4_step: non-finite state", t + dt);
    return next;
}

PlantModel rigid_body_model(Box eta_box) {
    if (eta_box.dim() != 1) throw ContractViolation("rigid_body_model: eta is scalar");
    auto f = [](std::span<const double> eta, std::span<const double> x, std::span<const double> u,
                std::span<const double> w, std::span<double> dx) {
        dx[0] = u[0];
        dx[1] = u[1] + w[0];
        dx[2] = eta[0] * x[0] * x[1];
    };
    return PlantModel("rigid_body", 3, 2, 1, f, std::move(eta_box), 5.0);
}

ControlLaw rigid_body_law(RigidBodyLawVariant variant) {
    const double s = variant == RigidBodyLawVariant::kStabilizing ? 3.0 : -3.0;
    auto k = [s](std::span<const double> x, std::span<double> u) {
        u[0] = -x[0] * x[1] - 2.0 * x[1] * x[2] - x[0] - x[2];
        u[1] = 2.0 * x[0] * x[1] * x[2] + s * x[2] * x[2] - x[1];
    };
    // L = L_{f,u}·L_{κ,x} over B₅ with L_{f,u} = 1.
    return ControlLaw(3, 2, k, 61.1945);
}

PlantModel scalar_decay_model(Box eta_box) {
    if (eta_box.dim() != 1) throw ContractViolation("scalar_decay_model: eta is scalar");
    auto f = [](std::span<const double> eta, std::span<const double> x, std::span<const double> u,
                std::span<const double> w, std::span<double> dx) { dx[0] = -eta[0] * x[0] + u[0] + w[0]; };
    return PlantModel("scalar_decay", 1, 1, 1, f, std::move(eta_box), 1e3);
}

ControlLaw zero_law(std::size_t dim_state, std::size_t dim_input) {
    return ControlLaw(
        dim_state, dim_input, [](std::span<const double>, std::span<double> u) { std::fill(u.begin(), u.end(), 0.0); },
        0.0);
}

PlantBundle make_plant(std::string_view name) {
    if (name == "rigid_body") return {rigid_body_model(), rigid_body_law()};
    if (name == "rigid_body_as_printed") {
        auto model = rigid_body_model();
        return {std::move(model), rigid_body_law(RigidBodyLawVariant::kAsPrinted)};
    }
    if (name == "scalar_decay") return {scalar_decay_model(Box{{0.0}, {10.0}}), zero_law(1, 1)};
    throw ConfigError("unknown plant '" + std::string(name) + "'");
}

std::vector<std::string> registered_plants() { return {"rigid_body", "rigid_body_as_printed", "scalar_decay"}; }

}  // namespace stc
