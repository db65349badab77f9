#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stc/vector_ops.hpp"

namespace stc {

/// Axis-aligned box, used for the compact uncertainty set of η.
struct Box {
    Vector lower;
    Vector upper;

    [[nodiscard]] std::size_t dim() const noexcept { return lower.size(); }
    [[nodiscard]] bool contains(std::span<const double> p) const noexcept;
};

/// f(η, x, u, w) written into dx. Must not allocate-and-return so that the
/// integrator can run without per-stage heap traffic.
using VectorField = std::function<void(std::span<const double> eta, std::span<const double> x,
                                       std::span<const double> u, std::span<const double> w,
                                       std::span<double> dx)>;

using FeedbackFunction = std::function<void(std::span<const double> x, std::span<double> u)>;

/// Uncertain plant ẋ = f(η, x, u, w). Immutable once built.
class PlantModel {
  public:
    PlantModel(std::string name, std::size_t dim_state, std::size_t dim_input, std::size_t dim_disturbance,
               VectorField dynamics, Box eta_range, double state_domain_radius);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t dim_state() const noexcept { return dim_state_; }
    [[nodiscard]] std::size_t dim_input() const noexcept { return dim_input_; }
    [[nodiscard]] std::size_t dim_disturbance() const noexcept { return dim_disturbance_; }
    [[nodiscard]] std::size_t dim_eta() const noexcept { return eta_range_.dim(); }
    [[nodiscard]] const Box& eta_range() const noexcept { return eta_range_; }
    [[nodiscard]] double state_domain_radius() const noexcept { return state_domain_radius_; }

    /// Unchecked evaluation; callers guarantee the span sizes.
    void evaluate(std::span<const double> eta, std::span<const double> x, std::span<const double> u,
                  std::span<const double> w, std::span<double> dx) const {
        dynamics_(eta, x, u, w, dx);
    }

  private:
    std::string name_;
    std::size_t dim_state_;
    std::size_t dim_input_;
    std::size_t dim_disturbance_;
    VectorField dynamics_;
    Box eta_range_;
    double state_domain_radius_;
};

/// State feedback u = κ(x) together with its Lipschitz constant L_{κ,x}.
class ControlLaw {
  public:
    ControlLaw(std::size_t dim_state, std::size_t dim_input, FeedbackFunction law, double lipschitz_x);

    [[nodiscard]] std::size_t dim_state() const noexcept { return dim_state_; }
    [[nodiscard]] std::size_t dim_input() const noexcept { return dim_input_; }
    [[nodiscard]] double lipschitz_x() const noexcept { return lipschitz_x_; }

    void evaluate(std::span<const double> x, std::span<double> u) const { law_(x, u); }
    [[nodiscard]] Vector operator()(std::span<const double> x) const;

  private:
    std::size_t dim_state_;
    std::size_t dim_input_;
    FeedbackFunction law_;
    double lipschitz_x_;
};

struct DisturbanceSegment {
    double t_start = 0.0;  ///< inclusive
    double t_end = 0.0;    ///< exclusive
    Vector value;
};

/// Piecewise-constant disturbance; zero outside every segment.
class DisturbanceProfile {
  public:
    DisturbanceProfile() = default;
    DisturbanceProfile(std::size_t dim, std::vector<DisturbanceSegment> segments, double bound);

    static DisturbanceProfile none(std::size_t dim) { return DisturbanceProfile(dim, {}, 0.0); }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] double bound() const noexcept { return bound_; }
    [[nodiscard]] const std::vector<DisturbanceSegment>& segments() const noexcept { return segments_; }

    /// Right-continuous value w(t).
    void value_at(double t, std::span<double> out) const;
    /// Left limit w(t⁻); differs from value_at only at segment edges.
    void left_limit(double t, std::span<double> out) const;
    /// Segment edges, sorted.
    [[nodiscard]] std::vector<double> breakpoints() const;

  private:
    std::size_t dim_ = 0;
    std::vector<DisturbanceSegment> segments_;
    double bound_ = 0.0;
};

/// Piecewise-constant parameter trajectory η(t); the first entry starts at t = 0.
class EtaSchedule {
  public:
    EtaSchedule() = default;
    explicit EtaSchedule(Vector constant);
    explicit EtaSchedule(std::vector<std::pair<double, Vector>> pieces);

    [[nodiscard]] const Vector& at(double t) const;
    [[nodiscard]] std::vector<double> breakpoints() const;
    [[nodiscard]] const std::vector<std::pair<double, Vector>>& pieces() const noexcept { return pieces_; }

  private:
    std::vector<std::pair<double, Vector>> pieces_;
};

/// Right-hand side of the sampled-data loop, f(η, x, u_held, w).
/// Throws ContractViolation on dimension mismatch and DomainError when η is
/// outside the model's box.
[[nodiscard]] Vector eval_closed_loop(const PlantModel& model, const ControlLaw& law, std::span<const double> eta,
                                      std::span<const double> x, std::span<const double> u_held,
                                      std::span<const double> w);

/// Classic fixed-step RK4 with reusable stage buffers. The disturbance is read
/// at the stage times t, t+dt/2 and (as a left limit) t+dt.
class Rk4Integrator {
  public:
    explicit Rk4Integrator(const PlantModel& model);

    void step(std::span<const double> u, std::span<const double> eta, const DisturbanceProfile& profile,
              std::span<double> x, double t, double dt);

  private:
    const PlantModel* model_;
    Vector k1_, k2_, k3_, k4_, tmp_, w0_, wm_, w1_;
};

/// One RK4 step of the held-input dynamics. Throws DivergenceError (carrying
/// t + dt) when the result is not finite.
[[nodiscard]] Vector rk4_step(const PlantModel& model, std::span<const double> u_held, std::span<const double> eta,
                              const DisturbanceProfile& profile, std::span<const double> x, double t, double dt);

// Built-in plants --------------------------------------------------------

/// The 3-state rigid body ξ̇₁ = u₁, ξ̇₂ = u₂ + w, ξ̇₃ = η ξ₁ξ₂.
[[nodiscard]] PlantModel rigid_body_model(Box eta_box = Box{{1.0}, {8.2}});

enum class RigidBodyLawVariant {
    kStabilizing,  ///< u₂ = 2ξ₁ξ₂ξ₃ + 3ξ₃² − ξ₂
    kAsPrinted,    ///< u₂ = 2ξ₁ξ₂ξ₃ − 3ξ₃² − ξ₂ (not stabilizing)
};

/// u₁ = −ξ₁ξ₂ − 2ξ₂ξ₃ − ξ₁ − ξ₃ and the chosen u₂ variant.
[[nodiscard]] ControlLaw rigid_body_law(RigidBodyLawVariant variant = RigidBodyLawVariant::kStabilizing);

/// Scalar ẋ = −η x + u + w, used as a closed-form test plant.
[[nodiscard]] PlantModel scalar_decay_model(Box eta_box = Box{{1.0}, {1.0}});

/// κ(x) = 0.
[[nodiscard]] ControlLaw zero_law(std::size_t dim_state, std::size_t dim_input);

struct PlantBundle {
    PlantModel model;
    ControlLaw law;
};

/// Registry lookup: "rigid_body", "rigid_body_as_printed", "scalar_decay".
[[nodiscard]] PlantBundle make_plant(std::string_view name);
[[nodiscard]] std::vector<std::string> registered_plants();

}  // namespace stc
