#pragma once

#include <vector>

#include "stc/dynamics.hpp"
#include "stc/radial_function.hpp"

namespace stc {

/// Constants of an exponentially stable closed loop:
/// ‖ξ(t)‖ ≤ M₁‖ξ_k‖ + M₂w̄, L = max_η L_{f,u}·L_{κ,x}, threshold δ.
struct ExpCertificate {
    double m1 = 1.0;
    double m2 = 0.0;
    double l = 1.0;
    double w_bar = 0.0;
    double delta = 1.0;

    /// M₁‖x_k‖ + M₂w̄.
    [[nodiscard]] double envelope(double x_k_norm) const noexcept { return m1 * x_k_norm + m2 * w_bar; }
};

/// Throws ContractViolation unless M₁ ≥ 1, M₂ ≥ 0, L > 0, w̄ ≥ 0, δ > 0, all finite.
void validate(const ExpCertificate& cert);

/// ISS data for the asymptotically stable case. Only β(r, 0) is represented.
struct KLCertificate {
    RadialFunction beta0;
    RadialFunction gamma1;
    RadialFunction gamma2;
    double l = 1.0;
};

/// Throws ContractViolation unless β(·,0), γ₁, γ₂ vanish at 0 and are
/// nondecreasing on a sample grid, and L > 0.
void validate(const KLCertificate& cert);

/// Radius-dependent Lipschitz bound L̂(r), valid on [0, max_radius()].
class LipschitzEnvelope {
  public:
    explicit LipschitzEnvelope(RadialFunction l_hat);

    /// Constant envelope L̂(r) = l.
    static LipschitzEnvelope constant(double l) { return LipschitzEnvelope(RadialFunction::constant(l)); }

    [[nodiscard]] double operator()(double r) const { return l_hat_(r); }
    [[nodiscard]] double max_radius() const noexcept { return l_hat_.domain_max(); }
    [[nodiscard]] const RadialFunction& function() const noexcept { return l_hat_; }

  private:
    RadialFunction l_hat_;
};

/// (M₁‖x_k‖ + M₂w̄)(e^{Lτ} − 1): bound on ‖x_k − x(t_k + τ)‖ under held input.
[[nodiscard]] double gronwall_bound(const ExpCertificate& cert, double x_k_norm, double tau);

/// (β(‖x_k‖,0) + γ₁(w̄))(e^{Lτ} − 1).
[[nodiscard]] double gronwall_bound_kl(const KLCertificate& cert, double x_k_norm, double w_bar, double tau);

/// d_k = β(‖x_k‖,0) + γ₁(w̄) + γ₂(δ): radius of the ball the sampled trajectory
/// stays in between samples.
[[nodiscard]] double invariant_ball_radius(const KLCertificate& cert, double x_k_norm, double w_bar, double delta);

struct LipschitzEstimateOptions {
    /// Lattice points per domain radius along each axis; spacing is
    /// state_domain_radius / resolution, so doubling it refines the lattice
    /// without dropping any old point.
    int resolution = 16;
    /// Points per axis of the η box (endpoints included).
    int eta_points = 5;
    double safety_factor = 1.1;
    /// A ball of positive radius sampled with fewer points is rejected.
    int min_points = 8;
    double fd_step = 1e-6;
};

/// Max over lattice points of B_r × D_η of ‖∂/∂x f(η, x, κ(x), 0)‖₂ (central
/// differences), times the safety factor. Lattices for nested balls are
/// nested, so the result is nondecreasing in r and in resolution.
[[nodiscard]] double estimate_local_lipschitz(const PlantModel& model, const ControlLaw& law, double radius,
                                              const Box& eta_box, const LipschitzEstimateOptions& options = {});

/// Tabulates L̂(r) ≥ Lip(B_{d(r)}) on the given increasing radii, where d(r) is
/// invariant_ball_radius; a running max keeps the table nondecreasing.
[[nodiscard]] LipschitzEnvelope build_lipschitz_envelope(const PlantModel& model, const ControlLaw& law,
                                                         const KLCertificate& cert, double w_bar, double delta,
                                                         const std::vector<double>& radii,
                                                         const LipschitzEstimateOptions& options = {});

}  // namespace stc
