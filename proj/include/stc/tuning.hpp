#pragma once

#include "stc/bounds.hpp"
#include "stc/samplers.hpp"

namespace stc {

/// Result of checking sup_r φ(r) ≤ δ for one of the sampler tuning rules.
struct TuningReport {
    double sup_value = 0.0;     ///< +∞ when φ diverges
    double argmax_r = 0.0;      ///< +∞ when the supremum is the r → ∞ limit
    double delta_budget = 0.0;  ///< δ
    bool feasible = false;      ///< margin ≥ 0
    double margin = 0.0;        ///< δ − sup_value

    [[nodiscard]] bool sup_at_infinity() const noexcept;
};

struct SupSearchOptions {
    int grid_points = 10000;
    double r_min = 1e-9;
    double r_max = 1e9;
    /// Largest probe radius for numerically determined tails.
    double tail_probe_max = 1e12;
    /// Relative per-decade growth at the last probe treated as divergence.
    double divergence_growth = 1e-3;
};

/// sup over r ≥ 0 of (M₁r + M₂w̄)·L·[(1 + ν₀/(ν₂r + ν₃))^{L/ν₁} − 1], with the
/// r → ∞ limit M₁L²ν₀/(ν₁ν₂) taken analytically. ν₂ = 0 with M₁ > 0 diverges.
[[nodiscard]] TuningReport perturbation_sup_exponential(const ExpCertificate& cert, const NuConstants& nu,
                                                        const SupSearchOptions& options = {});

/// sup over r ≥ 0 of (β(r,0) + γ₁(w̄))·L·[(1 + ν₀/(ν₂(r) + ν₃))^{L/ν₁} − 1];
/// the tail is probed numerically out to options.tail_probe_max.
[[nodiscard]] TuningReport perturbation_sup_asymptotic(const KLCertificate& cert, double w_bar, double delta,
                                                       const NuFunctions& nu, const SupSearchOptions& options = {});

/// sup over r of (β(r,0) + γ₁(w̄))·L̂(r)·[(1 + ν₀(r)/(ν₂(r) + ν₃(r)))^{L̂(r)/ν₁(r)} − 1],
/// restricted to the envelope's radius range when that range is finite.
[[nodiscard]] TuningReport perturbation_sup_global(const KLCertificate& cert, const LipschitzEnvelope& envelope,
                                                   double w_bar, double delta, const NuFunctions& nu,
                                                   const SupSearchOptions& options = {});

struct NuSuggestion {
    NuConstants nu;
    TuningReport report;
    /// h_mid == h_max: the ν₂·b term has to vanish, so ν₂ = 0 and ν₃ = 1.
    bool limiting_case = false;
};

/// Solves the h_mid / h_max equations for ν₀ and ν₃ with ν₁ = L and the given
/// ν₂, then checks the tuning rule. Infeasible targets come back with
/// report.feasible == false rather than adjusted.
[[nodiscard]] NuSuggestion suggest_nu(const ExpCertificate& cert, double h_mid, double h_max, double ultimate_bound,
                                      double nu2);

}  // namespace stc
