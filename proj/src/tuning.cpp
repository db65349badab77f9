#include "stc/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stc/errors.hpp"

namespace stc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Peak {
    double value = 0.0;
    double r = 0.0;
};

template <class Phi>
Peak golden_maximize(Phi& phi, double a, double b, Peak best) {
    constexpr double kRatio = 0.6180339887498949;
    double c = b - kRatio * (b - a);
    double d = a + kRatio * (b - a);
    double fc = phi(c);
    double fd = phi(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1e-300, std::abs(b)); ++it) {
        if (fc > fd) {
            if (fc > best.value) best = {fc, c};
            b = d;
            d = c;
            fd = fc;
            c = b - kRatio * (b - a);
            fc = phi(c);
        } else {
            if (fd > best.value) best = {fd, d};
            a = c;
            c = d;
            fc = fd;
            d = a + kRatio * (b - a);
            fd = phi(d);
        }
    }
    if (fc > best.value) best = {fc, c};
    if (fd > best.value) best = {fd, d};
    return best;
}

// Grid scan over {0} ∪ log-spaced radii up to r_hi, then golden refinement of
// the bracket around the best grid point. Non-finite φ gives +∞.
template <class Phi>
Peak grid_refined_max(Phi& phi, double r_hi, const SupSearchOptions& o) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(o.grid_points) + 2);
    grid.push_back(0.0);
    const double top = std::min(o.r_max, r_hi);
    if (top > o.r_min) {
        const double span = std::log(top / o.r_min);
        for (int i = 0; i < o.grid_points; ++i) {
            grid.push_back(o.r_min * std::exp(span * i / (o.grid_points - 1)));
        }
        grid.back() = top;
    } else if (top > 0.0) {
        for (int i = 1; i <= o.grid_points; ++i) grid.push_back(top * i / o.grid_points);
    }

    std::size_t best_i = 0;
    double best_v = -kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = phi(grid[i]);
        if (!std::isfinite(v)) return {kInf, grid[i]};
        if (v > best_v) {
            best_v = v;
            best_i = i;
        }
    }
    Peak best{best_v, grid[best_i]};
    if (grid.size() < 2) return best;
    const double a = grid[best_i == 0 ? 0 : best_i - 1];
    const double b = grid[std::min(best_i + 1, grid.size() - 1)];
    best = golden_maximize(phi, a, b, best);
    if (!std::isfinite(best.value)) return {kInf, best.r};
    return best;
}

TuningReport make_report(double sup, double argmax, double delta) {
    TuningReport r;
    r.sup_value = sup;
    r.argmax_r = argmax;
    r.delta_budget = delta;
    r.margin = delta - sup;
    r.feasible = r.margin >= 0.0;
    return r;
}

// Probes φ on decades beyond the grid; a last-decade growth above the
// threshold is read as divergence.
template <class Phi>
Peak probe_tail(Phi& phi, const SupSearchOptions& o, bool& diverges) {
    diverges = false;
    std::vector<double> radii;
    for (double r = o.r_max; r <= o.tail_probe_max * (1.0 + 1e-12); r *= 10.0) radii.push_back(r);
    if (radii.size() < 2) radii = {o.r_max, o.tail_probe_max};
    Peak best{-kInf, 0.0};
    double prev = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double v = phi(radii[i]);
        if (!std::isfinite(v)) {
            diverges = true;
            return {kInf, kInf};
        }
        if (v > best.value) best = {v, radii[i]};
        if (i + 1 == radii.size() && i > 0) {
            diverges = v > 0.0 && v > prev * (1.0 + o.divergence_growth);
        }
        prev = v;
    }
    return best;
}

template <class Phi>
TuningReport general_sup(Phi& phi, double domain_max, double delta, const SupSearchOptions& o) {
    const Peak interior = grid_refined_max(phi, domain_max, o);
    if (!std::isfinite(interior.value)) return make_report(kInf, interior.r, delta);
    if (std::isfinite(domain_max)) return make_report(interior.value, interior.r, delta);
    bool diverges = false;
    const Peak tail = probe_tail(phi, o, diverges);
    if (diverges) return make_report(kInf, kInf, delta);
    if (tail.value > interior.value) {
        const bool at_last_probe = tail.r >= o.tail_probe_max * (1.0 - 1e-12);
        return make_report(tail.value, at_last_probe ? kInf : tail.r, delta);
    }
    return make_report(interior.value, interior.r, delta);
}

double bracket(double ratio, double exponent) { return std::expm1(exponent * std::log1p(ratio)); }

}  // namespace

bool TuningReport::sup_at_infinity() const noexcept { return std::isinf(argmax_r); }

TuningReport perturbation_sup_exponential(const ExpCertificate& cert, const NuConstants& nu,
                                          const SupSearchOptions& options) {
    validate(nu);
    const double exponent = cert.l / nu.nu1;
    auto phi = [&](double r) {
        return (cert.m1 * r + cert.m2 * cert.w_bar) * cert.l * bracket(nu.nu0 / (nu.nu2 * r + nu.nu3), exponent);
    };

    double tail = 0.0;
    if (cert.m1 > 0.0) {
        if (nu.nu2 == 0.0) return make_report(kInf, kInf, cert.delta);
        tail = cert.m1 * cert.l * cert.l * nu.nu0 / (nu.nu1 * nu.nu2);
    } else if (nu.nu2 == 0.0) {
        tail = phi(0.0);
    }
    const Peak interior = grid_refined_max(phi, kInf, options);
    if (!std::isfinite(interior.value)) return make_report(kInf, interior.r, cert.delta);
    if (tail >= interior.value * (1.0 - 1e-9)) return make_report(std::max(tail, interior.value), kInf, cert.delta);
    return make_report(interior.value, interior.r, cert.delta);
}

TuningReport perturbation_sup_asymptotic(const KLCertificate& cert, double w_bar, double delta, const NuFunctions& nu,
                                         const SupSearchOptions& options) {
    const double disturbance_term = cert.gamma1(w_bar);
    auto phi = [&](double r) {
        const double ratio = nu.nu0(r) / (nu.nu2(r) + nu.nu3(r));
        return (cert.beta0(r) + disturbance_term) * cert.l * bracket(ratio, cert.l / nu.nu1(r));
    };
    return general_sup(phi, kInf, delta, options);
}

TuningReport perturbation_sup_global(const KLCertificate& cert, const LipschitzEnvelope& envelope, double w_bar,
                                     double delta, const NuFunctions& nu, const SupSearchOptions& options) {
    const double disturbance_term = cert.gamma1(w_bar);
    auto phi = [&](double r) {
        const double l_hat = envelope(r);
        const double ratio = nu.nu0(r) / (nu.nu2(r) + nu.nu3(r));
        return (cert.beta0(r) + disturbance_term) * l_hat * bracket(ratio, l_hat / nu.nu1(r));
    };
    return general_sup(phi, envelope.max_radius(), delta, options);
}

NuSuggestion suggest_nu(const ExpCertificate& cert, double h_mid, double h_max, double ultimate_bound, double nu2) {
    if (!(h_mid > 0.0) || !(h_max > 0.0)) throw ContractViolation("suggest_nu: targets must be positive");
    if (h_mid > h_max) throw ContractViolation("suggest_nu: h_mid must not exceed h_max");
    if (!(ultimate_bound > 0.0)) throw ContractViolation("suggest_nu: ultimate bound must be positive");
    if (!(nu2 > 0.0)) throw ContractViolation("suggest_nu: nu2 scale must be positive");

    NuSuggestion out;
    out.nu.nu1 = cert.l;
    // ν₀/ν₃ = e^{ν₁h_max} − 1 and ν₀/(ν₂b + ν₃) = e^{ν₁h_mid} − 1.
    const double a = std::expm1(cert.l * h_max);
    const double b = std::expm1(cert.l * h_mid);
    if (a == b) {
        out.limiting_case = true;
        out.nu.nu2 = 0.0;
        out.nu.nu3 = 1.0;
        out.nu.nu0 = a;
    } else {
        out.nu.nu2 = nu2;
        out.nu.nu3 = b * nu2 * ultimate_bound / (a - b);
        out.nu.nu0 = a * out.nu.nu3;
    }
    out.report = perturbation_sup_exponential(cert, out.nu);
    return out;
}

}  // namespace stc
