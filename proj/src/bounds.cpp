#include "stc/bounds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "stc/errors.hpp"

namespace stc {

void validate(const ExpCertificate& c) {
    const bool finite = std::isfinite(c.m1) && std::isfinite(c.m2) && std::isfinite(c.l) && std::isfinite(c.w_bar) &&
                        std::isfinite(c.delta);
    if (!finite) throw ContractViolation("ExpCertificate: non-finite field");
    if (!(c.m1 >= 1.0)) throw ContractViolation("ExpCertificate: M1 must be >= 1");
    if (!(c.m2 >= 0.0)) throw ContractViolation("ExpCertificate: M2 must be >= 0");
    if (!(c.l > 0.0)) throw ContractViolation("ExpCertificate: L must be > 0");
    if (!(c.w_bar >= 0.0)) throw ContractViolation("ExpCertificate: w_bar must be >= 0");
    if (!(c.delta > 0.0)) throw ContractViolation("ExpCertificate: delta must be > 0");
}

void validate(const KLCertificate& c) {
    if (!(c.l > 0.0) || !std::isfinite(c.l)) throw ContractViolation("KLCertificate: L must be finite and > 0");
    if (!looks_class_k(c.beta0)) throw ContractViolation("KLCertificate: beta(.,0) is not zero-at-zero and nondecreasing");
    if (!looks_class_k(c.gamma1)) throw ContractViolation("KLCertificate: gamma1 is not class-K");
    if (!looks_class_k(c.gamma2)) throw ContractViolation("KLCertificate: gamma2 is not class-K");
}

LipschitzEnvelope::LipschitzEnvelope(RadialFunction l_hat) : l_hat_(std::move(l_hat)) {
    const double r_max = std::min(1e3, l_hat_.domain_max());
    if (!is_nondecreasing_on_grid(l_hat_, r_max)) throw ContractViolation("LipschitzEnvelope: L_hat must be nondecreasing");
    if (!(l_hat_(0.0) > 0.0)) throw ContractViolation("LipschitzEnvelope: L_hat must be positive");
}

double gronwall_bound(const ExpCertificate& cert, double x_k_norm, double tau) {
    if (!(tau >= 0.0)) throw ContractViolation("gronwall_bound: tau must be >= 0");
    return cert.envelope(x_k_norm) * std::expm1(cert.l * tau);
}

double gronwall_bound_kl(const KLCertificate& cert, double x_k_norm, double w_bar, double tau) {
    if (!(tau >= 0.0)) throw ContractViolation("gronwall_bound_kl: tau must be >= 0");
    return (cert.beta0(x_k_norm) + cert.gamma1(w_bar)) * std::expm1(cert.l * tau);
}

double invariant_ball_radius(const KLCertificate& cert, double x_k_norm, double w_bar, double delta) {
    return cert.beta0(x_k_norm) + cert.gamma1(w_bar) + cert.gamma2(delta);
}

namespace {

// x ↦ f(η, x, κ(x), 0) with its scratch buffers.
class ClosedLoopField {
  public:
    ClosedLoopField(const PlantModel& model, const ControlLaw& law)
        : model_(model), law_(law), u_(model.dim_input()), w_(model.dim_disturbance(), 0.0) {}

    void operator()(std::span<const double> eta, std::span<const double> x, std::span<double> dx) {
        law_.evaluate(x, u_);
        model_.evaluate(eta, x, u_, w_, dx);
    }

  private:
    const PlantModel& model_;
    const ControlLaw& law_;
    Vector u_;
    Vector w_;
};

std::vector<Vector> eta_grid(const Box& box, int points_per_axis) {
    const std::size_t m = box.dim();
    std::vector<Vector> grid;
    if (m == 0) {
        grid.emplace_back();
        return grid;
    }
    std::vector<int> idx(m, 0);
    while (true) {
        Vector eta(m);
        for (std::size_t i = 0; i < m; ++i) {
            const bool degenerate = points_per_axis <= 1 || box.lower[i] == box.upper[i];
            eta[i] = degenerate ? box.lower[i]
                                : box.lower[i] + (box.upper[i] - box.lower[i]) * idx[i] / (points_per_axis - 1);
        }
        grid.push_back(std::move(eta));
        std::size_t d = 0;
        while (d < m) {
            const int limit = (points_per_axis <= 1 || box.lower[d] == box.upper[d]) ? 1 : points_per_axis;
            if (++idx[d] < limit) break;
            idx[d] = 0;
            ++d;
        }
        if (d == m) break;
    }
    return grid;
}

}  // namespace

double estimate_local_lipschitz(const PlantModel& model, const ControlLaw& law, double radius, const Box& eta_box,
                                const LipschitzEstimateOptions& options) {
    if (!(radius >= 0.0)) throw ContractViolation("estimate_local_lipschitz: radius must be >= 0");
    if (radius > model.state_domain_radius())
        throw DomainError("estimate_local_lipschitz: radius exceeds the model's domain radius");
    if (options.resolution < 1 || options.eta_points < 1)
        throw ConfigError("estimate_local_lipschitz: resolution and eta_points must be >= 1");
    if (eta_box.dim() != model.dim_eta()) throw ContractViolation("estimate_local_lipschitz: eta box dimension mismatch");

    const std::size_t n = model.dim_state();
    const double spacing = model.state_domain_radius() / options.resolution;
    // Integer lattice coordinates k with ‖k·spacing‖ ≤ radius.
    const long k_max = static_cast<long>(std::floor(radius / spacing + 1e-12));
    const double r2 = radius * radius * (1.0 + 1e-12);

    std::vector<Vector> points;
    std::vector<long> idx(n, -k_max);
    while (true) {
        Vector p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(idx[i]) * spacing;
        if (squared_norm(p) <= r2) points.push_back(std::move(p));
        std::size_t d = 0;
        while (d < n) {
            if (++idx[d] <= k_max) break;
            idx[d] = -k_max;
            ++d;
        }
        if (d == n) break;
    }
    if (radius > 0.0 && static_cast<int>(points.size()) < options.min_points) {
        throw ConfigError("estimate_local_lipschitz: resolution too coarse (" + std::to_string(points.size()) +
                          " sample points, minimum " + std::to_string(options.min_points) + ")");
    }

    ClosedLoopField field(model, law);
    const auto etas = eta_grid(eta_box, options.eta_points);
    const double h = options.fd_step * std::max(1.0, model.state_domain_radius());
    Vector xp(n), xm(n), fp(n), fm(n);
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    double best = 0.0;
    for (const auto& eta : etas) {
        for (const auto& p : points) {
            for (std::size_t j = 0; j < n; ++j) {
                xp = p;
                xm = p;
                xp[j] += h;
                xm[j] -= h;
                field(eta, xp, fp);
                field(eta, xm, fm);
                for (std::size_t i = 0; i < n; ++i) {
                    jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (fp[i] - fm[i]) / (2.0 * h);
                }
            }
            const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues()(0);
            best = std::max(best, s);
        }
    }
    return best * options.safety_factor;
}

LipschitzEnvelope build_lipschitz_envelope(const PlantModel& model, const ControlLaw& law, const KLCertificate& cert,
                                           double w_bar, double delta, const std::vector<double>& radii,
                                           const LipschitzEstimateOptions& options) {
    if (radii.empty()) throw ContractViolation("build_lipschitz_envelope: no radii");
    std::vector<double> values;
    values.reserve(radii.size());
    double running = 0.0;
    for (double r : radii) {
        const double d = invariant_ball_radius(cert, r, w_bar, delta);
        running = std::max(running, estimate_local_lipschitz(model, law, d, model.eta_range(), options));
        values.push_back(running);
    }
    return LipschitzEnvelope(RadialFunction::tabulated(radii, std::move(values)));
}

}  // namespace stc
