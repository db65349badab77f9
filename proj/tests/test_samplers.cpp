#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "stc/errors.hpp"
#include "stc/samplers.hpp"

using namespace stc;
using Catch::Approx;

namespace {

constexpr double kL = 61.1945;
const NuConstants kTuning1{0.42, kL, 10.0, 1e-6};
const NuConstants kTuning2{0.14, kL, 3.3, 7.86};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("Lebesgue self-triggered interval", "[samplers]") {
    const ExpCertificate c{1.0, 0.0, kL, 0.0, 2.8};
    const long double oracle = std::log1p(2.8L / 4.7982L) / static_cast<long double>(kL);
    const double h = next_interval_lebesgue(c, 4.7982);
    CHECK(rel(h, static_cast<double>(oracle)) < 1e-13);
    CHECK(h == Approx(7.512e-3).epsilon(5e-4));

    const ExpCertificate tiny{1.0, 0.0, kL, 0.0, 1e-12};
    CHECK(next_interval_lebesgue(tiny, 1.0) < 1e-13);

    SECTION("zero envelope returns the cap") {
        CHECK(next_interval_lebesgue(c, 0.0) == 1.0);
        CHECK(next_interval_lebesgue(c, 0.0, 0.25) == 0.25);
    }
    SECTION("inverse of the gronwall bound") {
        for (double r : {1e-3, 0.5, 1.0, 4.7982, 100.0}) {
            CHECK(rel(gronwall_bound(c, r, next_interval_lebesgue(c, r)), c.delta) < 1e-12);
        }
    }
}

TEST_CASE("universal interval against reported values", "[samplers]") {
    CHECK(next_interval_universal(kTuning1, 0.0) == Approx(211.6e-3).epsilon(5e-3));
    CHECK(next_interval_universal(kTuning1, 4.7982) == Approx(0.142e-3).epsilon(1e-2));
    CHECK(next_interval_universal(kTuning1, 3.9633) == Approx(0.1723e-3).epsilon(1e-2));
    CHECK(next_interval_universal(kTuning2, 0.0) == Approx(0.288e-3).epsilon(1e-2));

    // Independent evaluation of (1/ν₁) ln(1 + ν₀/(ν₂ r + ν₃)).
    const long double r = 2.5L;
    const long double oracle = std::log(1.0L + 0.42L / (10.0L * r + 1e-6L)) / static_cast<long double>(kL);
    CHECK(rel(next_interval_universal(kTuning1, 2.5), static_cast<double>(oracle)) < 1e-13);
}

TEST_CASE("universal interval is strictly decreasing and bounded", "[samplers][property]") {
    const double top = next_interval_universal(kTuning1, 0.0);
    double prev = top;
    for (int i = 1; i <= 500; ++i) {
        const double h = next_interval_universal(kTuning1, 0.01 * i);
        CHECK(h < prev);
        CHECK(h > 0.0);
        prev = h;
    }
    CHECK(top == Approx(std::log1p(0.42 / 1e-6) / kL));
}

TEST_CASE("nonlinear interval", "[samplers]") {
    const NuFunctions linear_nu = to_functions(kTuning1);
    CHECK(next_interval_nonlinear(linear_nu, 0.0) == next_interval_universal(kTuning1, 0.0));

    const NuFunctions square{RadialFunction::constant(1.0), RadialFunction::constant(1.0),
                             RadialFunction::power(1.0, 2.0), RadialFunction::constant(1.0)};
    CHECK(next_interval_nonlinear(square, 2.0) == Approx(std::log(1.2)).epsilon(1e-14));
    CHECK(next_interval_nonlinear(square, 2.0) == Approx(0.18232).margin(5e-6));

    double prev = next_interval_nonlinear(square, 0.0);
    for (int i = 1; i < 200; ++i) {
        const double h = next_interval_nonlinear(square, 0.5 * i);
        CHECK(h < prev);
        prev = h;
    }
}

TEST_CASE("global interval", "[samplers]") {
    const NuFunctions nu{RadialFunction::constant(1.0), RadialFunction::custom([](double r) { return 1.0 + r; }),
                         RadialFunction::linear(1.0), RadialFunction::constant(1.0)};
    CHECK(next_interval_global(nu, 1.0) == Approx(0.5 * std::log(1.5)).epsilon(1e-14));
    CHECK(next_interval_global(nu, 1.0) == Approx(0.20273).margin(5e-6));
    CHECK(next_interval_global(nu, 0.0) == Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("consistency ladder", "[samplers][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    const NuFunctions nonlinear = to_functions(kTuning2);
    const NuFunctions global_constant{RadialFunction::constant(kTuning2.nu0), RadialFunction::constant(kTuning2.nu1),
                                      RadialFunction::linear(kTuning2.nu2), RadialFunction::constant(kTuning2.nu3)};
    for (int i = 0; i < 1000; ++i) {
        const double r = u(rng);
        const double h = next_interval_universal(kTuning2, r);
        CHECK(next_interval_nonlinear(nonlinear, r) == h);
        CHECK(next_interval_global(global_constant, r) == h);
    }

    SECTION("matching coefficients reproduce the Lebesgue sampler") {
        const ExpCertificate c{4.7982, 1.0, kL, 0.6, 2.8};
        const NuConstants match{c.delta, c.l, c.m1, c.m2 * c.w_bar};
        for (double r : {0.0, 0.3, 1.0, 3.9}) {
            CHECK(rel(next_interval_universal(match, r), next_interval_lebesgue(c, r)) < 1e-12);
        }
    }
}

TEST_CASE("event trigger functions", "[samplers]") {
    const Vector xk{1.0, 0.0, 0.0};
    CHECK(event_value_lebesgue(xk, xk, 0.3) == -0.3);
    CHECK(event_value_relative(xk, xk, 0.5) == Approx(-0.79 * 0.79 * 0.25 * 1.0));
    CHECK(event_value_lebesgue(Vector{0.7, 0.0, 0.0}, xk, 0.3) == Approx(0.0).margin(1e-15));
    CHECK(event_value_relative(Vector{0.8, 0.0, 0.0}, xk, 0.5) == Approx(-0.059856).epsilon(1e-12));
}

TEST_CASE("interval bounds", "[samplers]") {
    const auto b1 = interval_bounds(kTuning1, 4.7982, 3.9633);
    CHECK(b1.h_min == Approx(0.142e-3).epsilon(1e-2));
    CHECK(b1.h_mid == Approx(0.1723e-3).epsilon(1e-2));
    CHECK(b1.h_max == Approx(211.6e-3).epsilon(1e-2));
    CHECK(b1.h_min <= b1.h_mid);
    CHECK(b1.h_mid <= b1.h_max);

    const auto b2 = interval_bounds(kTuning2, 4.7982, 3.9624);
    CHECK(b2.h_max == Approx(0.288e-3).epsilon(1e-2));
    CHECK(b2.h_min == Approx(0.096e-3).epsilon(1e-2));

    const auto same = interval_bounds(kTuning1, 3.0, 3.0);
    CHECK(same.h_min == same.h_mid);

    CHECK_THROWS_AS(interval_bounds(kTuning1, -1.0, 3.0), ContractViolation);
}

TEST_CASE("nominal prediction on a scalar decay", "[samplers][prediction]") {
    const auto model = scalar_decay_model();
    const auto law = zero_law(1, 1);
    const double dt = 1e-4;
    const EventRule rule{EventRule::Kind::kLebesgue, 0.3};
    for (double xk : {1.0, 0.5, 2.0}) {
        const auto p = next_interval_nominal_prediction(model, law, Vector{1.0}, rule, Vector{xk}, dt, 5.0);
        CHECK_FALSE(p.capped);
        CHECK(std::abs(p.interval - std::log(xk / (xk - 0.3))) <= 2.0 * dt);
    }
    const auto never = next_interval_nominal_prediction(model, law, Vector{1.0}, rule, Vector{0.2}, dt, 0.5);
    CHECK(never.capped);
    CHECK(never.interval == 0.5);

    CHECK_THROWS_AS(next_interval_nominal_prediction(model, law, Vector{1.0}, rule, Vector{1.0, 2.0}, dt, 1.0),
                    ContractViolation);
}

TEST_CASE("policy construction and verification", "[samplers][policy]") {
    const ExpCertificate ok{1.0, 0.0, kL, 0.0, 2.8};
    const auto p = TriggerPolicy::self_trig_universal(ok, kTuning1);
    REQUIRE(p.tuning_margin().has_value());
    CHECK(*p.tuning_margin() == Approx(2.8 - kL * 0.42 / 10.0).epsilon(1e-6));
    CHECK(p.is_closed_form());
    CHECK_FALSE(p.is_event_triggered());
    CHECK(p.kind_name() == "self_trig_universal");
    CHECK(p.declared_min_interval(4.7982) == next_interval_universal(kTuning1, 4.7982));

    const ExpCertificate strict{4.7982, 0.0, kL, 0.0, 2.8};
    CHECK_THROWS_AS(TriggerPolicy::self_trig_universal(strict, kTuning1), ConfigError);
    const auto waived = TriggerPolicy::self_trig_universal(strict, kTuning1, Verification::kWaived);
    CHECK(waived.verification_waived());
    CHECK_FALSE(waived.tuning_margin().has_value());

    CHECK_THROWS_AS(TriggerPolicy::event_relative(1.5), ContractViolation);
    CHECK_THROWS_AS(TriggerPolicy::periodic(0.0), ContractViolation);
    CHECK_THROWS_AS(TriggerPolicy::periodic(0.1).closed_form_interval(1.0), ContractViolation);
    CHECK_THROWS_AS(TriggerPolicy::periodic(0.1).event_rule(), ContractViolation);
    CHECK(TriggerPolicy::event_relative(0.1).is_event_triggered());
    CHECK(TriggerPolicy::event_lebesgue(0.2).event_rule().kind == EventRule::Kind::kLebesgue);

    const KLCertificate kl{RadialFunction::linear(1.0), RadialFunction::linear(1.0), RadialFunction::linear(1.0), kL};
    NuFunctions bad = to_functions(kTuning1);
    bad.nu0 = RadialFunction::linear(1.0);
    CHECK_THROWS(TriggerPolicy::self_trig_nonlinear(kl, bad, 2.8, 0.0, Verification::kWaived));
    const auto nl = TriggerPolicy::self_trig_nonlinear(kl, to_functions(kTuning1), 2.8, 0.0);
    CHECK(nl.closed_form_interval(1.0) == next_interval_universal(kTuning1, 1.0));
}
