#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "stc/dynamics.hpp"
#include "stc/errors.hpp"

using namespace stc;
using Catch::Approx;

namespace {

const DisturbanceProfile kNoW = DisturbanceProfile::none(1);

Vector integrate_held(const PlantModel& model, const Vector& u, const Vector& eta, Vector x, double horizon,
                      double dt) {
    const int steps = static_cast<int>(std::lround(horizon / dt));
    for (int i = 0; i < steps; ++i) x = rk4_step(model, u, eta, kNoW, x, i * dt, dt);
    return x;
}

Vector integrate_continuous(const PlantModel& model, const ControlLaw& law, const Vector& eta, Vector x,
                            double horizon, double dt) {
    const int steps = static_cast<int>(std::lround(horizon / dt));
    for (int i = 0; i < steps; ++i) x = rk4_step(model, law(x), eta, kNoW, x, i * dt, dt);
    return x;
}

}  // namespace

TEST_CASE("rigid body vector field values", "[dynamics]") {
    const auto model = rigid_body_model();
    const auto law = rigid_body_law();
    const Vector zero_u{0.0, 0.0};
    const Vector zero_w{0.0};

    CHECK(eval_closed_loop(model, law, Vector{1.0}, Vector{0.0, 0.0, 0.0}, zero_u, zero_w) == Vector{0.0, 0.0, 0.0});
    CHECK(eval_closed_loop(model, law, Vector{1.0}, Vector{1.0, 1.0, 0.0}, zero_u, zero_w) == Vector{0.0, 0.0, 1.0});
    CHECK(eval_closed_loop(model, law, Vector{8.0}, Vector{1.0, 1.0, 0.0}, zero_u, zero_w) == Vector{0.0, 0.0, 8.0});
    CHECK(eval_closed_loop(model, law, Vector{1.0}, Vector{2.0, 3.0, 0.0}, zero_u, zero_w) == Vector{0.0, 0.0, 6.0});

    SECTION("disturbance enters the second channel") {
        const auto dx = eval_closed_loop(model, law, Vector{1.0}, Vector{0.0, 0.0, 0.0}, zero_u, Vector{0.6});
        CHECK(dx == Vector{0.0, 0.6, 0.0});
    }
    SECTION("held input is used as given") {
        const auto dx = eval_closed_loop(model, law, Vector{2.0}, Vector{0.5, -1.0, 0.25}, Vector{0.3, -0.7}, zero_w);
        CHECK(dx[0] == 0.3);
        CHECK(dx[1] == -0.7);
        CHECK(dx[2] == Approx(2.0 * 0.5 * -1.0));
    }
}

TEST_CASE("eval_closed_loop rejects bad inputs", "[dynamics][errors]") {
    const auto model = rigid_body_model();
    const auto law = rigid_body_law();
    CHECK_THROWS_AS(eval_closed_loop(model, law, Vector{1.0}, Vector{0.0, 0.0}, Vector{0.0, 0.0}, Vector{0.0}), ContractViolation);
    CHECK_THROWS_AS(eval_closed_loop(model, law, Vector{1.0}, Vector{0.0, 0.0, 0.0}, Vector{0.0}, Vector{0.0}), ContractViolation);
    CHECK_THROWS_AS(eval_closed_loop(model, law, Vector{1.0}, Vector{0.0, 0.0, 0.0}, Vector{0.0, 0.0}, Vector{}), ContractViolation);
    CHECK_THROWS_AS(eval_closed_loop(model, law, Vector{0.5}, Vector{0.0, 0.0, 0.0}, Vector{0.0, 0.0}, Vector{0.0}), DomainError);
    CHECK_THROWS_AS(eval_closed_loop(model, law, Vector{8.3}, Vector{0.0, 0.0, 0.0}, Vector{0.0, 0.0}, Vector{0.0}), DomainError);
}

TEST_CASE("rigid body control law", "[dynamics]") {
    const auto stabilizing = rigid_body_law(RigidBodyLawVariant::kStabilizing);
    const auto printed = rigid_body_law(RigidBodyLawVariant::kAsPrinted);
    CHECK(stabilizing(Vector{0.0, 0.0, 0.0}) == Vector{0.0, 0.0});
    CHECK(printed(Vector{0.0, 0.0, 0.0}) == Vector{0.0, 0.0});
    // u1 = -1 - 2 - 1 - 1, u2 = 2 -/+ 3 - 1
    CHECK(printed(Vector{1.0, 1.0, 1.0}) == Vector{-5.0, -2.0});
    CHECK(stabilizing(Vector{1.0, 1.0, 1.0}) == Vector{-5.0, 4.0});
    CHECK(stabilizing.lipschitz_x() == Approx(61.1945));
}

TEST_CASE("origin is an exact equilibrium", "[dynamics]") {
    const auto model = rigid_body_model();
    const auto law = rigid_body_law();
    for (double eta : {1.0, 3.3, 8.2}) {
        const Vector x{0.0, 0.0, 0.0};
        const auto dx = eval_closed_loop(model, law, Vector{eta}, x, law(x), Vector{0.0});
        CHECK(dx == Vector{0.0, 0.0, 0.0});
        CHECK(rk4_step(model, law(x), Vector{eta}, kNoW, x, 0.0, 0.1) == x);
    }
}

TEST_CASE("rk4_step closed forms", "[dynamics][rk4]") {
    SECTION("zero vector field leaves the state unchanged") {
        const auto still = scalar_decay_model(Box{{0.0}, Vector{0.0}});
        CHECK(rk4_step(still, Vector{0.0}, Vector{0.0}, kNoW, Vector{3.25}, 0.0, 0.1) == Vector{3.25});
    }
    SECTION("exponential decay") {
        const auto decay = scalar_decay_model();
        const auto x = rk4_step(decay, Vector{0.0}, Vector{1.0}, kNoW, Vector{1.0}, 0.0, 0.01);
        CHECK(std::abs(x[0] - std::exp(-0.01)) < 1e-9);
    }
    SECTION("non-positive step is a contract violation") {
        const auto decay = scalar_decay_model();
        CHECK_THROWS_AS(rk4_step(decay, Vector{0.0}, Vector{1.0}, kNoW, Vector{1.0}, 0.0, 0.0), ContractViolation);
        CHECK_THROWS_AS(rk4_step(decay, Vector{0.0}, Vector{1.0}, kNoW, Vector{1.0}, 0.0, -1e-3), ContractViolation);
    }
    SECTION("non-finite result reports the blow-up time") {
        const PlantModel blowup(
            "square", 1, 1, 1,
            [](std::span<const double>, std::span<const double> x, std::span<const double>, std::span<const double>,
               std::span<double> dx) { dx[0] = x[0] * x[0]; },
            Box{{0.0}, Vector{1.0}}, 1e300);
        try {
            (void)rk4_step(blowup, Vector{0.0}, Vector{0.0}, kNoW, Vector{1e200}, 2.0, 0.5);
            FAIL("expected divergence");
        } catch (const DivergenceError& e) {
            CHECK(e.time() == 2.5);
        }
    }
}

TEST_CASE("rk4 is exact for the rigid body under a held input", "[dynamics][rk4]") {
    // With u fixed, x1 and x2 are affine in t and x3 is a cubic.
    const auto model = rigid_body_model();
    const double a = 0.6, b = -0.5, c = 0.7, u1 = -0.4, u2 = 0.9, eta = 4.0, t = 0.8;
    const Vector x = integrate_held(model, Vector{u1, u2}, Vector{eta}, Vector{a, b, c}, t, 0.1);
    const double x3 = c + eta * (a * b * t + (a * u2 + b * u1) * t * t / 2.0 + u1 * u2 * t * t * t / 3.0);
    CHECK(x[0] == Approx(a + u1 * t).epsilon(1e-14));
    CHECK(x[1] == Approx(b + u2 * t).epsilon(1e-14));
    CHECK(x[2] == Approx(x3).epsilon(1e-13));
}

TEST_CASE("rk4 global error is fourth order", "[dynamics][rk4]") {
    const auto decay = scalar_decay_model();
    const double exact = std::exp(-2.0);
    auto error = [&](double h) {
        return std::abs(integrate_held(decay, Vector{0.0}, Vector{2.0}, Vector{1.0}, 1.0, h)[0] - exact);
    };
    const double ratio = error(0.1) / error(0.05);
    CHECK(ratio > 16.0 * 0.7);
    CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("continuous rigid-body loop converges from (1,0,0)", "[dynamics][rk4]") {
    const auto model = rigid_body_model();
    const auto law = rigid_body_law();
    const auto x = integrate_continuous(model, law, Vector{1.0}, Vector{1.0, 0.0, 0.0}, 15.0, 1e-4);
    const auto fine = integrate_continuous(model, law, Vector{1.0}, Vector{1.0, 0.0, 0.0}, 15.0, 1e-5);
    CHECK(norm(x) < 1e-2);
    CHECK(distance(x, fine) < 1e-8);
}

TEST_CASE("integration is bit-deterministic", "[dynamics]") {
    const auto model = rigid_body_model();
    const auto law = rigid_body_law();
    const Vector x0{0.3, -0.8, 0.5};
    const auto a = integrate_continuous(model, law, Vector{5.5}, x0, 2.0, 1e-3);
    const auto b = integrate_continuous(model, law, Vector{5.5}, x0, 2.0, 1e-3);
    CHECK(a == b);
}

TEST_CASE("disturbance profiles", "[dynamics][disturbance]") {
    const DisturbanceProfile w(1, {{7.4, 8.92, Vector{0.6}}}, 0.6);
    Vector out(1);
    w.value_at(7.3999, out);
    CHECK(out[0] == 0.0);
    w.value_at(7.4, out);
    CHECK(out[0] == 0.6);
    w.value_at(8.92, out);
    CHECK(out[0] == 0.0);
    w.left_limit(8.92, out);
    CHECK(out[0] == 0.6);
    w.left_limit(7.4, out);
    CHECK(out[0] == 0.0);
    CHECK(w.breakpoints() == std::vector<double>{7.4, 8.92});

    CHECK_THROWS_AS(DisturbanceProfile(1, {{0.0, 2.0, Vector{0.1}}, {1.0, 3.0, Vector{0.1}}}, 1.0), ContractViolation);
    CHECK_THROWS_AS(DisturbanceProfile(1, {{0.0, 1.0, Vector{0.7}}}, 0.6), ContractViolation);
    CHECK_THROWS_AS(DisturbanceProfile(1, {{0.0, 1.0, Vector{0.1, 0.1}}}, 1.0), ContractViolation);
}

TEST_CASE("eta schedules are piecewise constant", "[dynamics]") {
    const EtaSchedule s({{0.0, Vector{1.0}}, {5.0, Vector{8.0}}});
    CHECK(s.at(0.0) == Vector{1.0});
    CHECK(s.at(4.999) == Vector{1.0});
    CHECK(s.at(5.0) == Vector{8.0});
    CHECK(s.at(100.0) == Vector{8.0});
    CHECK(s.breakpoints() == std::vector<double>{5.0});
    CHECK(EtaSchedule(Vector{2.0}).breakpoints().empty());
}

TEST_CASE("plant registry", "[dynamics][config]") {
    for (const auto& name : registered_plants()) {
        const auto p = make_plant(name);
        CHECK(p.model.dim_state() == p.law.dim_state());
        CHECK(p.model.dim_input() == p.law.dim_input());
    }
    CHECK_THROWS_AS(make_plant("pendulum"), ConfigError);
}
