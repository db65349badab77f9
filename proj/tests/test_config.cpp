#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "stc/config.hpp"
#include "stc/errors.hpp"

using namespace stc;
using Catch::Approx;

namespace {

const Json kUniversal = Json::parse(R"({
  "kind": "self_trig_universal",
  "certificate": {"m1": 1.0, "m2": 0.0, "l": 61.1945, "w_bar": 0.0, "delta": 2.8},
  "nu": {"nu0": 0.42, "nu1": 61.1945, "nu2": 10.0, "nu3": 1e-6}
})");

}  // namespace

TEST_CASE("certificate parsing", "[config]") {
    const auto c = parse_certificate(Json::parse(R"({"m1": 4.7982, "m2": 1, "l": 61.1945, "w_bar": 0.6, "delta": 2.8})"));
    CHECK(c.m1 == 4.7982);
    CHECK(c.m2 == 1.0);
    CHECK(c.l == 61.1945);
    CHECK(c.w_bar == 0.6);
    CHECK(c.delta == 2.8);
    CHECK_THROWS_AS(parse_certificate(Json::parse(R"({"m1": "big"})")), ConfigError);
    CHECK_THROWS_AS(validate(parse_certificate(Json::parse(R"({"m1": 0.5, "l": 1, "delta": 1})"))),
                    ContractViolation);
}

TEST_CASE("radial function presets", "[config]") {
    CHECK(parse_radial(Json("linear:2.5"))(2.0) == Approx(5.0));
    CHECK(parse_radial(Json("sqrt:2"))(4.0) == Approx(4.0));
    CHECK(parse_radial(Json("poly:3,2"))(2.0) == Approx(12.0));
    CHECK(parse_radial(Json(1.5))(100.0) == 1.5);
    CHECK_THROWS_AS(parse_radial(Json("cubic:1")), ConfigError);
    CHECK_THROWS_AS(parse_radial(Json("poly:1")), ConfigError);
    CHECK_THROWS_AS(parse_radial(Json::array()), ConfigError);
}

TEST_CASE("policy parsing", "[config]") {
    const auto plant = make_plant("rigid_body");
    CHECK(parse_policy(Json::parse(R"({"kind": "continuous"})"), plant, 1e-4).kind_name() == "periodic");
    CHECK(parse_policy(Json::parse(R"({"kind": "event_relative", "sigma": 0.1})"), plant, 1e-4).is_event_triggered());

    const auto u = parse_policy(kUniversal, plant, 1e-4);
    CHECK(u.kind_name() == "self_trig_universal");
    CHECK(u.closed_form_interval(0.0) == Approx(211.6e-3).epsilon(5e-3));

    Json strict = kUniversal;
    strict["certificate"]["m1"] = 4.7982;
    CHECK_THROWS_AS(parse_policy(strict, plant, 1e-4), ConfigError);
    strict["verify"] = false;
    CHECK(parse_policy(strict, plant, 1e-4).verification_waived());

    const auto np = parse_policy(Json::parse(R"({"kind": "nominal_prediction", "eta_nominal": 1.0,
        "rule": {"kind": "lebesgue", "delta": 0.05}})"),
                                 plant, 1e-4);
    CHECK(np.kind_name() == "nominal_prediction");

    const auto global = parse_policy(Json::parse(R"({"kind": "self_trig_global",
        "kl_certificate": {"beta0": "linear:1", "gamma1": "linear:1", "gamma2": "linear:1", "l": 61.1945},
        "envelope": 1.0, "nu": {"nu0": 0.1, "nu1": 61.1945, "nu2": "linear:10", "nu3": 1e-6},
        "delta": 2.8, "w_bar": 0.0})"),
                                     plant, 1e-4);
    CHECK(global.kind_name() == "self_trig_global");

    CHECK_THROWS_AS(parse_policy(Json::parse(R"({"kind": "teleport"})"), plant, 1e-4), ConfigError);
    CHECK_THROWS_AS(parse_policy(Json::parse(R"({"sigma": 0.1})"), plant, 1e-4), ConfigError);
    CHECK_THROWS_AS(parse_policy(Json::parse(R"({"kind": "event_relative", "sigma": 2.0})"), plant, 1e-4),
                    ContractViolation);
}

TEST_CASE("eta and disturbance parsing", "[config]") {
    const auto model = rigid_body_model();
    CHECK(parse_eta(Json(8.0), model, 0).at(3.0) == Vector{8.0});
    const auto sched = parse_eta(Json::parse(R"({"schedule": [[0, 1.0], [5, 8.0]]})"), model, 0);
    CHECK(sched.at(6.0) == Vector{8.0});
    const double drawn = parse_eta(Json::parse(R"({"draw": "uniform"})"), model, 11).at(0.0)[0];
    CHECK(drawn >= 1.0);
    CHECK(drawn <= 8.2);
    CHECK(parse_eta(Json::parse(R"({"draw": "uniform"})"), model, 11).at(0.0)[0] == drawn);
    CHECK_THROWS(parse_eta(Json(9.0), model, 0));

    const Json w = Json::parse(R"({"bound": 0.6, "segments": [{"start": 7.4, "end": 8.92, "value": 0.6}]})");
    const auto d = parse_disturbance(&w, model);
    CHECK(d.breakpoints() == std::vector<double>{7.4, 8.92});
    CHECK(parse_disturbance(nullptr, model).breakpoints().empty());
}

TEST_CASE("scenario and experiment parsing", "[config]") {
    const Json sc = Json::parse(R"({"id": "s", "plant": "rigid_body", "eta": 8.0, "x0": [1, 0, 0],
        "horizon": 2.0, "dt": 1e-3, "policy": {"kind": "periodic", "h": 0.01}})");
    const auto s = parse_scenario(sc);
    CHECK(s.id == "s");
    CHECK(s.horizon == 2.0);
    CHECK(s.x0 == Vector{1.0, 0.0, 0.0});

    Json bad = sc;
    bad["x0"] = {1, 0};
    CHECK_THROWS_AS(parse_scenario(bad), ConfigError);
    bad = sc;
    bad["plant"] = "pendulum";
    CHECK_THROWS_AS(parse_scenario(bad), ConfigError);

    const auto dir = std::filesystem::path(STC_SOURCE_DIR) / "configs";
    for (const char* name : {"table_w0.json", "table_eta1.json", "table_w06.json"}) {
        const auto cfg = parse_experiment(load_json(dir / name));
        CHECK(cfg.ic_count == 25);
        CHECK(cfg.policies.size() == 6);
        CHECK_FALSE(cfg.assertions.empty());
    }
    CHECK_THROWS_AS(load_json(dir / "does_not_exist.json"), ConfigError);
}

TEST_CASE("tune from config", "[config][tuning]") {
    Json j{{"plant", "rigid_body"}, {"policy", kUniversal}};
    j["policy"]["bounds"] = {{"x0_norm", 4.7982}, {"ultimate_bound", 3.9633}};
    const auto ok = tune_from_config(j);
    CHECK(ok.feasible);
    CHECK(ok.report["kind"] == "self_trig_universal");
    CHECK(ok.report["tuning"]["sup_value"].get<double>() == Approx(61.1945 * 0.42 / 10.0).epsilon(1e-9));
    CHECK(ok.report["tuning"]["argmax_r"] == "inf");
    CHECK(ok.report["interval_bounds"]["h_max"].get<double>() == Approx(211.6e-3).epsilon(1e-2));

    j["policy"]["certificate"]["m1"] = 4.7982;
    const auto bad = tune_from_config(j);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.report["tuning"]["margin"].get<double>() < 0.0);

    Json periodic{{"policy", {{"kind", "periodic"}, {"h", 0.1}}}};
    CHECK_THROWS_AS(tune_from_config(periodic), ConfigError);
}

TEST_CASE("report serialisation", "[config]") {
    const auto r = to_json(TuningReport{.sup_value = 2.5, .argmax_r = 1.0, .delta_budget = 2.8, .feasible = true, .margin = 0.3});
    CHECK(r["sup_value"] == 2.5);
    CHECK(r["feasible"] == true);
    MetricsReport m;
    m.cost = 3.0;
    m.ultimate_bound = std::numeric_limits<double>::infinity();
    const auto mj = to_json(m);
    CHECK(mj["J"] == 3.0);
    CHECK(mj["ultimate_bound_est"] == "inf");
}
