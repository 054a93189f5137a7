#include <catch_amalgamated.hpp>

#include "qmlab/parallel.hpp"
#include "qmlab/rng.hpp"
#include "qmlab/scenarios.hpp"
#include "qmlab/suites.hpp"

using namespace qmlab;
using Catch::Approx;

TEST_CASE("seed derivation is stable and suite-specific", "[harness]") {
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(trial_seed(7, "cs", 3) != trial_seed(7, "jm", 3));
  Rng a(5), b(5);
  CHECK((haar_unitary(a, 3) - haar_unitary(b, 3)).norm() == 0.0);
  Rng c(9);
  const Matrix u = haar_unitary(c, 4);
  CHECK((u.adjoint() * u - Matrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("bound reports evaluate and serialize", "[harness]") {
  BoundReport r = make_bound("cs", 1.0, 0.9, 10.0, 1e-2);
  CHECK(r.slack == Approx(-0.1));
  CHECK(r.pass);
  r.tolerance = 1e-3;
  r.evaluate();
  CHECK_FALSE(r.pass);
  r.aux["x"] = 0.5;
  const BoundReport back = report_from_json(report_to_json(r));
  CHECK(back.proposition == "cs");
  CHECK(back.slack == r.slack);
  CHECK(back.aux.at("x") == 0.5);
  CHECK(vacuous_bound("hp", "why").pass);
  CHECK(instance_digest({"a", "b"}) != instance_digest({"ab"}));
  CHECK(report_csv_row(r).find("cs,") == 0);
}

TEST_CASE("suite lists and manifests", "[harness]") {
  CHECK(parse_suite_list("all") == suite_ids());
  CHECK(parse_suite_list("cs,jm") == std::vector<std::string>{"cs", "jm"});
  CHECK_THROWS_AS(parse_suite_list("cs,nope"), ConfigError);
  const SuiteConfig cfg = suite_config_from_text(
      R"({"seed": 3, "shapes": [[2]], "suites": ["cs", {"id": "jm", "trials": 4, "tolerances": {"jm": 1e-7}}]})");
  CHECK(cfg.seed == 3);
  CHECK(cfg.suites.size() == 2);
  CHECK(cfg.per_suite_trials.at("jm") == 4);
  CHECK(cfg.tolerance_overrides.at("jm") == 1e-7);
  CHECK_THROWS_AS(suite_config_from_text("{\"suites\": 4}"), ConfigError);
  CHECK_THROWS_AS(suite_config_from_text("not json"), ConfigError);
}

TEST_CASE("runs are deterministic across thread counts", "[harness]") {
  SuiteConfig cfg = default_suite_config();
  cfg.suites = {"cs", "perfect", "appred"};
  cfg.trials = 12;
  cfg.threads = 1;
  const std::string one = dump_text(run_report_to_json(run_suite(cfg)), 2);
  cfg.threads = 4;
  const RunReport r = run_suite(cfg);
  CHECK(dump_text(run_report_to_json(r), 2) == one);
  CHECK(r.pass());
  CHECK(run_report_csv(r).rfind("suite,trials", 0) == 0);
}

TEST_CASE("an injected bug is caught and replayable", "[harness]") {
  SuiteConfig cfg = default_suite_config();
  cfg.suites = {"covariance"};
  cfg.trials = 5;
  cfg.inject_bug = "covariance";
  const RunReport r = run_suite(cfg);
  CHECK_FALSE(r.pass());
  REQUIRE_FALSE(r.suites[0].failures.empty());
  const auto& f = r.suites[0].failures.front();
  const auto replay = run_trial("covariance", f.seed, cfg);
  REQUIRE_FALSE(replay.empty());
  CHECK(replay.front().lhs == f.lhs);
  CHECK(replay.front().rhs == f.rhs);
}

TEST_CASE("tolerance overrides apply by proposition id", "[harness]") {
  SuiteConfig cfg = default_suite_config();
  cfg.suites = {"cs"};
  cfg.trials = 3;
  cfg.tolerance_overrides["cs"] = 0.25;
  const RunReport r = run_suite(cfg);
  CHECK(r.pass());
  const Json j = run_report_to_json(r);
  CHECK(j["config"]["tolerance-overrides"]["cs"].get<double>() == 0.25);
}

TEST_CASE("eps grids and the sigma curve", "[harness]") {
  const auto v = parse_eps_grid("0:0.45:0.05").values();
  REQUIRE(v.size() == 10);
  CHECK(v.back() == Approx(0.45));
  CHECK_THROWS_AS(parse_eps_grid("0:0.4"), ArgumentError);
  CHECK_THROWS_AS(parse_eps_grid("0:0.4:-1"), ArgumentError);
  const auto rows = sigma_curve({0.0, 0.25});
  CHECK(rows[1].sigma == Approx(std::sqrt(3.0)));
  CHECK(rows[0].reduction_gap == 1.0);
  CHECK_THROWS_AS(sigma_curve({0.5}), ArgumentError);
  CHECK(sigma_curve_csv(rows).rfind("eps,sigma,", 0) == 0);
}

TEST_CASE("scenario registry", "[harness]") {
  for (const auto& name : {"cnot", "two-bit", "example7", "reduction-counterexample", "hpdelta-curve"}) {
    const ScenarioResult r = run_scenario(name);
    CHECK(r.pass);
    CHECK_FALSE(r.items.empty());
  }
  CHECK_THROWS_AS(run_scenario("nope"), ArgumentError);
}

TEST_CASE("blurred position measurement on small grids", "[harness]") {
  DaviesOptions o;
  o.n = 256;
  const DaviesResult r = davies_study(o);
  CHECK(r.interior_bias < 1e-9 * o.half_width);
  CHECK(r.relative_error < 0.05);
  CHECK(r.boundary_bias > r.interior_bias);
}

TEST_CASE("parallel_for covers every index once", "[harness]") {
  std::vector<int> hits(100, 0);
  parallel_for(100, [&](std::size_t i) { ++hits[i]; }, 3);
  for (int h : hits) CHECK(h == 1);
}
