#include <catch_amalgamated.hpp>

#include "qmlab/measurement.hpp"
#include "qmlab/random.hpp"
#include "qmlab/scenarios.hpp"

using namespace qmlab;
using Catch::Approx;

TEST_CASE("quality of the unsharp family matches the closed form", "[measurement]") {
  for (double eps : {0.0, 0.1, 0.3, 0.45}) {
    const MeasurementSetup s = example7_setup(eps);
    CHECK(s.unbiased());
    CHECK(quality(s) == Approx(example7_sigma(eps)).margin(1e-12));
  }
  CHECK_THROWS_AS(example7_setup(0.5), ArgumentError);
}

TEST_CASE("biased setups are rejected by quality", "[measurement]") {
  const MeasurementSetup s = example7_setup(0.2);
  const MeasurementSetup biased(s.map(), 2.0 * s.measured(), s.pointer(), s.apparatus());
  CHECK_FALSE(biased.unbiased());
  CHECK_THROWS_AS(quality(biased), BiasError);
}

TEST_CASE("perfect verdicts agree on both routes", "[measurement]") {
  Rng rng(21);
  for (int t = 0; t < 12; ++t) {
    const AlgebraShape s = t % 2 ? AlgebraShape({2, 1}) : AlgebraShape::full(3);
    const PerfectSetup ps = random_perfect_setup(rng, s, 1 + t % 3, 1 + t % 2);
    const PerfectVerdict v = is_perfect(ps.dilated.setup);
    CHECK(v.perfect);
    CHECK(v.routes_agree);
    const PerfectVerdict bent = is_perfect(perturb_setup(rng, ps.dilated, 0.2).setup);
    if (ps.values.size() > 1) {
      CHECK_FALSE(bent.perfect);
      CHECK(bent.routes_agree);
    }
  }
  const PerfectVerdict vn = is_perfect(von_neumann_measurement(pauli_x()));
  CHECK(vn.perfect);
}

TEST_CASE("structure of a quality-zero pointer", "[measurement]") {
  Rng rng(31);
  const PerfectSetup ps = random_perfect_setup(rng, AlgebraShape({2, 2}), 3, 2);
  const StructureReport r = structure_check(ps.dilated.setup.map(), ps.dilated.setup.pointer(), 1e-9, 4);
  CHECK(r.pass);
  CHECK(r.items.size() > 6);
  const MeasurementSetup unsharp = example7_setup(0.2);
  CHECK_THROWS_AS(structure_check(unsharp.map(), unsharp.pointer()), PreconditionError);
}

TEST_CASE("joint measurement bound and the tight Pauli family", "[measurement]") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const JointSetup js = random_joint_setup(rng, AlgebraShape::full(2), 2, 3, t % 2 == 0);
    const BoundReport r = joint_quality_bound(js.dilation.map, js.y1, js.y2);
    CHECK(r.pass);
    if (js.perfect) CHECK(r.lhs < 1e-9);
  }
  const ScenarioResult jm = run_scenario("jm-pauli");
  CHECK(jm.pass);
}

TEST_CASE("Heisenberg principle and disturbance on the unsharp family", "[measurement]") {
  const double eps = 0.1;
  const MeasurementSetup s = example7_setup(eps);
  const BoundReport r = heisenberg_principle_check(s, example7_disturbance(eps));
  CHECK(r.pass);
  CHECK(r.lhs == Approx(example7_hpdelta_rhs(eps)).epsilon(1e-12));

  const DisturbanceEstimate d = estimate_disturbance(s.map(), AlgebraShape::full(2), AlgebraShape::abelian(2), 16, 3);
  CHECK(d.lower <= example7_disturbance(eps) + 1e-9);
  CHECK(d.lower == Approx(example7_disturbance(eps)).margin(1e-6));

  const BoundReport zero = heisenberg_principle_check(s, 0.0);
  CHECK_FALSE(zero.pass);
}

TEST_CASE("POVM and von Neumann constructions", "[measurement]") {
  const double eps = 0.25;
  const MeasurementSetup s = example7_setup(eps);
  Matrix e0(2, 2), e1(2, 2);
  e0 << 1.0 - eps, 0.0, 0.0, eps;
  e1 << eps, 0.0, 0.0, 1.0 - eps;
  const double g = 1.0 / (1.0 - 2.0 * eps);
  const MeasurementSetup p = povm_measurement({{g, Element::from_matrix(e0)}, {-g, Element::from_matrix(e1)}});
  CHECK((p.measured() - pauli_z()).operator_norm() < 1e-12);
  CHECK(quality(p) == Approx(quality(s)).epsilon(1e-12));

  const MeasurementSetup vn = von_neumann_measurement(pauli_y());
  CHECK(quality(vn) < 1e-12);
  CHECK(vn.apparatus() == std::nullopt);
  CHECK((setup_from_text(to_text(vn)).pointer() - vn.pointer()).operator_norm() < 1e-15);
}

TEST_CASE("local Heisenberg bound on the spin chain construction", "[measurement]") {
  const MeasurementSetup s = local_heisenberg_setup();
  const BoundReport r = local_heisenberg_check(s, chain_spin('y'));
  CHECK(r.pass);
  CHECK(r.lhs > 0.1);
}
