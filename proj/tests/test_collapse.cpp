#include <catch_amalgamated.hpp>

#include "qmlab/collapse.hpp"
#include "qmlab/random.hpp"
#include "qmlab/scenarios.hpp"

using namespace qmlab;
using Catch::Approx;

TEST_CASE("coherence bound on a two-level pointer", "[collapse]") {
  const AlgebraShape s = AlgebraShape::full(2);
  const State up = State::pure(s, spin_up()), down = State::pure(s, spin_down());
  const BoundReport r = coherence_bound(up, down, pauli_z(), pauli_x());
  CHECK(r.pass);
  CHECK(r.lhs == Approx(1.0));
  CHECK(r.rhs == Approx(1.0));
  CHECK_THROWS_AS(coherence_bound(up, up, pauli_z(), pauli_x()), DegenerateGapError);
}

TEST_CASE("collapse gap on random dilations", "[collapse]") {
  Rng rng(14);
  const AlgebraShape sys = AlgebraShape::full(2), app = AlgebraShape::full(3);
  for (int t = 0; t < 10; ++t) {
    const DilatedSetup ds = random_dilated_setup(sys, app, 100 + static_cast<std::uint64_t>(t));
    const Vector v = random_unit_vector(rng, 2);
    Vector w(2);
    w << -std::conj(v(1)), std::conj(v(0));
    const State p1 = State::pure(sys, v), p2 = State::pure(sys, w);
    const double th = uniform(rng, 0.1, 1.4);
    const Element a = embed_system(random_hermitian(rng, sys), app);
    try {
      CHECK(collapse_gap(ds.dilation, p1, p2, std::cos(th), std::sin(th), ds.setup.pointer(), a).pass);
    } catch (const DegenerateGapError&) {
    }
  }
}

TEST_CASE("perfect measurements reduce and collapse exactly", "[collapse]") {
  Rng rng(23);
  for (int t = 0; t < 10; ++t) {
    const PerfectSetup ps = random_perfect_setup(rng, AlgebraShape({1, 2}), 1 + t % 3, 1 + t % 2);
    const MeasurementSetup& m = ps.dilated.setup;
    const State rho = random_state(rng, m.map().codomain());
    const BoundReport red = perfect_reduction_check(m.map(), rho, m.measured(), m.pointer());
    CHECK(red.lhs < 1e-9);
    const BoundReport col = perfect_collapse_check(m.map(), rho, m.measured(), m.pointer());
    CHECK(col.lhs < 1e-9);
  }
}

TEST_CASE("commutant basis spans matrices commuting with Y", "[collapse]") {
  Matrix y(3, 3);
  y << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0;
  const Element ye = Element::from_matrix(y);
  const auto basis = commutant_basis(ye);
  CHECK(basis.size() == 5);
  for (const auto& b : basis) CHECK(commutator(ye, b).operator_norm() < 1e-12);
}

TEST_CASE("reduction gap with certified defect", "[collapse]") {
  Rng rng(40);
  const AlgebraShape sys = AlgebraShape::full(2);
  const PerfectSetup ps = random_perfect_setup(rng, sys, 2, 1);
  const DilatedSetup bent = perturb_setup(rng, ps.dilated, 0.05);
  const Element p = ps.projections[0];
  const Element q = ps.pointer_projections[0];
  const double delta = reduction_defect(bent.setup.map(), p, q);
  CHECK(delta > 0.0);
  const State rho = random_state(rng, sys);
  const BoundReport r = reduction_gap_projection(bent.dilation, rho, p, q, delta);
  CHECK(r.pass);
  CHECK_THROWS_AS(reduction_gap_projection(bent.dilation, rho, p, q, 0.5 * delta), PreconditionError);
}

TEST_CASE("band bounds", "[collapse]") {
  Rng rng(3);
  const MeasurementSetup s = example7_setup(0.1);
  const Element b = random_hermitian(rng, s.map().domain());
  CHECK(heisenberg_collapse_band_bound(s, b, -1.0, 1.0, 0.1).pass);
  CHECK(almost_classical_band_bound(random_hermitian(rng, AlgebraShape::full(3)),
                                    random_hermitian(rng, AlgebraShape::full(3)), -1.0, 0.5, 0.2)
            .pass);
  CHECK(almost_classical_band_bound(pauli_x(), pauli_z(), 0.0, 0.05, 0.1).vacuous);
}

TEST_CASE("generalized reduction returns three variants", "[collapse]") {
  Rng rng(6);
  const DilatedSetup ds = random_dilated_setup(AlgebraShape::full(2), AlgebraShape::full(2), 77);
  const auto reps = generalized_reduction_bound(ds.setup, random_state(rng, AlgebraShape::full(2)));
  REQUIRE(reps.size() == 3);
  CHECK(reps[0].proposition == "appred");
  CHECK(reps[1].proposition == "appred-var");
  CHECK(reps[2].proposition == "appred-proj");
  for (const auto& r : reps) CHECK(r.pass);
}

TEST_CASE("the reduction counterexample has gap one minus eps", "[collapse]") {
  for (double eps : {0.05, 0.2, 0.45}) {
    const MeasurementSetup s = reduction_counterexample_setup(eps);
    const State down = State::pure(AlgebraShape::full(2), spin_down());
    const State lhs = reduced_state(s.map().dual(down), s.pointer());
    const State rhs = s.map().dual(reduced_state(down, s.measured()));
    CHECK(0.5 * state_distance(lhs, rhs) == Approx(1.0 - eps).margin(1e-12));
  }
}

TEST_CASE("pointer erasure on an exact construction", "[collapse]") {
  const ScenarioResult r = run_scenario("crux");
  CHECK(r.pass);
  bool saw_exact = false;
  for (const auto& item : r.items)
    if (item.proposition == "crux") {
      saw_exact = true;
      CHECK(item.lhs <= 1e-9 * item.scale);
    }
  CHECK(saw_exact);
}
