#include <catch_amalgamated.hpp>

#include "qmlab/maps.hpp"
#include "qmlab/random.hpp"
#include "qmlab/states.hpp"

using namespace qmlab;
using Catch::Approx;

TEST_CASE("states validate positivity and normalization", "[states]") {
  Matrix bad(2, 2);
  bad << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS(State(Element::from_matrix(bad)), DomainError);
  Matrix half(2, 2);
  half << 0.25, 0.0, 0.0, 0.25;
  CHECK_THROWS_AS(State(Element::from_matrix(half)), DomainError);

  const State up = State::pure(AlgebraShape::full(2), spin_up());
  CHECK(up(pauli_z()).real() == Approx(1.0));
  CHECK(variance(up, pauli_x()) == Approx(1.0));
  REQUIRE(up.vector().has_value());
  CHECK(std::abs((*up.vector())(0) - 1.0) < 1e-12);
  CHECK_FALSE(State::maximally_mixed(AlgebraShape::full(2)).vector().has_value());
}

TEST_CASE("induced and joint distributions", "[states]") {
  Vector plus(2);
  plus << 1.0, 1.0;
  const State s = State::pure(AlgebraShape::full(2), plus);
  const ProbabilityTable t = induced_distribution(s, pauli_z());
  REQUIRE(t.entries.size() == 2);
  CHECK(t.total() == Approx(1.0));
  CHECK(t.mean() == Approx(0.0).margin(1e-12));

  const Element a = kron(pauli_z(), Element::identity(AlgebraShape::full(2)));
  const Element b = kron(Element::identity(AlgebraShape::full(2)), pauli_z());
  const State prod = State::pure(tensor(AlgebraShape::full(2), AlgebraShape::full(2)),
                                 kron_vector(plus, spin_up(), AlgebraShape::full(2), AlgebraShape::full(2)));
  const JointProbabilityTable j = joint_distribution(prod, a, b);
  CHECK(j.at(1.0, 1.0) == Approx(0.5));
  CHECK(j.at(-1.0, -1.0) == Approx(0.0).margin(1e-12));
  CHECK(j.marginal_x().mean() == Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(joint_distribution(prod, a, kron(pauli_x(), Element::identity(AlgebraShape::full(2)))),
                  CommutationError);
}

TEST_CASE("reduced and collapsed states", "[states]") {
  Vector plus(2);
  plus << 1.0, 1.0;
  const State s = State::pure(AlgebraShape::full(2), plus);
  const State r = reduced_state(s, spin_up_projection());
  CHECK(state_distance(r, State::pure(AlgebraShape::full(2), spin_up())) < 1e-12);
  const State c = collapsed_state(s, pauli_z());
  CHECK(state_distance(c, State::maximally_mixed(AlgebraShape::full(2))) < 1e-12);
  const State down = State::pure(AlgebraShape::full(2), spin_down());
  CHECK_THROWS_AS(reduced_state(down, spin_up_projection()), UndefinedReductionError);
  CHECK(state_distance(s, down) == Approx(std::sqrt(2.0)));
}

TEST_CASE("CP maps: construction, duals and Choi test", "[maps]") {
  const AlgebraShape a({2, 1}), b = AlgebraShape::full(3);
  const CPMap m = random_cpmap(b, a, 2, 41);
  CHECK(m.unitality_defect() < 1e-10);
  CHECK(is_completely_positive(m).positive);
  CHECK(is_completely_positive(LinearMap::from_cpmap(m)).positive);
  CHECK_FALSE(is_completely_positive(LinearMap::transpose(AlgebraShape::full(2))).positive);

  Rng rng(2);
  const State rho = random_state(rng, a);
  const Element y = random_hermitian(rng, b);
  CHECK(std::abs(m.dual(rho)(y) - rho(m.apply(y))) < 1e-12);
  CHECK(maps_equal(m, cpmap_from_text(to_text(m))));

  std::vector<Matrix> k = m.kraus();
  k[0] *= 1.1;
  CHECK_THROWS_AS(CPMap(b, a, k), DomainError);
}

TEST_CASE("composition and amplification", "[maps]") {
  const CPMap f = random_cpmap(AlgebraShape::full(2), AlgebraShape::full(3), 2, 5);
  const CPMap g = random_cpmap(AlgebraShape::full(3), AlgebraShape({2, 2}), 1, 6);
  const CPMap gf = compose(g, f);
  Rng rng(1);
  const Element x = random_element(rng, AlgebraShape::full(2));
  CHECK((gf.apply(x) - g.apply(f.apply(x))).operator_norm() < 1e-12);
  CHECK(is_completely_positive(tensor_with_identity(2, g)).positive);
  CHECK_THROWS_AS(compose(f, g), ShapeError);
}

TEST_CASE("dilations and partial traces", "[maps]") {
  Rng rng(9);
  const AlgebraShape sys({1, 2}), app = AlgebraShape::full(2);
  const Element u = random_unitary(rng, tensor(sys, app));
  const State tau = random_state(rng, app);
  const DilatedMap dm = dilated_measurement(u, tau, sys);
  CHECK(dm.map.unitality_defect() < 1e-10);

  const Element a = random_hermitian(rng, sys);
  const Element got = dm.map.apply(embed_system(a, app));
  const Element want = partial_trace_apparatus(u.adjoint() * embed_system(a, app) * u *
                                                   embed_apparatus(sys, tau.density()),
                                               sys, app);
  CHECK((got - want).operator_norm() < 1e-12);
  CHECK(std::abs(partial_trace_system(embed_apparatus(sys, tau.density()), sys, app).trace() - 3.0) < 1e-12);
  CHECK_THROWS_AS(dilated_measurement(2.0 * u, tau, sys), DomainError);
}
