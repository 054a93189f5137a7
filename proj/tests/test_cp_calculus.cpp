#include <catch_amalgamated.hpp>

#include "qmlab/cp_calculus.hpp"
#include "qmlab/random.hpp"

using namespace qmlab;
using Catch::Approx;

TEST_CASE("the F form is Hermitian-symmetric and positive on the diagonal", "[cp]") {
  const CPMap t = random_cpmap(AlgebraShape({2, 2}), AlgebraShape::full(2), 3, 17);
  Rng rng(4);
  const Element a = random_element(rng, t.domain()), b = random_element(rng, t.domain());
  CHECK((cs_form(t, a, b).adjoint() - cs_form(t, b, a)).operator_norm() < 1e-12);
  CHECK(min_eigenvalue(cs_form(t, b, b)) > -1e-12);
  CHECK(t_norm(t, b) == Approx(std::sqrt(max_eigenvalue(cs_form(t, b, b)))).epsilon(1e-10));
}

TEST_CASE("homomorphisms have vanishing T-norms", "[cp]") {
  Rng rng(8);
  const AlgebraShape s({2, 3});
  const CPMap u = CPMap::conjugation(random_unitary(rng, s));
  const Element b = random_element(rng, s);
  CHECK(t_norm(u, b) < 1e-12);
  CHECK(cs_form(u, b, b).operator_norm() < 1e-12);
}

TEST_CASE("psd square roots clip rounding and reject negatives", "[cp]") {
  Matrix p(2, 2);
  p << 4.0, 0.0, 0.0, -1e-12;
  const Element r = psd_sqrt(Element::from_matrix(p));
  CHECK(std::abs(r.block(0)(0, 0) - 2.0) < 1e-12);
  p(1, 1) = -1e-3;
  CHECK_THROWS_AS(psd_sqrt(Element::from_matrix(p)), DomainError);
}

TEST_CASE("Cauchy-Schwarz and its corollaries hold on random instances", "[cp]") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const CPMap t = random_cpmap(AlgebraShape({2, 3}), AlgebraShape({2, 2}), 2, seed + 100);
    const Element a = random_element(rng, t.domain()), b = random_element(rng, t.domain());
    CHECK(check_cs_inequality(t, a, b).pass);
    CHECK(almost_multiplication_bound(t, a, b).pass);
    const State rho = random_state(rng, t.codomain());
    const Element x = random_hermitian(rng, t.codomain()), y = random_hermitian(rng, t.codomain());
    CHECK(covariance_inequality_check(rho, x, y).pass);
    CHECK(heisenberg_uncertainty_check(rho, x, y).pass);
  }
}

TEST_CASE("a state functional reproduces expectation values", "[cp]") {
  Rng rng(12);
  const State rho = random_state(rng, AlgebraShape({1, 3}));
  const CPMap f = state_functional(rho);
  const Element a = random_element(rng, rho.shape());
  CHECK(std::abs(f.apply(a).block(0)(0, 0) - rho(a)) < 1e-12);
  const BoundReport r = check_cs_inequality(f, a, random_element(rng, rho.shape()));
  CHECK(r.pass);
  CHECK(r.proposition == "cs");
}

TEST_CASE("uncertainty saturates for spin-1/2 eigenstates", "[cp]") {
  Vector plus(2);
  plus << 1.0, 1.0;
  const State s = State::pure(AlgebraShape::full(2), plus);
  const BoundReport r = heisenberg_uncertainty_check(s, pauli_y(), pauli_z());
  CHECK(r.pass);
  CHECK(r.slack == Approx(0.0).margin(1e-12));
}
