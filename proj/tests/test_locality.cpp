#include <catch_amalgamated.hpp>

#include <cstdlib>

#include "qmlab/locality.hpp"
#include "qmlab/rng.hpp"

using namespace qmlab;
using Catch::Approx;

namespace {

struct EnvGuard {
  explicit EnvGuard(const char* value) { ::setenv("QMLAB_SIZE_GUARD", value, 1); }
  ~EnvGuard() { ::unsetenv("QMLAB_SIZE_GUARD"); }
};

}  // namespace

TEST_CASE("local elements embed at the right sites", "[locality]") {
  const LocalAlgebra chain = LocalAlgebra::uniform(3, 2);
  CHECK(chain.dense_dim() == 8);
  const Element x1 = embed(chain, make_local(chain, {1}, pauli_x().block(0)));
  const Element want = kron(kron(Element::identity(AlgebraShape::full(2)), pauli_x()),
                            Element::identity(AlgebraShape::full(2)));
  CHECK((x1 - want).operator_norm() < 1e-14);
  CHECK_THROWS_AS(make_local(chain, {3}, pauli_x().block(0)), ArgumentError);
  CHECK_THROWS_AS(make_local(chain, {0, 1}, pauli_x().block(0)), ShapeError);
}

TEST_CASE("spin averages have kappa 1/N and attain the 1-local bound", "[locality]") {
  for (int n = 2; n <= 6; ++n) {
    const LocalAlgebra chain = LocalAlgebra::uniform(n, 2);
    const GlobalObservable sz = spin_average(chain, 'z');
    CHECK(sz.kappa() == Approx(1.0 / n));
    const BoundReport r = commutator_bounds(chain, sz, make_local(chain, {n / 2}, pauli_x().block(0)));
    CHECK(r.pass);
    CHECK(r.lhs == Approx(2.0 / n).epsilon(1e-12));
    CHECK(r.rhs == Approx(2.0 / n).epsilon(1e-12));
  }
}

TEST_CASE("two global spin averages nearly commute", "[locality]") {
  const LocalAlgebra chain = LocalAlgebra::uniform(4, 2);
  const BoundReport r = commutator_bounds(chain, spin_average(chain, 'x'), spin_average(chain, 'y'));
  CHECK(r.pass);
  CHECK(r.lhs == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("superposition coherence is suppressed on macroscopically distinct states", "[locality]") {
  Rng rng(2);
  for (int n = 2; n <= 6; ++n) {
    const LocalAlgebra chain = LocalAlgebra::uniform(n, 2);
    std::vector<Vector> up(static_cast<std::size_t>(n), spin_up()), down(static_cast<std::size_t>(n), spin_down());
    const Vector p1 = make_product_state(chain, up).dense(), p2 = make_product_state(chain, down).dense();
    const LocalElement a = make_local(chain, {0}, random_hermitian(rng, AlgebraShape::full(2)).block(0));
    const BoundReport r = corzel_check(chain, p1, p2, spin_average(chain, 'z'), a, 0.6, 0.8);
    CHECK(r.pass);
    CHECK(r.lhs < 1e-12);
  }
  const LocalAlgebra chain = LocalAlgebra::uniform(2, 2);
  const Vector p = make_product_state(chain, {spin_up(), spin_up()}).dense();
  const LocalElement a = make_local(chain, {0}, pauli_x().block(0));
  CHECK_THROWS_AS(corzel_check(chain, p, p, spin_average(chain, 'z'), a, 0.6, 0.6), ArgumentError);
  CHECK(corzel_check(chain, p, p, spin_average(chain, 'z'), a, 0.6, 0.8).vacuous);
}

TEST_CASE("the size guard is configurable", "[locality]") {
  CHECK(size_guard() == kDefaultSizeGuard);
  {
    EnvGuard g("16");
    CHECK(size_guard() == 16);
    CHECK_THROWS_AS(LocalAlgebra::uniform(5, 2).require_dense("test"), SizeGuardError);
    CHECK_NOTHROW(LocalAlgebra::uniform(4, 2).require_dense("test"));
  }
  {
    EnvGuard g("zero");
    CHECK_THROWS_AS(size_guard(), ConfigError);
  }
  CHECK_THROWS_AS(LocalAlgebra::uniform(40, 2).require_dense("test"), SizeGuardError);
}

TEST_CASE("controlled-not and two-bit scenarios", "[locality]") {
  const CnotSetup c = cnot_setup();
  const Element mz = c.dilation.map.apply(embed_apparatus(AlgebraShape::full(2), pauli_z()));
  CHECK((mz - pauli_z()).operator_norm() < 1e-12);
  CHECK(hepp_cnot_scenario().pass);

  Vector plus(2);
  plus << 1.0, 1.0;
  const TwoBitReport t = two_bit_scenario(State::pure(AlgebraShape::full(2), plus));
  CHECK(t.pass);
  CHECK(t.max_off_diagonal < 1e-12);
  CHECK(t.diagonal_defect < 1e-12);
}

TEST_CASE("chain configurations parse and run", "[locality]") {
  const std::string text = R"({"N": 3, "atom_dims": [2, 2, 2],
    "pointer": {"kind": "global", "sites": [0, 1, 2], "terms": ["sz", "sz", "sz"]},
    "observable": {"kind": "local", "sites": [0, 1], "factor": [[1,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],
      [0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[-1,0]]},
    "states": [{"factors": ["up", "up", "+x"]}, {"factors": ["down", "down", "-x"]}],
    "alpha": [0.6, 0], "beta": [0, 0.8]})";
  const ChainConfig cfg = chain_config_from_text(text);
  CHECK(cfg.chain.sites() == 3);
  const auto reps = run_chain(cfg);
  REQUIRE_FALSE(reps.empty());
  for (const auto& r : reps) CHECK(r.pass);
  CHECK_THROWS_AS(chain_config_from_text("{\"N\": 2}"), ConfigError);
}
