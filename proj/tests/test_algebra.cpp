#include <catch_amalgamated.hpp>

#include "qmlab/algebra.hpp"
#include "qmlab/rng.hpp"

using namespace qmlab;
using Catch::Approx;

namespace {

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("shapes record block offsets and tensor layout", "[algebra]") {
  const AlgebraShape s({2, 3});
  CHECK(s.total_dim() == 5);
  CHECK(s.offset(1) == 2);
  CHECK(s.to_string() == "[2,3]");
  CHECK_THROWS_AS(AlgebraShape(std::vector<int>{}), ShapeError);
  CHECK_THROWS_AS(AlgebraShape({2, 0}), ShapeError);

  const AlgebraShape t = tensor(s, AlgebraShape::abelian(2));
  CHECK(t.block_dims() == std::vector<int>{2, 2, 3, 3});

  const auto perm = tensor_permutation(AlgebraShape::full(2), AlgebraShape::full(3));
  for (int k = 0; k < 6; ++k) CHECK(perm[static_cast<std::size_t>(k)] == k);
}

TEST_CASE("elements support the *-algebra operations blockwise", "[algebra]") {
  Rng rng(3);
  const AlgebraShape s({2, 3});
  const Element a = random_element(rng, s), b = random_element(rng, s);
  const Matrix dense = (a * b).to_dense();
  CHECK((dense - a.to_dense() * b.to_dense()).norm() < 1e-12);
  CHECK(((a * b).adjoint() - b.adjoint() * a.adjoint()).operator_norm() < 1e-12);
  CHECK((commutator(a, b) + commutator(b, a)).operator_norm() < 1e-12);
  CHECK(Element::identity(s).trace() == Complex(5.0));
  CHECK_THROWS_AS(a * Element::identity(AlgebraShape::full(5)), ShapeError);

  Matrix off = a.to_dense();
  off(0, 4) = 1.0;
  CHECK_THROWS_AS(Element::from_dense(s, off), ShapeError);
}

TEST_CASE("kron of elements matches the dense Kronecker product", "[algebra]") {
  Rng rng(5);
  const AlgebraShape s({1, 2}), t({2, 1});
  const Element a = random_element(rng, s), b = random_element(rng, t);
  const Element ab = kron(a, b);
  const auto perm = tensor_permutation(s, t);
  const Matrix k = kron(a.to_dense(), b.to_dense());
  const Matrix d = ab.to_dense();
  for (int i = 0; i < k.rows(); ++i)
    for (int j = 0; j < k.cols(); ++j)
      CHECK(std::abs(k(i, j) - d(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)])) < 1e-12);
}

TEST_CASE("spectral decomposition clusters and reconstructs", "[algebra]") {
  Rng rng(11);
  const AlgebraShape s({2, 3});
  const Element h = random_hermitian(rng, s);
  const SpectralDecomposition sd = spectral_decompose(h);
  CHECK((sd.reconstruct() - h).operator_norm() < 1e-10);
  Element sum = Element::zero(s);
  for (std::size_t i = 0; i < sd.projections.size(); ++i) {
    const Element& p = sd.projections[i];
    CHECK((p * p - p).operator_norm() < 1e-10);
    sum += p;
  }
  CHECK((sum - Element::identity(s)).operator_norm() < 1e-10);
  for (std::size_t i = 1; i < sd.eigenvalues.size(); ++i) CHECK(sd.eigenvalues[i] > sd.eigenvalues[i - 1]);

  const Element degenerate = Element::from_matrix(mat2(1.0, 0.0, 0.0, 1.0 + 1e-12));
  CHECK(spectral_decompose(degenerate).eigenvalues.size() == 1);
  CHECK_THROWS_AS(spectral_decompose(Element::from_matrix(mat2(0.0, 1.0, 0.0, 0.0))), DomainError);
}

TEST_CASE("functional calculus and band projections", "[algebra]") {
  const Element z = pauli_z();
  const Element sq = apply_function([](double x) { return x * x; }, z);
  CHECK((sq - Element::identity(z.shape())).operator_norm() < 1e-12);
  CHECK((band_projection(z, 0.5, 1.5) - spin_up_projection()).operator_norm() < 1e-12);
  CHECK(band_projection(z, 2.0, 3.0).operator_norm() == 0.0);
  CHECK(trace_norm(pauli_x()) == Approx(2.0));
  CHECK(min_eigenvalue(pauli_y()) == Approx(-1.0));
}

TEST_CASE("distance to the center is half the widest block spread", "[algebra]") {
  Matrix a(2, 2), b(1, 1);
  a << 3.0, 0.0, 0.0, -1.0;
  b << 10.0;
  const Element x(AlgebraShape({2, 1}), {a, b});
  const CenterDistance d = distance_to_center(x);
  CHECK(d.distance == Approx(2.0));
  CHECK(d.block == 0);
  const double ratio = commutator(x, d.witness).operator_norm() / (2.0 * d.witness.operator_norm());
  CHECK(ratio == Approx(2.0).epsilon(1e-12));

  CHECK(distance_to_center(Element::identity(AlgebraShape::abelian(3))).distance == 0.0);
}

TEST_CASE("elements round-trip through structured text", "[algebra]") {
  Rng rng(17);
  const Element e = random_element(rng, AlgebraShape({2, 1}));
  const Element back = element_from_text(to_text(e));
  CHECK(back.shape() == e.shape());
  CHECK((back - e).operator_norm() < 1e-15);
  CHECK_THROWS(element_from_text("{\"shape\": [2]}"));
}
