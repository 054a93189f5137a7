#include "qmlab/rng.hpp"

#include <cmath>

#include "qmlab/text.hpp"

namespace qmlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) + index);
}

std::uint64_t trial_seed(std::uint64_t master, const std::string& suite, std::uint64_t trial) {
  return derive_seed(master ^ fnv1a(suite), trial);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Matrix gaussian_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  const double s = 1.0 / std::sqrt(2.0);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = g(rng);
      const double im = g(rng);
      m(r, c) = Complex(re * s, im * s);
    }
  return m;
}

Vector random_unit_vector(Rng& rng, int n) {
  Vector v = gaussian_matrix(rng, n, 1).col(0);
  return v / v.norm();
}

Matrix haar_unitary(Rng& rng, int n) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rng, n, n));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    if (a > 0.0) q.col(i) *= d / a;
  }
  return q;
}

Element random_element(Rng& rng, const AlgebraShape& shape) {
  std::vector<Matrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(gaussian_matrix(rng, d, d));
  return Element(shape, std::move(blocks));
}

Element random_hermitian(Rng& rng, const AlgebraShape& shape) {
  std::vector<Matrix> blocks;
  for (int d : shape.block_dims()) {
    Matrix g = gaussian_matrix(rng, d, d);
    blocks.push_back(0.5 * (g + g.adjoint()));
  }
  return Element(shape, std::move(blocks));
}

Element random_unitary(Rng& rng, const AlgebraShape& shape) {
  std::vector<Matrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(haar_unitary(rng, d));
  return Element(shape, std::move(blocks));
}

Vector random_block_vector(Rng& rng, const AlgebraShape& shape, int block) {
  if (block < 0)
    block = std::uniform_int_distribution<int>(0, shape.num_blocks() - 1)(rng);
  Vector v = Vector::Zero(shape.total_dim());
  v.segment(shape.offset(block), shape.block_dim(block)) =
      random_unit_vector(rng, shape.block_dim(block));
  return v;
}

State random_pure_state(Rng& rng, const AlgebraShape& shape) {
  return State::pure(shape, random_block_vector(rng, shape));
}

State random_state(Rng& rng, const AlgebraShape& shape) {
  std::vector<Matrix> blocks;
  double total = 0.0;
  for (int d : shape.block_dims()) {
    Matrix g = gaussian_matrix(rng, d, d);
    Matrix p = g * g.adjoint();
    p *= uniform(rng, 0.1, 1.0);
    total += p.trace().real();
    blocks.push_back(std::move(p));
  }
  for (auto& b : blocks) {
    b /= total;
    b = 0.5 * (b + b.adjoint()).eval();
  }
  return State(Element(shape, std::move(blocks)));
}

}  // namespace qmlab
