#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmlab/errors.hpp"

namespace qmlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// A finite-dimensional C*-algebra M_{n_1} + ... + M_{n_k}, recorded by its
// ordered list of block dimensions.
class AlgebraShape {
 public:
  explicit AlgebraShape(std::vector<int> block_dims);

  static AlgebraShape full(int n);
  static AlgebraShape abelian(int n);

  const std::vector<int>& block_dims() const { return dims_; }
  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int block_dim(int i) const { return dims_.at(i); }
  // Row/column offset of block i inside the dense total_dim x total_dim matrix.
  int offset(int i) const { return offsets_.at(i); }
  int total_dim() const { return total_; }
  std::string to_string() const;

  friend bool operator==(const AlgebraShape& a, const AlgebraShape& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// Blocks of (S, T) are ordered lexicographically by (i, j) with dimension
// s_i * t_j; inside a block the index is a * t_j + b.
AlgebraShape tensor(const AlgebraShape& s, const AlgebraShape& t);

// perm[k] = position inside tensor(s, t) of the Kronecker-product index
// k = alpha * t.total_dim() + beta.
std::vector<int> tensor_permutation(const AlgebraShape& s, const AlgebraShape& t);

void require_same_shape(const AlgebraShape& a, const AlgebraShape& b, const char* where);

class Element {
 public:
  Element(AlgebraShape shape, std::vector<Matrix> blocks);

  static Element zero(const AlgebraShape& shape);
  static Element identity(const AlgebraShape& shape);
  static Element scalar(const AlgebraShape& shape, Complex c);
  // Reads the diagonal blocks of a dense matrix; off-block entries larger
  // than tol * max(1, |dense|) raise a ShapeError.
  static Element from_dense(const AlgebraShape& shape, const Matrix& dense, double tol = 1e-10);
  // Convenience for single-block algebras.
  static Element from_matrix(const Matrix& m);

  const AlgebraShape& shape() const { return shape_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(int i) const { return blocks_.at(i); }
  Matrix to_dense() const;

  Element adjoint() const;
  Element hermitian_part() const;
  double operator_norm() const;
  // Largest entrywise deviation from the adjoint.
  double hermiticity_defect() const;
  // Default tolerance is 1e-10 * ||X||.
  bool is_hermitian(double tol = -1.0) const;
  Complex trace() const;

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(Complex c);

 private:
  AlgebraShape shape_;
  std::vector<Matrix> blocks_;
};

Element operator+(Element a, const Element& b);
Element operator-(Element a, const Element& b);
Element operator-(Element a);
Element operator*(const Element& a, const Element& b);
Element operator*(Complex c, Element a);
Element operator*(Element a, Complex c);

Element commutator(const Element& a, const Element& b);
Element anticommutator(const Element& a, const Element& b);
double operator_norm(const Element& a);
Matrix kron(const Matrix& a, const Matrix& b);
// Kronecker product placed on tensor(a.shape(), b.shape()).
Element kron(const Element& a, const Element& b);

// Throws DomainError unless x is Hermitian within 1e-10 * ||x||.
void require_hermitian(const Element& x, const char* where);
// Throws DomainError unless p is Hermitian and idempotent within tol.
void require_projection(const Element& p, const char* where, double tol = 1e-10);

struct SpectralOptions {
  double cluster_tol = -1.0;  // negative: 1e-8 * ||X||
  double herm_tol = -1.0;     // negative: 1e-10 * ||X||
  bool symmetrize = false;    // replace X by (X + X^dagger)/2 before decomposing
};

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // strictly increasing cluster representatives
  std::vector<Element> projections;

  Element reconstruct() const;
};

SpectralDecomposition spectral_decompose(const Element& x, const SpectralOptions& opts = {});
Element apply_function(const std::function<double(double)>& f, const Element& x,
                       const SpectralOptions& opts = {});
Element band_projection(const Element& x, double lo, double hi,
                        const SpectralOptions& opts = {});

// All eigenvalues of a Hermitian element in increasing order, over all blocks.
std::vector<double> eigenvalues(const Element& x);
double min_eigenvalue(const Element& x);
double max_eigenvalue(const Element& x);
// Sum of absolute eigenvalues of a Hermitian element.
double trace_norm(const Element& x);

struct CenterDistance {
  double distance = 0.0;
  int block = 0;
  Element witness;
};

CenterDistance distance_to_center(const Element& x);

// Structured-text record {"shape": [...], "blocks": [[[re, im], ...], ...]}.
std::string to_text(const Element& e);
Element element_from_text(const std::string& text);

// Pauli matrices and spin projections on M_2.
Element pauli_x();
Element pauli_y();
Element pauli_z();
Element spin_up_projection();
Element spin_down_projection();

}  // namespace qmlab
