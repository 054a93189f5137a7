#include "qmlab/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "qmlab/text.hpp"

namespace qmlab {

AlgebraShape::AlgebraShape(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw ShapeError("algebra shape needs at least one block");
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    if (d < 1) throw ShapeError("block dimensions must be positive");
    offsets_.push_back(total_);
    total_ += d;
  }
}

AlgebraShape AlgebraShape::full(int n) { return AlgebraShape({n}); }

AlgebraShape AlgebraShape::abelian(int n) {
  if (n < 1) throw ShapeError("abelian algebra needs at least one point");
  return AlgebraShape(std::vector<int>(static_cast<std::size_t>(n), 1));
}

std::string AlgebraShape::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) out << (i ? "," : "") << dims_[i];
  out << ']';
  return out.str();
}

AlgebraShape tensor(const AlgebraShape& s, const AlgebraShape& t) {
  std::vector<int> dims;
  for (int a : s.block_dims())
    for (int b : t.block_dims()) dims.push_back(a * b);
  return AlgebraShape(dims);
}

std::vector<int> tensor_permutation(const AlgebraShape& s, const AlgebraShape& t) {
  AlgebraShape st = tensor(s, t);
  std::vector<int> perm(static_cast<std::size_t>(s.total_dim() * t.total_dim()));
  for (int i = 0; i < s.num_blocks(); ++i) {
    for (int j = 0; j < t.num_blocks(); ++j) {
      int blk = i * t.num_blocks() + j;
      int tj = t.block_dim(j);
      for (int a = 0; a < s.block_dim(i); ++a) {
        for (int b = 0; b < tj; ++b) {
          int kron_index = (s.offset(i) + a) * t.total_dim() + (t.offset(j) + b);
          perm[static_cast<std::size_t>(kron_index)] = st.offset(blk) + a * tj + b;
        }
      }
    }
  }
  return perm;
}

void require_same_shape(const AlgebraShape& a, const AlgebraShape& b, const char* where) {
  if (!(a == b))
    throw ShapeError(std::string(where) + ": incompatible shapes " + a.to_string() + " and " +
                     b.to_string());
}

namespace {

double block_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Element::Element(AlgebraShape shape, std::vector<Matrix> blocks)
    : shape_(std::move(shape)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != shape_.num_blocks())
    throw ShapeError("element has " + std::to_string(blocks_.size()) + " blocks, shape " +
                     shape_.to_string() + " needs " + std::to_string(shape_.num_blocks()));
  for (int i = 0; i < shape_.num_blocks(); ++i) {
    const Matrix& b = blocks_[static_cast<std::size_t>(i)];
    if (b.rows() != shape_.block_dim(i) || b.cols() != shape_.block_dim(i))
      throw ShapeError("block " + std::to_string(i) + " is not " +
                       std::to_string(shape_.block_dim(i)) + "x" +
                       std::to_string(shape_.block_dim(i)));
  }
}

Element Element::zero(const AlgebraShape& shape) {
  std::vector<Matrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(Matrix::Zero(d, d));
  return Element(shape, std::move(blocks));
}

Element Element::identity(const AlgebraShape& shape) { return scalar(shape, 1.0); }

Element Element::scalar(const AlgebraShape& shape, Complex c) {
  std::vector<Matrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(c * Matrix::Identity(d, d));
  return Element(shape, std::move(blocks));
}

Element Element::from_dense(const AlgebraShape& shape, const Matrix& dense, double tol) {
  const int n = shape.total_dim();
  if (dense.rows() != n || dense.cols() != n)
    throw ShapeError("dense matrix does not match total dimension of " + shape.to_string());
  std::vector<Matrix> blocks;
  Matrix residual = dense;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    int o = shape.offset(i), d = shape.block_dim(i);
    blocks.push_back(dense.block(o, o, d, d));
    residual.block(o, o, d, d).setZero();
  }
  double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
  if (residual.size() > 0 && residual.cwiseAbs().maxCoeff() > tol * scale)
    throw ShapeError("dense matrix is not block diagonal for shape " + shape.to_string());
  return Element(shape, std::move(blocks));
}

Element Element::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("matrix must be square");
  return Element(AlgebraShape::full(static_cast<int>(m.rows())), {m});
}

Matrix Element::to_dense() const {
  const int n = shape_.total_dim();
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < shape_.num_blocks(); ++i) {
    int o = shape_.offset(i), d = shape_.block_dim(i);
    out.block(o, o, d, d) = blocks_[static_cast<std::size_t>(i)];
  }
  return out;
}

Element Element::adjoint() const {
  std::vector<Matrix> blocks;
  for (const auto& b : blocks_) blocks.push_back(b.adjoint());
  return Element(shape_, std::move(blocks));
}

Element Element::hermitian_part() const {
  std::vector<Matrix> blocks;
  for (const auto& b : blocks_) blocks.push_back(0.5 * (b + b.adjoint()));
  return Element(shape_, std::move(blocks));
}

double Element::operator_norm() const {
  double n = 0.0;
  for (const auto& b : blocks_) n = std::max(n, block_norm(b));
  return n;
}

double Element::hermiticity_defect() const {
  double d = 0.0;
  for (const auto& b : blocks_) d = std::max(d, (b - b.adjoint()).cwiseAbs().maxCoeff());
  return d;
}

bool Element::is_hermitian(double tol) const {
  if (tol < 0) tol = 1e-10 * operator_norm();
  return hermiticity_defect() <= tol;
}

Complex Element::trace() const {
  Complex t = 0.0;
  for (const auto& b : blocks_) t += b.trace();
  return t;
}

Element& Element::operator+=(const Element& other) {
  require_same_shape(shape_, other.shape_, "add");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

Element& Element::operator-=(const Element& other) {
  require_same_shape(shape_, other.shape_, "subtract");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

Element& Element::operator*=(Complex c) {
  for (auto& b : blocks_) b *= c;
  return *this;
}

Element operator+(Element a, const Element& b) { return a += b; }
Element operator-(Element a, const Element& b) { return a -= b; }
Element operator-(Element a) { return a *= -1.0; }
Element operator*(Complex c, Element a) { return a *= c; }
Element operator*(Element a, Complex c) { return a *= c; }

Element operator*(const Element& a, const Element& b) {
  require_same_shape(a.shape(), b.shape(), "multiply");
  std::vector<Matrix> blocks;
  for (int i = 0; i < a.shape().num_blocks(); ++i) blocks.push_back(a.block(i) * b.block(i));
  return Element(a.shape(), std::move(blocks));
}

Element commutator(const Element& a, const Element& b) { return a * b - b * a; }
Element anticommutator(const Element& a, const Element& b) { return a * b + b * a; }
double operator_norm(const Element& a) { return a.operator_norm(); }

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Element kron(const Element& a, const Element& b) {
  std::vector<Matrix> blocks;
  for (const auto& x : a.blocks())
    for (const auto& y : b.blocks()) blocks.push_back(kron(x, y));
  return Element(tensor(a.shape(), b.shape()), std::move(blocks));
}

void require_hermitian(const Element& x, const char* where) {
  if (!x.is_hermitian())
    throw DomainError(std::string(where) + ": element is not Hermitian (defect " +
                      format_double(x.hermiticity_defect()) + ")");
}

void require_projection(const Element& p, const char* where, double tol) {
  if (p.hermiticity_defect() > tol)
    throw DomainError(std::string(where) + ": projection is not Hermitian");
  if ((p * p - p).operator_norm() > tol)
    throw DomainError(std::string(where) + ": element is not idempotent");
}

Element SpectralDecomposition::reconstruct() const {
  if (projections.empty()) throw ArgumentError("empty spectral decomposition");
  Element out = Element::zero(projections.front().shape());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) out += eigenvalues[i] * projections[i];
  return out;
}

namespace {

struct EigenEntry {
  double value;
  int block;
  int column;
};

// Polar correction: replaces U by U (U^dagger U)^{-1/2}, the nearest unitary.
Matrix polar_unitary(const Matrix& u) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(u.adjoint() * u);
  Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return u * (es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint());
}

}  // namespace

SpectralDecomposition spectral_decompose(const Element& input, const SpectralOptions& opts) {
  const double norm = input.operator_norm();
  const double herm_tol = opts.herm_tol >= 0 ? opts.herm_tol : 1e-10 * norm;
  if (!opts.symmetrize && input.hermiticity_defect() > herm_tol)
    throw DomainError("spectral_decompose: element is not Hermitian (defect " +
                      format_double(input.hermiticity_defect()) + ")");
  const Element x = input.hermitian_part();
  const double cluster_tol = opts.cluster_tol >= 0 ? opts.cluster_tol : 1e-8 * norm;
  const AlgebraShape& shape = x.shape();

  std::vector<Matrix> vectors;
  std::vector<EigenEntry> entries;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x.block(i));
    vectors.push_back(polar_unitary(es.eigenvectors()));
    for (int c = 0; c < shape.block_dim(i); ++c) entries.push_back({es.eigenvalues()(c), i, c});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const EigenEntry& a, const EigenEntry& b) { return a.value < b.value; });

  SpectralDecomposition out;
  std::size_t start = 0;
  while (start < entries.size()) {
    std::size_t end = start + 1;
    while (end < entries.size() && entries[end].value - entries[end - 1].value <= cluster_tol) ++end;
    double sum = 0.0;
    std::vector<Matrix> blocks;
    for (int d : shape.block_dims()) blocks.push_back(Matrix::Zero(d, d));
    for (std::size_t k = start; k < end; ++k) {
      const EigenEntry& e = entries[k];
      sum += e.value;
      const Matrix& v = vectors[static_cast<std::size_t>(e.block)];
      blocks[static_cast<std::size_t>(e.block)] += v.col(e.column) * v.col(e.column).adjoint();
    }
    out.eigenvalues.push_back(sum / static_cast<double>(end - start));
    out.projections.emplace_back(shape, std::move(blocks));
    start = end;
  }
  return out;
}

Element apply_function(const std::function<double(double)>& f, const Element& x,
                       const SpectralOptions& opts) {
  SpectralDecomposition sd = spectral_decompose(x, opts);
  Element out = Element::zero(x.shape());
  for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) out += f(sd.eigenvalues[i]) * sd.projections[i];
  return out;
}

Element band_projection(const Element& x, double lo, double hi, const SpectralOptions& opts) {
  if (lo > hi) throw ArgumentError("band_projection: lo must not exceed hi");
  SpectralDecomposition sd = spectral_decompose(x, opts);
  Element out = Element::zero(x.shape());
  for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i)
    if (sd.eigenvalues[i] >= lo && sd.eigenvalues[i] <= hi) out += sd.projections[i];
  return out;
}

std::vector<double> eigenvalues(const Element& x) {
  std::vector<double> out;
  for (const auto& b : x.blocks()) {
    Matrix h = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double min_eigenvalue(const Element& x) { return eigenvalues(x).front(); }
double max_eigenvalue(const Element& x) { return eigenvalues(x).back(); }

double trace_norm(const Element& x) {
  double s = 0.0;
  for (double v : eigenvalues(x)) s += std::abs(v);
  return s;
}

CenterDistance distance_to_center(const Element& x) {
  require_hermitian(x, "distance_to_center");
  const AlgebraShape& shape = x.shape();
  CenterDistance out{0.0, 0, Element::zero(shape)};
  Vector top, bottom;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    if (shape.block_dim(i) < 2) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(x.hermitian_part().block(i));
    const Eigen::Index last = es.eigenvalues().size() - 1;
    double r = 0.5 * (es.eigenvalues()(last) - es.eigenvalues()(0));
    if (r > out.distance) {
      out.distance = r;
      out.block = i;
      top = es.eigenvectors().col(last);
      bottom = es.eigenvectors().col(0);
    }
  }
  std::vector<Matrix> blocks;
  for (int d : shape.block_dims()) blocks.push_back(Matrix::Zero(d, d));
  if (out.distance > 0.0) {
    blocks[static_cast<std::size_t>(out.block)] = top * bottom.adjoint() + bottom * top.adjoint();
  } else {
    blocks[0] = Matrix::Identity(shape.block_dim(0), shape.block_dim(0));
  }
  out.witness = Element(shape, std::move(blocks));
  return out;
}

std::string to_text(const Element& e) { return dump_text(element_to_json(e)); }

Element element_from_text(const std::string& text) { return element_from_json(parse_text(text)); }

Element pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return Element::from_matrix(m);
}

Element pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return Element::from_matrix(m);
}

Element pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return Element::from_matrix(m);
}

Element spin_up_projection() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1;
  return Element::from_matrix(m);
}

Element spin_down_projection() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 1;
  return Element::from_matrix(m);
}

}  // namespace qmlab
