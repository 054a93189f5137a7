#include "qmlab/maps.hpp"

#include <random>

#include "qmlab/text.hpp"

namespace qmlab {

namespace {

Element matrix_unit(const AlgebraShape& shape, int block, int a, int b) {
  Element e = Element::zero(shape);
  std::vector<Matrix> blocks = e.blocks();
  blocks[static_cast<std::size_t>(block)](a, b) = 1.0;
  return Element(shape, std::move(blocks));
}

Matrix unitality_residual(const std::vector<Matrix>& kraus, int n) {
  Matrix s = Matrix::Zero(n, n);
  for (const auto& k : kraus) s.noalias() += k.adjoint() * k;
  return s - Matrix::Identity(n, n);
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Places m (indexed in Kronecker order) into tensor-shape order.
Matrix permute(const Matrix& m, const std::vector<int>& row_perm, const std::vector<int>& col_perm) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out(row_perm[static_cast<std::size_t>(r)], col_perm[static_cast<std::size_t>(c)]) = m(r, c);
  return out;
}

std::vector<int> identity_perm(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  return p;
}

}  // namespace

CPMap::CPMap(AlgebraShape domain, AlgebraShape codomain, std::vector<Matrix> kraus, double tol)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw ShapeError("a CP map needs at least one Kraus operator");
  const int nb = domain_.total_dim(), na = codomain_.total_dim();
  for (const auto& k : kraus_)
    if (k.rows() != nb || k.cols() != na)
      throw ShapeError("Kraus operator must be " + std::to_string(nb) + "x" + std::to_string(na));
  double defect = max_abs(unitality_residual(kraus_, na));
  if (defect > tol)
    throw DomainError("Kraus operators are not unital (defect " + format_double(defect) + ")");
  // A fixed-seed block-diagonal probe must be mapped into the codomain blocks.
  std::mt19937_64 gen(0x5eedULL);
  std::normal_distribution<double> g;
  std::vector<Matrix> probe_blocks;
  for (int d : domain_.block_dims()) {
    Matrix b(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) b(r, c) = Complex(g(gen), g(gen));
    probe_blocks.push_back(b);
  }
  Matrix probe = Element(domain_, probe_blocks).to_dense();
  Matrix out = Matrix::Zero(na, na);
  for (const auto& k : kraus_) out.noalias() += k.adjoint() * probe * k;
  Element::from_dense(codomain_, out, 1e-9);
}

CPMap CPMap::identity(const AlgebraShape& shape) {
  return CPMap(shape, shape, {Matrix::Identity(shape.total_dim(), shape.total_dim())});
}

CPMap CPMap::conjugation(const Element& u) {
  Matrix d = u.to_dense();
  double defect = max_abs(d.adjoint() * d - Matrix::Identity(d.rows(), d.cols()));
  if (defect > 1e-10) throw DomainError("conjugation needs a unitary (defect " + format_double(defect) + ")");
  return CPMap(u.shape(), u.shape(), {d});
}

Element CPMap::apply(const Element& b) const {
  require_same_shape(domain_, b.shape(), "apply_heisenberg");
  std::vector<Matrix> out;
  for (int j = 0; j < codomain_.num_blocks(); ++j) {
    const int oj = codomain_.offset(j), mj = codomain_.block_dim(j);
    Matrix acc = Matrix::Zero(mj, mj);
    for (const auto& k : kraus_) {
      for (int i = 0; i < domain_.num_blocks(); ++i) {
        const auto piece = k.block(domain_.offset(i), oj, domain_.block_dim(i), mj);
        acc.noalias() += piece.adjoint() * b.block(i) * piece;
      }
    }
    out.push_back(std::move(acc));
  }
  return Element(codomain_, std::move(out));
}

Element CPMap::dual_linear(const Element& d) const {
  require_same_shape(codomain_, d.shape(), "dual_apply");
  std::vector<Matrix> out;
  for (int i = 0; i < domain_.num_blocks(); ++i) {
    const int oi = domain_.offset(i), ni = domain_.block_dim(i);
    Matrix acc = Matrix::Zero(ni, ni);
    for (const auto& k : kraus_) {
      for (int j = 0; j < codomain_.num_blocks(); ++j) {
        const auto piece = k.block(oi, codomain_.offset(j), ni, codomain_.block_dim(j));
        acc.noalias() += piece * d.block(j) * piece.adjoint();
      }
    }
    out.push_back(std::move(acc));
  }
  return Element(domain_, std::move(out));
}

State CPMap::dual(const State& rho) const { return State(dual_linear(rho.density()), 1e-9); }

double CPMap::unitality_defect() const {
  return unitality_residual(kraus_, codomain_.total_dim()).norm();
}

Element apply_heisenberg(const CPMap& m, const Element& b) { return m.apply(b); }
State dual_apply(const CPMap& m, const State& rho) { return m.dual(rho); }

LinearMap::LinearMap(AlgebraShape domain, AlgebraShape codomain,
                     std::function<Element(const Element&)> fn)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), fn_(std::move(fn)) {}

LinearMap LinearMap::from_cpmap(const CPMap& m) {
  return LinearMap(m.domain(), m.codomain(), [m](const Element& b) { return m.apply(b); });
}

LinearMap LinearMap::from_table(const AlgebraShape& domain, const AlgebraShape& codomain,
                                std::vector<Element> images) {
  std::size_t expected = 0;
  for (int d : domain.block_dims()) expected += static_cast<std::size_t>(d * d);
  if (images.size() != expected) throw ShapeError("linear map table needs one image per matrix unit");
  for (const auto& e : images) require_same_shape(codomain, e.shape(), "linear map table");
  auto fn = [domain, codomain, images = std::move(images)](const Element& b) {
    Element out = Element::zero(codomain);
    std::size_t k = 0;
    for (int i = 0; i < domain.num_blocks(); ++i)
      for (int r = 0; r < domain.block_dim(i); ++r)
        for (int c = 0; c < domain.block_dim(i); ++c, ++k) out += b.block(i)(r, c) * images[k];
    return out;
  };
  return LinearMap(domain, codomain, fn);
}

LinearMap LinearMap::transpose(const AlgebraShape& shape) {
  std::vector<Element> images;
  for (int i = 0; i < shape.num_blocks(); ++i)
    for (int r = 0; r < shape.block_dim(i); ++r)
      for (int c = 0; c < shape.block_dim(i); ++c) images.push_back(matrix_unit(shape, i, c, r));
  return from_table(shape, shape, std::move(images));
}

Element LinearMap::operator()(const Element& b) const {
  require_same_shape(domain_, b.shape(), "linear map");
  Element out = fn_(b);
  require_same_shape(codomain_, out.shape(), "linear map image");
  return out;
}

std::vector<Matrix> choi_blocks(const LinearMap& m) {
  const int na = m.codomain().total_dim();
  std::vector<Matrix> out;
  for (int i = 0; i < m.domain().num_blocks(); ++i) {
    const int ni = m.domain().block_dim(i);
    Matrix c = Matrix::Zero(ni * na, ni * na);
    for (int a = 0; a < ni; ++a)
      for (int b = 0; b < ni; ++b)
        c.block(a * na, b * na, na, na) = m(matrix_unit(m.domain(), i, a, b)).to_dense();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Matrix> choi_blocks(const CPMap& m) { return choi_blocks(LinearMap::from_cpmap(m)); }

std::string choi_digest(const CPMap& m) {
  Json j = Json::array();
  for (const auto& c : choi_blocks(m)) j.push_back(matrix_to_json(c));
  return hex64(fnv1a(dump_text(j)));
}

double choi_distance(const CPMap& a, const CPMap& b) {
  if (!(a.domain() == b.domain()) || !(a.codomain() == b.codomain())) return INFINITY;
  auto ca = choi_blocks(a), cb = choi_blocks(b);
  double d = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i)
    d = std::max(d, Element::from_matrix(ca[i] - cb[i]).operator_norm());
  return d;
}

bool maps_equal(const CPMap& a, const CPMap& b, double tol) { return choi_distance(a, b) <= tol; }

CPVerdict is_completely_positive(const LinearMap& m, double tol) {
  CPVerdict v;
  v.min_choi_eigenvalue = INFINITY;
  for (const auto& c : choi_blocks(m))
    v.min_choi_eigenvalue = std::min(v.min_choi_eigenvalue, min_eigenvalue(Element::from_matrix(c)));
  v.unitality_defect =
      (m(Element::identity(m.domain())) - Element::identity(m.codomain())).operator_norm();
  v.positive = v.min_choi_eigenvalue >= -tol && v.unitality_defect <= tol;
  return v;
}

CPVerdict is_completely_positive(const CPMap& m, double tol) {
  return is_completely_positive(LinearMap::from_cpmap(m), tol);
}

CPMap tensor_with_identity(int n, const CPMap& m) {
  if (n < 1) throw ArgumentError("tensor_with_identity needs n >= 1");
  AlgebraShape mn = AlgebraShape::full(n);
  auto row_perm = tensor_permutation(mn, m.domain());
  auto col_perm = tensor_permutation(mn, m.codomain());
  std::vector<Matrix> kraus;
  for (const auto& k : m.kraus())
    kraus.push_back(permute(kron(Matrix::Identity(n, n), k), row_perm, col_perm));
  return CPMap(tensor(mn, m.domain()), tensor(mn, m.codomain()), std::move(kraus));
}

CPMap compose(const CPMap& first, const CPMap& second) {
  require_same_shape(second.codomain(), first.domain(), "compose");
  std::vector<Matrix> kraus;
  for (const auto& l : second.kraus())
    for (const auto& k : first.kraus()) kraus.push_back(l * k);
  return CPMap(second.domain(), first.codomain(), std::move(kraus));
}

Element embed_system(const Element& a, const AlgebraShape& apparatus) {
  return kron(a, Element::identity(apparatus));
}

Element embed_apparatus(const AlgebraShape& system, const Element& b) {
  return kron(Element::identity(system), b);
}

Element partial_trace_apparatus(const Element& d, const AlgebraShape& system,
                                const AlgebraShape& apparatus) {
  require_same_shape(tensor(system, apparatus), d.shape(), "partial_trace_apparatus");
  std::vector<Matrix> out;
  for (int i = 0; i < system.num_blocks(); ++i) {
    const int ai = system.block_dim(i);
    Matrix acc = Matrix::Zero(ai, ai);
    for (int j = 0; j < apparatus.num_blocks(); ++j) {
      const int bj = apparatus.block_dim(j);
      const Matrix& blk = d.block(i * apparatus.num_blocks() + j);
      for (int a = 0; a < ai; ++a)
        for (int a2 = 0; a2 < ai; ++a2)
          for (int b = 0; b < bj; ++b) acc(a, a2) += blk(a * bj + b, a2 * bj + b);
    }
    out.push_back(std::move(acc));
  }
  return Element(system, std::move(out));
}

Element partial_trace_system(const Element& d, const AlgebraShape& system,
                             const AlgebraShape& apparatus) {
  require_same_shape(tensor(system, apparatus), d.shape(), "partial_trace_system");
  std::vector<Matrix> out;
  for (int j = 0; j < apparatus.num_blocks(); ++j) {
    const int bj = apparatus.block_dim(j);
    Matrix acc = Matrix::Zero(bj, bj);
    for (int i = 0; i < system.num_blocks(); ++i) {
      const Matrix& blk = d.block(i * apparatus.num_blocks() + j);
      for (int a = 0; a < system.block_dim(i); ++a)
        for (int b = 0; b < bj; ++b)
          for (int b2 = 0; b2 < bj; ++b2) acc(b, b2) += blk(a * bj + b, a * bj + b2);
    }
    out.push_back(std::move(acc));
  }
  return Element(apparatus, std::move(out));
}

Vector kron_vector(const Vector& a, const Vector& b, const AlgebraShape& s, const AlgebraShape& t) {
  if (a.size() != s.total_dim() || b.size() != t.total_dim())
    throw ShapeError("kron_vector: vector length does not match its shape");
  auto perm = tensor_permutation(s, t);
  Vector out = Vector::Zero(a.size() * b.size());
  for (Eigen::Index x = 0; x < a.size(); ++x)
    for (Eigen::Index y = 0; y < b.size(); ++y)
      out(perm[static_cast<std::size_t>(x * b.size() + y)]) = a(x) * b(y);
  return out;
}

DilatedMap dilated_measurement(const Element& u, const State& tau, const AlgebraShape& system) {
  const AlgebraShape& apparatus = tau.shape();
  const AlgebraShape joint = tensor(system, apparatus);
  require_same_shape(joint, u.shape(), "dilated_measurement");
  Matrix ud = u.to_dense();
  double defect = max_abs(ud.adjoint() * ud - Matrix::Identity(ud.rows(), ud.cols()));
  if (defect > 1e-10)
    throw DomainError("dilation unitary is not unitary (defect " + format_double(defect) + ")");

  auto row_perm = tensor_permutation(system, apparatus);
  auto col_perm = identity_perm(system.total_dim());
  const int nb = apparatus.total_dim();
  std::vector<Matrix> kraus;
  const double cutoff = 1e-14 * tau.density().operator_norm();
  for (int j = 0; j < apparatus.num_blocks(); ++j) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(tau.density().block(j));
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
      double p = es.eigenvalues()(c);
      if (p <= cutoff) continue;
      Vector f = Vector::Zero(nb);
      f.segment(apparatus.offset(j), apparatus.block_dim(j)) = es.eigenvectors().col(c);
      Matrix isometry = permute(kron(Matrix::Identity(system.total_dim(), system.total_dim()), Matrix(f)),
                                row_perm, col_perm);
      kraus.push_back(std::sqrt(p) * ud * isometry);
    }
  }
  CPMap map(joint, system, std::move(kraus), 1e-9);
  return DilatedMap{system, apparatus, u, tau, std::move(map)};
}

Json cpmap_to_json(const CPMap& m) {
  Json j;
  j["domain_shape"] = shape_to_json(m.domain());
  j["codomain_shape"] = shape_to_json(m.codomain());
  Json ks = Json::array();
  for (const auto& k : m.kraus()) ks.push_back(matrix_to_json(k));
  j["kraus"] = ks;
  return j;
}

CPMap cpmap_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("domain_shape") || !j.contains("codomain_shape") ||
      !j.contains("kraus"))
    throw ConfigError("CP map record needs domain_shape, codomain_shape and kraus");
  AlgebraShape dom = shape_from_json(j["domain_shape"]);
  AlgebraShape cod = shape_from_json(j["codomain_shape"]);
  std::vector<Matrix> kraus;
  for (const auto& k : j["kraus"]) kraus.push_back(matrix_from_json(k, dom.total_dim(), cod.total_dim()));
  return CPMap(dom, cod, std::move(kraus));
}

std::string to_text(const CPMap& m) { return dump_text(cpmap_to_json(m)); }

CPMap cpmap_from_text(const std::string& text) { return cpmap_from_json(parse_text(text)); }

}  // namespace qmlab
