#include "qmlab/cp_calculus.hpp"

#include <cmath>

namespace qmlab {

namespace {

// Rows i*dim(B) .. : X K_i - K_i T(X). Its Gram matrix is F_T(X, X), so
// F_T and the T-norm are obtained without squaring rounding errors.
Matrix kraus_residual(const CPMap& t, const Element& x) {
  require_same_shape(t.domain(), x.shape(), "cs_form");
  const Matrix xd = x.to_dense();
  const Matrix tx = t.apply(x).to_dense();
  const Eigen::Index nb = t.domain().total_dim(), na = t.codomain().total_dim();
  Matrix g(nb * static_cast<Eigen::Index>(t.kraus().size()), na);
  Eigen::Index row = 0;
  for (const auto& k : t.kraus()) {
    g.middleRows(row, nb).noalias() = xd * k - k * tx;
    row += nb;
  }
  return g;
}

}  // namespace

Element cs_form(const CPMap& t, const Element& a, const Element& b) {
  Matrix f = kraus_residual(t, a).adjoint() * kraus_residual(t, b);
  return Element::from_dense(t.codomain(), f, 1e-8);
}

Element psd_sqrt(const Element& p, double clip) {
  SpectralDecomposition sd = spectral_decompose(p, {.cluster_tol = 0.0, .symmetrize = true});
  if (!sd.eigenvalues.empty() && sd.eigenvalues.front() < -clip)
    throw DomainError("psd_sqrt: element has eigenvalue " + format_double(sd.eigenvalues.front()));
  Element out = Element::zero(p.shape());
  for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i)
    out += std::sqrt(std::max(0.0, sd.eigenvalues[i])) * sd.projections[i];
  return out;
}

double t_norm(const CPMap& t, const Element& b) {
  Matrix g = kraus_residual(t, b);
  if (g.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(g);
  return svd.singularValues()(0);
}

CPMap state_functional(const State& rho) {
  const AlgebraShape& shape = rho.shape();
  std::vector<Matrix> kraus;
  const double cutoff = 1e-14 * rho.density().operator_norm();
  for (int i = 0; i < shape.num_blocks(); ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.density().block(i));
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
      double p = es.eigenvalues()(c);
      if (p <= cutoff) continue;
      Matrix k = Matrix::Zero(shape.total_dim(), 1);
      k.block(shape.offset(i), 0, shape.block_dim(i), 1) = std::sqrt(p) * es.eigenvectors().col(c);
      kraus.push_back(k);
    }
  }
  return CPMap(shape, AlgebraShape::full(1), std::move(kraus), 1e-9);
}

BoundReport check_cs_inequality(const CPMap& t, const Element& a, const Element& b) {
  Element faa = cs_form(t, a, a);
  Element fab = cs_form(t, a, b);
  Element fba = cs_form(t, b, a);
  Element fbb = cs_form(t, b, b);
  const double nfbb = fbb.operator_norm();
  Element gap = nfbb * faa - fab * fba;
  const double na = a.operator_norm(), nb = b.operator_norm();

  BoundReport r;
  r.proposition = "cs";
  r.lhs = (fab * fba).operator_norm();
  r.rhs = nfbb * faa.operator_norm();
  r.slack = min_eigenvalue(gap);
  r.scale = na * na * nb * nb;
  r.tolerance = 1e-8;
  r.evaluate();
  const double fbb_min = min_eigenvalue(fbb);
  r.aux["min-eig-F(B,B)"] = fbb_min;
  if (fbb_min < -1e-9 * std::max(nb * nb, 1e-300)) {
    r.pass = false;
    r.note = "F(B,B) is not positive";
  }
  r.digest = instance_digest({to_text(t), to_text(a), to_text(b)});
  return r;
}

BoundReport covariance_inequality_check(const State& rho, const Element& a, const Element& b) {
  const double c = covariance(rho, a, b);
  const double na = a.operator_norm(), nb = b.operator_norm();
  BoundReport r = make_bound("covariance", c * c, variance(rho, a) * variance(rho, b),
                             na * na * nb * nb, 1e-9);
  r.digest = instance_digest({to_text(rho), to_text(a), to_text(b)});
  return r;
}

BoundReport heisenberg_uncertainty_check(const State& rho, const Element& a, const Element& b) {
  require_hermitian(a, "heisenberg_uncertainty_check");
  require_hermitian(b, "heisenberg_uncertainty_check");
  const double h = std::abs(rho(commutator(a, b)) / Complex(0.0, 2.0));
  const double na = a.operator_norm(), nb = b.operator_norm();
  BoundReport r = make_bound("heisenberg", h * h, variance(rho, a) * variance(rho, b),
                             na * na * nb * nb, 1e-9);
  r.digest = instance_digest({to_text(rho), to_text(a), to_text(b)});
  return r;
}

BoundReport almost_multiplication_bound(const CPMap& t, const Element& a, const Element& b) {
  const double tb = t_norm(t, b);
  const double na = a.operator_norm();
  BoundReport r = make_bound("almost-mult", cs_form(t, a, b).operator_norm(), na * tb,
                             na * b.operator_norm(), 1e-8);
  r.aux["t-norm(B)"] = tb;
  if (tb <= 1e-12) {
    const double defect = std::max(cs_form(t, a, b).operator_norm(), cs_form(t, b, a).operator_norm());
    r.aux["multiplication-defect"] = defect;
    if (defect > 1e-9 * std::max(1.0, r.scale)) {
      r.pass = false;
      r.note = "multiplication theorem violated";
    }
  }
  r.digest = instance_digest({to_text(t), to_text(a), to_text(b)});
  return r;
}

}  // namespace qmlab
