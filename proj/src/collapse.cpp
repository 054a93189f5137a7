#include "qmlab/collapse.hpp"

#include <algorithm>
#include <cmath>

#include "qmlab/cp_calculus.hpp"
#include "qmlab/rng.hpp"

namespace qmlab {

namespace {

double rel(double norm) { return std::max(1.0, norm); }

// Keeps the diagonal blocks of a dense operator; off-block coherences are
// invisible to states of the algebra.
Element block_part(const AlgebraShape& shape, const Matrix& dense) {
  std::vector<Matrix> blocks;
  for (int i = 0; i < shape.num_blocks(); ++i)
    blocks.push_back(dense.block(shape.offset(i), shape.offset(i), shape.block_dim(i), shape.block_dim(i)));
  return Element(shape, std::move(blocks));
}

Complex pair(const Element& density, const Element& a) { return (density * a).trace(); }

Vector require_vector(const State& s, const char* where) {
  auto v = s.vector();
  if (!v) throw DomainError(std::string(where) + " needs vector (rank-one) states");
  return *v;
}

struct Moments {
  double mean;
  double sigma;
};

// sigma^2 = tr((Y - m) rho (Y - m)) = ||(Y - m) rho^{1/2}||_F^2, a sum of
// squares that stays accurate when the variance is at rounding level.
Moments moments(const Element& density, const Element& y) {
  const double m = pair(density, y).real();
  double var = 0.0;
  for (int i = 0; i < density.shape().num_blocks(); ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (density.block(i) + density.block(i).adjoint()));
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix centered = y.block(i) - m * Matrix::Identity(y.block(i).rows(), y.block(i).cols());
    var += (centered * es.eigenvectors() * w.cast<Complex>().asDiagonal()).squaredNorm();
  }
  return {m, std::sqrt(var)};
}

}  // namespace

BoundReport coherence_bound(const State& phi1, const State& phi2, const Element& y, const Element& a,
                            double gap_threshold) {
  require_same_shape(phi1.shape(), phi2.shape(), "coherence_bound");
  require_same_shape(phi1.shape(), y.shape(), "coherence_bound");
  require_same_shape(phi1.shape(), a.shape(), "coherence_bound");
  require_hermitian(y, "coherence_bound");
  require_hermitian(a, "coherence_bound");
  const Vector v1 = require_vector(phi1, "coherence_bound");
  const Vector v2 = require_vector(phi2, "coherence_bound");
  const Moments m1 = moments(phi1.density(), y), m2 = moments(phi2.density(), y);
  const double gap = std::abs(m1.mean - m2.mean);
  if (gap <= gap_threshold)
    throw DegenerateGapError("coherence_bound: |y1 - y2| = " + format_double(gap) +
                             " is below the gap threshold");
  const double na = a.operator_norm();
  const double delta = na > 0.0 ? commutator(a, y).operator_norm() / na : 0.0;
  const double lhs = std::abs(v1.dot(a.to_dense() * v2));
  BoundReport r = make_bound("vectorredux", lhs, (delta + m1.sigma + m2.sigma) / gap * na, na, 1e-8);
  r.aux["delta"] = delta;
  r.aux["sigma1"] = m1.sigma;
  r.aux["sigma2"] = m2.sigma;
  r.aux["gap"] = gap;
  r.digest = instance_digest({to_text(phi1), to_text(phi2), to_text(y), to_text(a)});
  return r;
}

BoundReport collapse_gap(const DilatedMap& m, const State& psi1, const State& psi2,
                         std::complex<double> alpha, std::complex<double> beta, const Element& y,
                         const Element& a, double gap_threshold) {
  const CPMap& map = m.map;
  require_same_shape(map.codomain(), psi1.shape(), "collapse_gap");
  require_same_shape(map.codomain(), psi2.shape(), "collapse_gap");
  require_same_shape(map.domain(), y.shape(), "collapse_gap");
  require_same_shape(map.domain(), a.shape(), "collapse_gap");
  require_hermitian(y, "collapse_gap");
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > 1e-10)
    throw ArgumentError("collapse_gap needs |alpha|^2 + |beta|^2 = 1, got " + format_double(norm));
  const Vector v1 = require_vector(psi1, "collapse_gap");
  const Vector v2 = require_vector(psi2, "collapse_gap");
  if (std::abs(v1.dot(v2)) > 1e-10) throw ArgumentError("collapse_gap needs orthogonal vector states");

  const Element d1 = map.dual_linear(psi1.density());
  const Element d2 = map.dual_linear(psi2.density());
  const Moments m1 = moments(d1, y), m2 = moments(d2, y);
  const double gap = std::abs(m1.mean - m2.mean);
  if (gap <= gap_threshold)
    throw DegenerateGapError("collapse_gap: |y1 - y2| = " + format_double(gap) +
                             " is below the gap threshold");

  const Matrix cross = alpha * std::conj(beta) * (v1 * v2.adjoint()) +
                       std::conj(alpha) * beta * (v2 * v1.adjoint());
  const double lhs = std::abs(pair(map.dual_linear(block_part(map.codomain(), cross)), a));
  const double na = a.operator_norm();
  const double delta = na > 0.0 ? commutator(a, y).operator_norm() / na : 0.0;
  const double ratio = (delta + m1.sigma + m2.sigma) / gap;
  BoundReport r = make_bound("snarklop2", lhs, ratio * na, na, 1e-8);
  if (delta + m1.sigma + m2.sigma <= 1e-10 * rel(y.operator_norm())) r.proposition = "snarklop";
  r.aux["delta"] = delta;
  r.aux["sigma1"] = m1.sigma;
  r.aux["sigma2"] = m2.sigma;
  r.aux["gap"] = gap;
  r.digest = instance_digest({to_text(map), to_text(psi1), to_text(psi2), format_double(alpha.real()),
                              format_double(alpha.imag()), format_double(beta.real()),
                              format_double(beta.imag()), to_text(y), to_text(a)});
  return r;
}

double reduction_defect(const CPMap& m, const Element& p, const Element& q) {
  return (m.apply(q) - p).hermitian_part().operator_norm();
}

BoundReport reduction_gap_projection(const DilatedMap& m, const State& rho, const Element& p,
                                     const Element& q, double delta, std::uint64_t seed) {
  const CPMap& map = m.map;
  require_same_shape(map.codomain(), p.shape(), "reduction_gap_projection");
  require_same_shape(map.domain(), q.shape(), "reduction_gap_projection");
  require_projection(p, "reduction_gap_projection P");
  require_projection(q, "reduction_gap_projection Q");
  if (!(delta >= 0.0)) throw ArgumentError("Delta must be non-negative");
  const double certified = reduction_defect(map, p, q);
  if (delta < certified - 1e-12)
    throw PreconditionError("Delta = " + format_double(delta) + " is below the certified defect " +
                            format_double(certified));

  // Finite certification set: eigenvectors of P and seeded random pure states.
  const Element h = (map.apply(q) - p).hermitian_part();
  double finite = 0.0;
  for (int b = 0; b < p.shape().num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.block(b));
    for (Eigen::Index c = 0; c < es.eigenvectors().cols(); ++c) {
      const Vector v = es.eigenvectors().col(c);
      finite = std::max(finite, std::abs(v.dot(h.block(b) * v)));
    }
  }
  Rng rng(seed);
  for (int k = 0; k < 256; ++k) {
    const Vector v = random_block_vector(rng, p.shape());
    finite = std::max(finite, std::abs(v.dot(h.to_dense() * v)));
  }

  const State mrho = map.dual(rho);
  const double pq = mrho(q).real();
  const double lhs = state_distance(reduced_state(mrho, q), map.dual(reduced_state(rho, p)));
  const double sd = std::sqrt(delta);
  const double rhs = sd / pq * (1.0 + 2.0 * sd + std::sqrt(1.0 + (1.0 + 2.0 * sd) * (1.0 + 2.0 * sd)));
  BoundReport r = make_bound(delta <= 1e-12 ? "redrum" : "redrumdelta", lhs, rhs, 1.0, 1e-8);
  r.aux["delta"] = delta;
  r.aux["certified-delta"] = certified;
  r.aux["finite-set-delta"] = finite;
  r.aux["M*rho(Q)"] = pq;
  r.digest = instance_digest({to_text(map), to_text(rho), to_text(p), to_text(q), format_double(delta)});
  return r;
}

BoundReport perfect_reduction_check(const CPMap& m, const State& rho, const Element& x,
                                    const Element& y) {
  const double sigma = t_norm(m, y);
  if (sigma > 1e-10 * rel(y.operator_norm()))
    throw PreconditionError("perfect_reduction_check needs quality 0, got " + format_double(sigma) +
                            " (use the generalized reduction bound)");
  const double lhs = state_distance(reduced_state(m.dual(rho), y), m.dual(reduced_state(rho, x)));
  BoundReport r = make_bound("reduction", lhs, 0.0, 1.0, 1e-8);
  r.aux["sigma"] = sigma;
  r.digest = instance_digest({to_text(m), to_text(rho), to_text(x), to_text(y)});
  return r;
}

std::vector<Element> commutant_basis(const Element& y) {
  SpectralDecomposition sd = spectral_decompose(y);
  const AlgebraShape& shape = y.shape();
  std::vector<Element> out;
  for (const auto& proj : sd.projections) {
    for (int b = 0; b < shape.num_blocks(); ++b) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (proj.block(b) + proj.block(b).adjoint()));
      std::vector<Vector> range;
      for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c)
        if (es.eigenvalues()(c) > 0.5) range.push_back(es.eigenvectors().col(c));
      for (const auto& u : range) {
        for (const auto& v : range) {
          std::vector<Matrix> blocks;
          for (int d : shape.block_dims()) blocks.push_back(Matrix::Zero(d, d));
          blocks[static_cast<std::size_t>(b)] = u * v.adjoint();
          out.emplace_back(shape, std::move(blocks));
        }
      }
    }
  }
  return out;
}

BoundReport perfect_collapse_check(const CPMap& m, const State& rho, const Element& x,
                                   const Element& y,
                                   const std::optional<std::vector<Interval>>& partition) {
  const double sigma = t_norm(m, y);
  if (sigma > 1e-10 * rel(y.operator_norm()))
    throw PreconditionError("perfect_collapse_check needs quality 0, got " + format_double(sigma));
  const State collapsed = collapsed_state(rho, x, partition);
  const Element diff = m.dual_linear(rho.density() - collapsed.density());
  double worst = 0.0;
  const auto basis = commutant_basis(y);
  for (const auto& b : basis) worst = std::max(worst, std::abs(pair(diff, b)) / b.operator_norm());
  BoundReport r = make_bound("collapse", worst, 0.0, 1.0, 1e-8);
  r.aux["commutant-basis-size"] = static_cast<double>(basis.size());
  r.aux["sigma"] = sigma;
  r.digest = instance_digest({to_text(m), to_text(rho), to_text(x), to_text(y)});
  return r;
}

BoundReport heisenberg_collapse_band_bound(const MeasurementSetup& s, const Element& b, double x,
                                           double y, double eps) {
  require_same_shape(s.map().domain(), b.shape(), "heisenberg_collapse_band_bound");
  require_hermitian(b, "heisenberg_collapse_band_bound");
  if (!(eps >= 0.0)) throw ArgumentError("band width must be non-negative");
  if (std::abs(x - y) <= eps) return vacuous_bound("collapsedelta", "bands overlap: |x - y| <= eps");
  const double sigma = quality(s);
  const double nb = b.operator_norm();
  const double delta = nb > 0.0 ? commutator(s.pointer(), b).operator_norm() / nb : 0.0;
  const Element px = band_projection(s.measured(), x, x + eps);
  const Element py = band_projection(s.measured(), y, y + eps);
  const double lhs = (px * s.map().apply(b) * py).operator_norm();
  BoundReport r =
      make_bound("collapsedelta", lhs, (delta + 2.0 * sigma + eps) / std::abs(x - y) * nb, nb, 1e-8);
  r.aux["delta"] = delta;
  r.aux["sigma"] = sigma;
  r.digest = instance_digest({to_text(s), to_text(b), format_double(x), format_double(y), format_double(eps)});
  return r;
}

BoundReport almost_classical_band_bound(const Element& a, const Element& x, double xv, double yv,
                                        double eps) {
  require_same_shape(x.shape(), a.shape(), "almost_classical_band_bound");
  require_hermitian(x, "almost_classical_band_bound");
  if (!(eps >= 0.0)) throw ArgumentError("band width must be non-negative");
  if (std::abs(xv - yv) <= eps) return vacuous_bound("almost-classical", "bands overlap: |x - y| <= eps");
  const double d = distance_to_center(x).distance;
  const double na = a.operator_norm();
  const double lhs = (band_projection(x, xv, xv + eps) * a * band_projection(x, yv, yv + eps)).operator_norm();
  BoundReport r = make_bound("almost-classical", lhs, (eps + 2.0 * d) / std::abs(xv - yv) * na, na, 1e-8);
  r.aux["distance-to-center"] = d;
  r.digest = instance_digest({to_text(a), to_text(x), format_double(xv), format_double(yv), format_double(eps)});
  return r;
}

std::vector<BoundReport> generalized_reduction_bound(const MeasurementSetup& s, const State& rho) {
  const double sigma = quality(s);
  const Element& x = s.measured();
  const Element& y = s.pointer();
  const State mrho = s.map().dual(rho);
  const double yy = mrho(y * y).real();
  const double xx = rho(x * x).real();
  const std::string digest = instance_digest({to_text(s), to_text(rho)});
  std::vector<BoundReport> out;
  auto finish = [&](BoundReport r) {
    r.digest = digest;
    r.aux["sigma"] = sigma;
    out.push_back(std::move(r));
  };
  if (yy <= kDust || xx <= kDust) {
    for (const char* id : {"appred", "appred-var", "appred-proj"})
      finish(vacuous_bound(id, "reduction denominator below dust"));
    return out;
  }
  const double lhs = state_distance(reduced_state(mrho, y), s.map().dual(reduced_state(rho, x)));
  const double var_y = variance(mrho, y);
  const double num = std::max(0.0, var_y - variance(rho, x));
  auto rhs_of = [](double ratio) { return 2.0 * std::sqrt(ratio) * (1.0 + std::sqrt(ratio)); };

  BoundReport main = make_bound("appred", lhs, rhs_of(num / yy), 1.0, 1e-8);
  main.aux["ratio"] = num / yy;
  if (sigma <= 1e-10 * rel(y.operator_norm())) main.note = "perfect case: reduces to exact reduction";
  finish(main);

  if (var_y <= kDust) {
    finish(vacuous_bound("appred-var", "pointer variance below dust"));
  } else {
    BoundReport v = make_bound("appred-var", lhs, rhs_of(num / var_y), 1.0, 1e-8);
    v.aux["ratio"] = num / var_y;
    finish(v);
  }

  const bool projection = (y * y - y).operator_norm() <= 1e-10;
  if (!projection) {
    finish(vacuous_bound("appred-proj", "pointer is not a projection"));
  } else {
    const double p = mrho(y).real();
    const double pq = p * (1.0 - p);
    if (pq <= kDust) {
      finish(vacuous_bound("appred-proj", "outcome probability p(1 - p) below dust"));
    } else {
      const double t = sigma / std::sqrt(pq);
      BoundReport pr = make_bound("appred-proj", lhs, 2.0 * t * (1.0 + t), 1.0, 1e-8);
      pr.aux["p"] = p;
      finish(pr);
    }
  }
  for (auto& r : out) r.aux["lhs"] = r.vacuous ? 0.0 : lhs;
  return out;
}

CruxReport pointer_erasure_check(const CPMap& m, const Element& y1, const Element& y2,
                                 const Element& d, const Element& target, double tol1, double tol2) {
  require_same_shape(m.domain(), y1.shape(), "pointer_erasure_check");
  require_same_shape(m.domain(), y2.shape(), "pointer_erasure_check");
  require_same_shape(m.codomain(), d.shape(), "pointer_erasure_check");
  require_same_shape(m.codomain(), target.shape(), "pointer_erasure_check");
  CruxReport c;
  const double n1 = y1.operator_norm(), n2 = y2.operator_norm(), nd = d.operator_norm();
  const Element my1 = m.apply(y1);
  c.pointer_commutator = commutator(y1, y2).operator_norm();
  c.sigma2 = t_norm(m, y2);
  c.preservation_defect = (my1 - target).operator_norm();
  c.bias_defect = (m.apply(y2) - d).operator_norm();
  if (c.pointer_commutator > 1e-10 * rel(n1 * n2))
    c.failed_preconditions.push_back("pointers do not commute: ||[Y1,Y2]|| = " +
                                     format_double(c.pointer_commutator));
  if (c.sigma2 > tol2 * rel(n2))
    c.failed_preconditions.push_back("second pointer is not perfect: sigma2 = " + format_double(c.sigma2));
  if (c.preservation_defect > tol1 * rel(n1))
    c.failed_preconditions.push_back("first pointer is not preserved: ||M(Y1) - I(x)Y1|| = " +
                                     format_double(c.preservation_defect));
  if (c.bias_defect > 1e-10 * rel(nd))
    c.failed_preconditions.push_back("M does not measure D: ||M(Y2) - D|| = " + format_double(c.bias_defect));
  c.preconditions_hold = c.failed_preconditions.empty();

  const double lhs = commutator(d, target).operator_norm();
  const double rhs = c.pointer_commutator + 2.0 * n1 * c.sigma2 + 2.0 * my1.operator_norm() * c.bias_defect +
                     2.0 * c.preservation_defect * nd;
  c.bound = make_bound("crux", lhs, rhs, target.operator_norm() * nd, 1e-9);
  c.bound.aux["pointer-commutator"] = c.pointer_commutator;
  c.bound.aux["sigma2"] = c.sigma2;
  c.bound.aux["preservation-defect"] = c.preservation_defect;
  c.bound.aux["bias-defect"] = c.bias_defect;
  if (!c.preconditions_hold) {
    c.bound.note = "preconditions fail: ";
    for (std::size_t i = 0; i < c.failed_preconditions.size(); ++i)
      c.bound.note += (i ? "; " : "") + c.failed_preconditions[i];
  }
  c.bound.digest = instance_digest({to_text(m), to_text(y1), to_text(y2), to_text(d), to_text(target)});
  return c;
}

}  // namespace qmlab
