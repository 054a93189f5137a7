#include "qmlab/states.hpp"

#include <algorithm>
#include <cmath>

#include "qmlab/text.hpp"

namespace qmlab {

State::State(Element density, double tol) : density_(density.hermitian_part()) {
  if (density.hermiticity_defect() > tol)
    throw DomainError("state density is not Hermitian (defect " +
                      format_double(density.hermiticity_defect()) + ")");
  double lo = min_eigenvalue(density_);
  if (lo < -tol) throw DomainError("state density is not positive (min eigenvalue " + format_double(lo) + ")");
  double tr = density_.trace().real();
  if (std::abs(tr - 1.0) > tol) throw DomainError("state density has trace " + format_double(tr));
}

State State::maximally_mixed(const AlgebraShape& shape) {
  return State(Element::scalar(shape, 1.0 / shape.total_dim()));
}

State State::pure(const AlgebraShape& shape, const Vector& psi) {
  if (psi.size() != shape.total_dim()) throw ShapeError("vector length does not match the algebra");
  double n = psi.norm();
  if (n == 0.0) throw DomainError("zero vector has no vector state");
  std::vector<Matrix> blocks;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    Vector v = psi.segment(shape.offset(i), shape.block_dim(i)) / n;
    blocks.push_back(v * v.adjoint());
  }
  return State(Element(shape, std::move(blocks)));
}

Complex State::operator()(const Element& a) const {
  require_same_shape(shape(), a.shape(), "state evaluation");
  Complex s = 0.0;
  for (int i = 0; i < shape().num_blocks(); ++i)
    s += (density_.block(i) * a.block(i)).trace();
  return s;
}

std::optional<Vector> State::vector(double tol) const {
  const AlgebraShape& sh = shape();
  for (int i = 0; i < sh.num_blocks(); ++i) {
    if (density_.block(i).trace().real() < 1.0 - tol) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(density_.block(i));
    const Eigen::Index last = es.eigenvalues().size() - 1;
    if (es.eigenvalues()(last) < 1.0 - tol) return std::nullopt;
    Vector v = Vector::Zero(sh.total_dim());
    v.segment(sh.offset(i), sh.block_dim(i)) = es.eigenvectors().col(last);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      if (std::abs(v(k)) > 1e-12) {
        v *= std::conj(v(k)) / std::abs(v(k));
        break;
      }
    }
    return v;
  }
  return std::nullopt;
}

Complex expectation(const State& rho, const Element& a) { return rho(a); }

double variance(const State& rho, const Element& a) {
  require_hermitian(a, "variance");
  double m = rho(a).real();
  return rho(a * a).real() - m * m;
}

double covariance(const State& rho, const Element& a, const Element& b) {
  require_hermitian(a, "covariance");
  require_hermitian(b, "covariance");
  return 0.5 * rho(anticommutator(a, b)).real() - rho(a).real() * rho(b).real();
}

double ProbabilityTable::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

double ProbabilityTable::mean() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.value * e.probability;
  return s;
}

double JointProbabilityTable::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

namespace {

ProbabilityTable marginal(const JointProbabilityTable& t, bool first) {
  ProbabilityTable out;
  for (const auto& e : t.entries) {
    double v = first ? e.x : e.y;
    auto it = std::find_if(out.entries.begin(), out.entries.end(),
                           [&](const ProbabilityTable::Entry& m) { return m.value == v; });
    if (it == out.entries.end())
      out.entries.push_back({v, e.probability});
    else
      it->probability += e.probability;
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });
  return out;
}

}  // namespace

ProbabilityTable JointProbabilityTable::marginal_x() const { return marginal(*this, true); }
ProbabilityTable JointProbabilityTable::marginal_y() const { return marginal(*this, false); }

double JointProbabilityTable::at(double x, double y, double tol) const {
  double p = 0.0;
  for (const auto& e : entries)
    if (std::abs(e.x - x) <= tol && std::abs(e.y - y) <= tol) p += e.probability;
  return p;
}

ProbabilityTable induced_distribution(const State& rho, const Element& x) {
  require_hermitian(x, "induced_distribution");
  SpectralDecomposition sd = spectral_decompose(x);
  ProbabilityTable out;
  for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i)
    out.entries.push_back({sd.eigenvalues[i], rho(sd.projections[i]).real()});
  return out;
}

JointProbabilityTable joint_distribution(const State& rho, const Element& x, const Element& y) {
  require_hermitian(x, "joint_distribution");
  require_hermitian(y, "joint_distribution");
  double c = commutator(x, y).operator_norm();
  if (c > 1e-9 * x.operator_norm() * y.operator_norm())
    throw CommutationError("joint_distribution: observables do not commute (||[X,Y]|| = " +
                           format_double(c) + "); no joint distribution exists");
  SpectralDecomposition sx = spectral_decompose(x);
  SpectralDecomposition sy = spectral_decompose(y);
  JointProbabilityTable out;
  for (std::size_t i = 0; i < sx.eigenvalues.size(); ++i)
    for (std::size_t j = 0; j < sy.eigenvalues.size(); ++j)
      out.entries.push_back({sx.eigenvalues[i], sy.eigenvalues[j],
                             rho(sx.projections[i] * sy.projections[j]).real()});
  return out;
}

State reduced_state(const State& rho, const Element& y, double dust) {
  require_same_shape(rho.shape(), y.shape(), "reduced_state");
  double n = rho(y.adjoint() * y).real();
  if (n <= dust)
    throw UndefinedReductionError("reduced state undefined: rho(Y^dagger Y) = " + format_double(n));
  return State((1.0 / n) * (y * rho.density() * y.adjoint()), 1e-9);
}

State collapsed_state(const State& rho, const Element& x,
                      const std::optional<std::vector<Interval>>& partition) {
  require_same_shape(rho.shape(), x.shape(), "collapsed_state");
  SpectralDecomposition sd = spectral_decompose(x);
  std::vector<Element> cells;
  if (!partition) {
    cells = sd.projections;
  } else {
    const auto& parts = *partition;
    for (std::size_t a = 0; a < parts.size(); ++a) {
      if (parts[a].lo > parts[a].hi) throw ArgumentError("collapse interval has lo > hi");
      for (std::size_t b = a + 1; b < parts.size(); ++b)
        if (parts[a].lo <= parts[b].hi && parts[b].lo <= parts[a].hi)
          throw ArgumentError("collapse partition intervals overlap");
    }
    std::vector<bool> covered(sd.eigenvalues.size(), false);
    for (const auto& iv : parts) {
      Element p = Element::zero(x.shape());
      for (std::size_t k = 0; k < sd.eigenvalues.size(); ++k) {
        if (sd.eigenvalues[k] >= iv.lo && sd.eigenvalues[k] <= iv.hi) {
          p += sd.projections[k];
          covered[k] = true;
        }
      }
      cells.push_back(p);
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end())
      throw ArgumentError("collapse partition does not cover the spectrum");
  }
  Element d = Element::zero(x.shape());
  for (const auto& p : cells) d += p * rho.density() * p;
  return State(d, 1e-9);
}

double state_distance(const State& a, const State& b) {
  return trace_norm(a.density() - b.density());
}

std::string to_text(const State& s) {
  Json j;
  j["state"] = true;
  Json e = element_to_json(s.density());
  j["shape"] = e["shape"];
  j["blocks"] = e["blocks"];
  return dump_text(j);
}

State state_from_text(const std::string& text) {
  Json j = parse_text(text);
  if (!j.is_object() || !j.value("state", false))
    throw ConfigError("record is not marked as a state");
  return State(element_from_json(j));
}

Vector spin_up() {
  Vector v = Vector::Zero(2);
  v(0) = 1;
  return v;
}

Vector spin_down() {
  Vector v = Vector::Zero(2);
  v(1) = 1;
  return v;
}

}  // namespace qmlab
