#include "qmlab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmlab/cp_calculus.hpp"
#include "qmlab/rng.hpp"

namespace qmlab {

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Element abelian_values(const std::vector<double>& v) {
  std::vector<Matrix> blocks;
  for (double x : v) blocks.push_back(Matrix::Constant(1, 1, x));
  return Element(AlgebraShape::abelian(static_cast<int>(v.size())), std::move(blocks));
}

void require_eps(double eps, const char* where) {
  if (!(eps >= 0.0 && eps < 0.5))
    throw ArgumentError(std::string(where) + ": eps must lie in [0, 1/2), got " + format_double(eps));
}

// Equality within tol, reported as lhs = |difference| against rhs = 0.
BoundReport equality(std::string id, double got, double want, double tol, std::string note = {}) {
  BoundReport r = make_bound(std::move(id), std::abs(got - want), 0.0, 1.0, tol);
  r.aux["computed"] = got;
  r.aux["expected"] = want;
  r.note = std::move(note);
  return r;
}

BoundReport verdict(std::string id, bool ok, std::string note) {
  BoundReport r = make_bound(std::move(id), ok ? 0.0 : 1.0, 0.0, 1.0, 0.0);
  r.note = std::move(note);
  return r;
}

double counterexample_gap(double eps) {
  const MeasurementSetup s = reduction_counterexample_setup(eps);
  const State rho = State::pure(AlgebraShape::full(2), spin_down());
  const State mrho = s.map().dual(rho);
  return 0.5 * state_distance(reduced_state(mrho, s.pointer()), s.map().dual(reduced_state(rho, s.measured())));
}

double hpdelta_bound(double d, double delta) {
  if (delta >= 1.0) return 0.0;
  return d * (1.0 - delta) / std::sqrt(3.0 * delta);
}

std::vector<double> grid_or(const ScenarioOptions& o, EpsGrid fallback) {
  return (o.eps ? *o.eps : fallback).values();
}

ScenarioResult example7_scenario(const ScenarioOptions& o) {
  ScenarioResult out;
  out.columns = {"eps", "sigma", "sigma-closed-form", "sigma-povm", "sigma-dilated"};
  for (double eps : grid_or(o, EpsGrid{})) {
    require_eps(eps, "example7");
    const MeasurementSetup s = example7_setup(eps);
    const double closed = example7_sigma(eps);
    const double sigma = quality(s);
    out.add(equality("example7-sigma", sigma, closed, 1e-9, "eps=" + format_double(eps)));

    const double c = 1.0 / (1.0 - 2.0 * eps);
    const MeasurementSetup povm = povm_measurement(
        {{c, Element::from_matrix(diag2(1.0 - eps, eps))}, {-c, Element::from_matrix(diag2(eps, 1.0 - eps))}});
    const double sigma_povm = quality(povm);
    BoundReport pr = equality("example7-povm", sigma_povm, closed, 1e-9, "eps=" + format_double(eps));
    pr.aux["measured-defect"] = (povm.measured() - pauli_z()).operator_norm();
    pr.pass = pr.pass && pr.aux["measured-defect"] <= 1e-12;
    out.add(pr);

    const DilatedMap dm = example7_dilation(eps);
    const DilatedSetup ds = dilated_setup(dm.unitary, dm.apparatus_state, dm.system, c * pauli_z());
    const double sigma_dil = quality(ds.setup);
    BoundReport dr = equality("example7-dilated", sigma_dil, closed, 1e-9, "eps=" + format_double(eps));
    dr.aux["measured-defect"] = (ds.setup.measured() - pauli_z()).operator_norm();
    dr.pass = dr.pass && dr.aux["measured-defect"] <= 1e-12;
    out.add(dr);

    const PerfectVerdict v = is_perfect(s);
    const bool expect = eps == 0.0;
    out.add(verdict("example7-perfect", v.perfect == expect && v.routes_agree,
                    std::string(v.perfect ? "perfect" : "not perfect") + " at eps=" + format_double(eps)));

    if (std::abs(eps - 0.1) < 1e-12) {
      const DisturbanceEstimate est =
          estimate_disturbance(s.map(), AlgebraShape::full(2), AlgebraShape::abelian(2), 64, o.seed);
      BoundReport r = equality("example7-disturbance", est.lower, example7_disturbance(eps), 1e-6,
                               "multi-start lower estimate against 1 - 2 sqrt(eps(1-eps))");
      r.pass = r.pass && est.lower <= example7_disturbance(eps) + 1e-12;
      out.add(r);
    }
    out.rows.push_back({eps, sigma, closed, sigma_povm, sigma_dil});
  }
  return out;
}

ScenarioResult hpdelta_curve_scenario(const ScenarioOptions& o) {
  ScenarioResult out;
  out.columns = {"eps", "sigma", "delta", "bound", "bound-closed-form"};
  for (double eps : grid_or(o, EpsGrid{})) {
    require_eps(eps, "hpdelta-curve");
    const MeasurementSetup s = example7_setup(eps);
    const double delta = example7_disturbance(eps);
    const double sigma = quality(s);
    const double d = distance_to_center(s.measured()).distance;
    double bound;
    if (delta < 1.0) {
      BoundReport r = heisenberg_principle_check(s, delta);
      r.note = "eps=" + format_double(eps);
      bound = r.lhs;
      out.add(r);
    } else {
      bound = 0.0;
      BoundReport r = make_bound("hpdelta", 0.0, sigma, 1.0, 1e-8);
      r.note = "eps=0: Delta = 1 and the bound is zero";
      out.add(r);
    }
    out.add(equality("hpdelta-closed-form", bound, example7_hpdelta_rhs(eps), 1e-9,
                     "d(X,Z)=" + format_double(d) + " eps=" + format_double(eps)));
    out.rows.push_back({eps, sigma, delta, bound, example7_hpdelta_rhs(eps)});
  }
  return out;
}

ScenarioResult counterexample_scenario(const ScenarioOptions& o) {
  ScenarioResult out;
  out.columns = {"eps", "gap", "one-minus-eps", "appred-rhs", "appred-var-ratio", "appred-var-rhs"};
  out.notes.push_back("gap is half the trace-norm distance of the two states");
  for (double eps : grid_or(o, EpsGrid{})) {
    require_eps(eps, "reduction-counterexample");
    if (eps == 0.0) {
      out.add(vacuous_bound("counterexample-gap", "eps=0: rho(X^2) = 0 so the reductions are undefined"));
      continue;
    }
    const double gap = counterexample_gap(eps);
    out.add(equality("counterexample-gap", gap, 1.0 - eps, 1e-12, "eps=" + format_double(eps)));
    const MeasurementSetup s = reduction_counterexample_setup(eps);
    const State rho = State::pure(AlgebraShape::full(2), spin_down());
    const std::vector<BoundReport> reps = generalized_reduction_bound(s, rho);
    for (const auto& r : reps) out.add(r);
    const double ratio = reps[1].vacuous ? 0.0 : reps[1].aux.at("ratio");
    out.add(equality("counterexample-variance-ratio", ratio, 1.0, 1e-12, "eps=" + format_double(eps)));
    out.rows.push_back({eps, gap, 1.0 - eps, reps[0].rhs, ratio, reps[1].rhs});
  }
  return out;
}

ScenarioResult cnot_scenario() {
  ScenarioResult out;
  ScenarioReport r = hepp_cnot_scenario();
  for (auto& item : r.items) out.add(item);
  CnotSetup c = cnot_setup();
  const StructureReport sr = structure_check(c.setup.map(), c.setup.pointer());
  for (const auto& item : sr.items) out.add(item);
  return out;
}

ScenarioResult two_bit(const ScenarioOptions& o) {
  ScenarioResult out;
  out.columns = {"state", "p-up", "P(+,+)", "P(-,-)", "P(+,-)", "P(-,+)", "reduction-distance"};
  const AlgebraShape m2 = AlgebraShape::full(2);
  Vector plus(2);
  plus << 1.0, 1.0;
  std::vector<State> states = {State::pure(m2, plus), State::pure(m2, spin_up())};
  Rng rng(o.seed);
  for (int i = 0; i < 100; ++i) states.push_back(random_state(rng, m2));
  double worst_off = 0.0, worst_diag = 0.0, worst_red = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const TwoBitReport t = two_bit_scenario(states[i]);
    const double p = states[i](spin_up_projection()).real();
    out.rows.push_back({static_cast<double>(i), p, t.table.at(1, 1), t.table.at(-1, -1), t.table.at(1, -1),
                        t.table.at(-1, 1), t.reduction.vacuous ? 0.0 : t.reduction.lhs});
    worst_off = std::max(worst_off, t.max_off_diagonal);
    worst_diag = std::max(worst_diag, t.diagonal_defect);
    if (!t.reduction.vacuous) worst_red = std::max(worst_red, t.reduction.lhs);
    if (i < 2) {
      BoundReport red = t.reduction;
      red.note = i == 0 ? "rho = |+x>" : "rho = psi+";
      out.add(red);
    }
  }
  BoundReport off = make_bound("two-bit-off-diagonal", worst_off, 0.0, 1.0, 1e-12);
  off.note = "max over 102 states";
  out.add(off);
  BoundReport diag = make_bound("two-bit-diagonal", worst_diag, 0.0, 1.0, 1e-12);
  diag.note = "max |P(+,+) - rho(P+)|, |P(-,-) - rho(P-)| over 102 states";
  out.add(diag);
  BoundReport red = make_bound("two-bit-reduction", worst_red, 0.0, 1.0, 1e-10);
  red.note = "max over 102 states";
  out.add(red);
  return out;
}

ScenarioResult davies_scenario(const ScenarioOptions& o) {
  ScenarioResult out;
  out.columns = {"n", "spacing", "kernel-variance", "interior-sigma2", "relative-error", "interior-bias",
                 "boundary-bias"};
  std::vector<int> sizes = o.grid ? std::vector<int>{*o.grid} : std::vector<int>{512, 1024, 2048};
  DaviesResult main;
  for (int n : sizes) {
    DaviesOptions opts;
    opts.n = n;
    const DaviesResult d = davies_study(opts);
    out.rows.push_back({static_cast<double>(n), d.spacing, d.kernel_variance, d.interior_sigma2,
                        d.relative_error, d.interior_bias, d.boundary_bias});
    main = d;
  }
  DaviesOptions defaults;
  BoundReport bias = make_bound("davies-unbiased", main.interior_bias, 0.0, defaults.half_width, 1e-9);
  bias.note = "central half of the grid; boundary rows carry bias " + format_double(main.boundary_bias);
  out.add(bias);
  BoundReport sig = make_bound("davies-sigma", main.relative_error, 1e-3, 1.0, 0.0);
  sig.aux["interior-sigma2"] = main.interior_sigma2;
  sig.aux["variance"] = main.target_variance;
  sig.note = "|sigma^2 - Var(f)| / Var(f) on n=" + std::to_string(main.n);
  out.add(sig);

  DaviesOptions small;
  small.n = 32;
  const DaviesResult ds = davies_study(small);
  const MeasurementSetup povm = davies_povm(small);
  const double sigma = t_norm(povm.map(), povm.pointer());
  out.add(equality("davies-povm-cross-check", sigma, std::sqrt(ds.full_sigma2), 1e-10,
                   "operator-sum route against the row-variance route on n=32"));
  return out;
}

ScenarioResult jm_pauli_scenario() {
  ScenarioResult out;
  out.columns = {"c", "sigma1", "sigma2", "2 sigma1 sigma2", "commutator"};
  const double tight = 1.0 / std::sqrt(2.0);
  for (double c : {0.3, 0.5, 0.6, tight}) {
    std::vector<std::pair<double, Element>> effects;
    std::vector<double> second;
    for (int s : {1, -1}) {
      for (int t : {1, -1}) {
        Element e = 0.25 * (Element::identity(AlgebraShape::full(2)) +
                            Complex(c * s) * pauli_x() + Complex(c * t) * pauli_y());
        effects.emplace_back(s / c, e);
        second.push_back(t / c);
      }
    }
    const MeasurementSetup setup = povm_measurement(effects);
    const Element y2 = abelian_values(second);
    BoundReport jm = joint_quality_bound(setup.map(), setup.pointer(), y2);
    jm.note = "c=" + format_double(c);
    out.add(jm);
    const double s1 = t_norm(setup.map(), setup.pointer()), s2 = t_norm(setup.map(), y2);
    out.add(equality("jm-pauli-sigma", s1, std::sqrt(1.0 / (c * c) - 1.0), 1e-9, "c=" + format_double(c)));
    const double target = std::max((setup.measured() - pauli_x()).operator_norm(),
                                   (setup.map().apply(y2) - pauli_y()).operator_norm());
    out.add(make_bound("jm-pauli-targets", target, 0.0, 1.0, 1e-12));
    if (c == tight) out.add(equality("jm-pauli-tight", 2.0 * s1 * s2, 2.0, 1e-9, "equality at c = 1/sqrt(2)"));
    out.rows.push_back({c, s1, s2, 2.0 * s1 * s2, jm.lhs});
  }
  bool rejected = false;
  try {
    const double c = 0.75;
    std::vector<std::pair<double, Element>> effects;
    for (int s : {1, -1})
      for (int t : {1, -1})
        effects.emplace_back(s / c, 0.25 * (Element::identity(AlgebraShape::full(2)) +
                                             Complex(c * s) * pauli_x() + Complex(c * t) * pauli_y()));
    povm_measurement(effects);
  } catch (const DomainError&) {
    rejected = true;
  }
  out.add(verdict("jm-pauli-infeasible", rejected, "c = 0.75 > 1/sqrt(2) gives non-positive effects"));
  return out;
}

// Unsharp two-outcome measurement of the Hermitian unitary d (eigenvalues +-1).
CPMap unsharp_measurement(const Element& d, double eps) {
  const Matrix dd = d.to_dense();
  const Eigen::Index n = dd.rows();
  const Matrix pp = 0.5 * (Matrix::Identity(n, n) + dd), pm = 0.5 * (Matrix::Identity(n, n) - dd);
  const Matrix x0 = std::sqrt(1.0 - eps) * pp + std::sqrt(eps) * pm;
  const Matrix x1 = std::sqrt(eps) * pp + std::sqrt(1.0 - eps) * pm;
  Matrix k0 = Matrix::Zero(2 * n, n), k1 = Matrix::Zero(2 * n, n);
  k0.topRows(n) = x0;
  k1.bottomRows(n) = x1;
  return CPMap(tensor(AlgebraShape::abelian(2), d.shape()), d.shape(), {k0, k1}, 1e-9);
}

ScenarioResult crux_scenario() {
  ScenarioResult out;
  const AlgebraShape m2 = AlgebraShape::full(2);
  const Element i2 = Element::identity(m2);
  const Element target = kron(i2, pauli_z());

  {
    const Element d = kron(pauli_x(), spin_up_projection()) + kron(pauli_y(), spin_down_projection());
    const MeasurementSetup vn = von_neumann_measurement(d);
    const int k = static_cast<int>(spectral_decompose(d).eigenvalues.size());
    const Element y1 = embed_apparatus(AlgebraShape::abelian(k), target);
    CruxReport cr = pointer_erasure_check(vn.map(), y1, vn.pointer(), d, target);
    BoundReport b = cr.bound;
    b.pass = b.pass && cr.preconditions_hold && b.lhs <= 1e-9 * b.scale;
    b.note = "exact construction: D commutes with I (x) Y1";
    out.add(b);
  }

  const Element cnot = kron(spin_up_projection(), i2) + kron(spin_down_projection(), pauli_x());
  const Element d = cnot * kron(pauli_x(), i2) * cnot.adjoint();
  out.notes.push_back("candidate D = CNOT (sigma_x (x) I) CNOT^dagger, ||[D, I (x) sigma_z]|| = " +
                      format_double(commutator(d, target).operator_norm()));
  auto candidate = [&](const std::string& name, const CPMap& m, const Element& y1, const Element& y2) {
    CruxReport cr = pointer_erasure_check(m, y1, y2, d, target);
    BoundReport b = cr.bound;
    b.proposition = "crux-candidate";
    std::string failed;
    for (const auto& f : cr.failed_preconditions) failed += (failed.empty() ? "" : ", ") + f;
    b.note = name + ": failed preconditions: " + (failed.empty() ? "none" : failed);
    b.pass = b.pass && !cr.preconditions_hold;
    b.aux["pointer-commutator"] = cr.pointer_commutator;
    b.aux["sigma2"] = cr.sigma2;
    b.aux["preservation-defect"] = cr.preservation_defect;
    b.aux["bias-defect"] = cr.bias_defect;
    out.add(b);
  };

  const MeasurementSetup vn = von_neumann_measurement(d);
  candidate("von-neumann", vn.map(), embed_apparatus(AlgebraShape::abelian(2), target), vn.pointer());

  candidate("identity-pointer", CPMap::identity(d.shape()), target, d);

  const CPMap unsharp = unsharp_measurement(d, 0.1);
  candidate("unsharp", unsharp, embed_apparatus(AlgebraShape::abelian(2), target),
            (1.0 / 0.8) * kron(abelian_values({1.0, -1.0}), Element::identity(d.shape())));

  const SpectralDecomposition sd = spectral_decompose(d);
  const Element u = kron(sd.projections[1], i2) + kron(sd.projections[0], pauli_x());
  const DilatedMap dm = dilated_measurement(u, State::pure(m2, spin_up()), d.shape());
  candidate("controlled-not", dm.map, embed_system(target, m2), embed_apparatus(d.shape(), pauli_z()));
  return out;
}

ScenarioResult local_heisenberg_scenario() {
  ScenarioResult out;
  const MeasurementSetup s = local_heisenberg_setup();
  BoundReport r = local_heisenberg_check(s, chain_spin('y'));
  out.add(r);
  out.add(equality("local-heisenberg-delta", 2.0 * r.lhs, 1.0, 1e-12, "delta = 2/N with N = 2"));
  return out;
}

}  // namespace

std::vector<double> EpsGrid::values() const {
  if (!(step > 0.0)) throw ArgumentError("eps grid step must be positive");
  if (stop < start) throw ArgumentError("eps grid end precedes its start");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

EpsGrid parse_eps_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ArgumentError("bad eps grid '" + text + "': expected a:b:step");
    }
  }
  if (parts.size() != 3) throw ArgumentError("bad eps grid '" + text + "': expected a:b:step");
  EpsGrid g{parts[0], parts[1], parts[2]};
  g.values();
  return g;
}

CPMap example7_map(double eps, const Matrix& w) {
  require_eps(eps, "example7_map");
  const Matrix x0 = w * diag2(std::sqrt(1.0 - eps), std::sqrt(eps)) * w.adjoint();
  const Matrix x1 = w * diag2(std::sqrt(eps), std::sqrt(1.0 - eps)) * w.adjoint();
  Matrix k0 = Matrix::Zero(4, 2), k1 = Matrix::Zero(4, 2);
  k0.topRows(2) = x0;
  k1.bottomRows(2) = x1;
  return CPMap(tensor(AlgebraShape::full(2), AlgebraShape::abelian(2)), AlgebraShape::full(2), {k0, k1}, 1e-9);
}

MeasurementSetup example7_setup(double eps, const Matrix& w) {
  CPMap m = example7_map(eps, w);
  const Element pointer =
      (1.0 / (1.0 - 2.0 * eps)) * embed_apparatus(AlgebraShape::full(2), abelian_values({1.0, -1.0}));
  const Element x = Element::from_matrix(w * pauli_z().block(0) * w.adjoint());
  return MeasurementSetup(std::move(m), x, pointer, AlgebraShape::abelian(2));
}

DilatedMap example7_dilation(double eps) {
  require_eps(eps, "example7_dilation");
  auto rotation = [](double a, double b) {
    Matrix r(2, 2);
    r << a, -b, b, a;
    return Element::from_matrix(r);
  };
  const double s = std::sqrt(eps), c = std::sqrt(1.0 - eps);
  const Element u = kron(spin_up_projection(), rotation(c, s)) + kron(spin_down_projection(), rotation(s, c));
  return dilated_measurement(u, State::pure(AlgebraShape::full(2), spin_up()), AlgebraShape::full(2));
}

double example7_sigma(double eps) { return 2.0 * std::sqrt(eps * (1.0 - eps)) / (1.0 - 2.0 * eps); }

double example7_disturbance(double eps) { return 1.0 - 2.0 * std::sqrt(eps * (1.0 - eps)); }

double example7_hpdelta_rhs(double eps) {
  const double r = std::sqrt(eps * (1.0 - eps));
  return 2.0 * std::sqrt(eps * (1.0 - eps) / (3.0 - 6.0 * r));
}

MeasurementSetup reduction_counterexample_setup(double eps) {
  CPMap m = example7_map(eps);
  const Element pointer = embed_apparatus(AlgebraShape::full(2), abelian_values({1.0, 0.0}));
  return MeasurementSetup(std::move(m), Element::from_matrix(diag2(1.0 - eps, eps)), pointer,
                          AlgebraShape::abelian(2));
}

Element chain_spin(char axis) {
  if (axis != 'x' && axis != 'y' && axis != 'z') throw ArgumentError("chain_spin: axis must be x, y or z");
  const Element s = axis == 'x' ? pauli_x() : axis == 'y' ? pauli_y() : pauli_z();
  const Element i2 = Element::identity(AlgebraShape::full(2));
  return 0.5 * (kron(s, i2) + kron(i2, s));
}

MeasurementSetup local_heisenberg_setup(double p, const Matrix& w) {
  if (!(p > 0.0 && p <= 0.5)) throw ArgumentError("local_heisenberg_setup: p must lie in (0, 1/2]");
  const Matrix sy = chain_spin('y').block(0), sx = chain_spin('x').block(0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sy);
  Vector ep = es.eigenvectors().col(3), em = es.eigenvectors().col(0);
  Vector e0 = sx * ep;
  e0 /= e0.norm();
  const Complex z = e0.dot(sx * em);
  em *= std::conj(z) / std::abs(z);
  Vector es_(4);
  es_ << 0.0, 1.0, -1.0, 0.0;
  es_ /= std::sqrt(2.0);
  const double r2 = std::sqrt(2.0);
  const Vector u = (ep + e0) / r2, u2 = (ep - e0) / r2, v = (em + e0) / r2, v2 = (em - e0) / r2;
  const double c = 1.0 / (r2 * p);
  const std::vector<Vector> wv = {std::sqrt(1.0 - p) * ep, std::sqrt(p) * u,  std::sqrt(p) * u2,
                                  std::sqrt(1.0 - p) * em, std::sqrt(p) * v,  std::sqrt(p) * v2,
                                  std::sqrt(1.0 - 2.0 * p) * e0, es_};
  const std::vector<Vector> tv = {ep, ep, ep, em, em, em, e0, e0};
  const std::vector<double> y = {0.0, c, -c, 0.0, c, -c, 0.0, 0.0};

  std::vector<Matrix> kraus;
  for (int k = 0; k < 8; ++k) {
    Matrix op = Matrix::Zero(32, 4);
    op.block(4 * k, 0, 4, 4) = (w * tv[static_cast<std::size_t>(k)]) * (w * wv[static_cast<std::size_t>(k)]).adjoint();
    kraus.push_back(std::move(op));
  }
  CPMap m(tensor(AlgebraShape::full(4), AlgebraShape::abelian(8)), AlgebraShape::full(4), std::move(kraus), 1e-9);
  const Element pointer = embed_apparatus(AlgebraShape::full(4), abelian_values(y));
  return MeasurementSetup(std::move(m), Element::from_matrix(w * sx * w.adjoint()), pointer,
                          AlgebraShape::abelian(8));
}

namespace {

// Row-normalized kernel weights of grid row i.
std::vector<double> kernel_row(const DaviesOptions& o, const std::vector<double>& x, int i) {
  std::vector<double> w(x.size());
  double z = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double t = (x[j] - x[static_cast<std::size_t>(i)]) / o.kernel_std;
    w[j] = std::exp(-0.5 * t * t);
    z += w[j];
  }
  for (double& v : w) v /= z;
  return w;
}

std::vector<double> grid_points(const DaviesOptions& o) {
  if (o.n < 2 || !(o.half_width > 0.0) || !(o.kernel_std > 0.0))
    throw ArgumentError("davies: need n >= 2 and positive half width and kernel width");
  std::vector<double> x(static_cast<std::size_t>(o.n));
  const double h = 2.0 * o.half_width / (o.n - 1);
  for (int i = 0; i < o.n; ++i) x[static_cast<std::size_t>(i)] = -o.half_width + i * h;
  return x;
}

}  // namespace

DaviesResult davies_study(const DaviesOptions& o) {
  const std::vector<double> x = grid_points(o);
  DaviesResult r;
  r.n = o.n;
  r.spacing = 2.0 * o.half_width / (o.n - 1);
  r.target_variance = o.kernel_std * o.kernel_std;
  for (int i = 0; i < o.n; ++i) {
    const std::vector<double> w = kernel_row(o, x, i);
    double mean = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) mean += w[j] * x[j];
    double var = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) var += w[j] * (x[j] - mean) * (x[j] - mean);
    const double bias = std::abs(mean - x[static_cast<std::size_t>(i)]);
    r.full_sigma2 = std::max(r.full_sigma2, var);
    r.boundary_bias = std::max(r.boundary_bias, bias);
    if (std::abs(x[static_cast<std::size_t>(i)]) <= 0.5 * o.half_width) {
      r.interior_sigma2 = std::max(r.interior_sigma2, var);
      r.interior_bias = std::max(r.interior_bias, bias);
    }
    if (i == o.n / 2) r.kernel_variance = var;
  }
  r.relative_error = std::abs(r.interior_sigma2 - r.target_variance) / r.target_variance;
  return r;
}

MeasurementSetup davies_povm(const DaviesOptions& o) {
  const std::vector<double> x = grid_points(o);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < o.n; ++i) rows.push_back(kernel_row(o, x, i));
  std::vector<std::pair<double, Element>> effects;
  for (int j = 0; j < o.n; ++j) {
    std::vector<double> col;
    for (int i = 0; i < o.n; ++i) col.push_back(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    effects.emplace_back(x[static_cast<std::size_t>(j)], abelian_values(col));
  }
  return povm_measurement(effects);
}

void ScenarioResult::add(BoundReport r) {
  pass = pass && r.pass;
  items.push_back(std::move(r));
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"cnot",   "two-bit",       "example7", "reduction-counterexample",
                                                 "davies", "hpdelta-curve", "jm-pauli", "crux",
                                                 "local-heisenberg"};
  return names;
}

ScenarioResult run_scenario(const std::string& name, const ScenarioOptions& opts) {
  ScenarioResult r;
  if (name == "cnot") r = cnot_scenario();
  else if (name == "two-bit") r = two_bit(opts);
  else if (name == "example7") r = example7_scenario(opts);
  else if (name == "reduction-counterexample") r = counterexample_scenario(opts);
  else if (name == "davies") r = davies_scenario(opts);
  else if (name == "hpdelta-curve") r = hpdelta_curve_scenario(opts);
  else if (name == "jm-pauli") r = jm_pauli_scenario();
  else if (name == "crux") r = crux_scenario();
  else if (name == "local-heisenberg") r = local_heisenberg_scenario();
  else throw ArgumentError("unknown scenario '" + name + "'");
  r.name = name;
  return r;
}

Json scenario_to_json(const ScenarioResult& r) {
  Json j;
  j["scenario"] = r.name;
  j["pass"] = r.pass;
  Json items = Json::array();
  for (const auto& item : r.items) items.push_back(report_to_json(item));
  j["items"] = items;
  if (!r.columns.empty()) {
    Json t;
    t["columns"] = r.columns;
    t["rows"] = r.rows;
    j["table"] = t;
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

std::string scenario_to_csv(const ScenarioResult& r) {
  std::ostringstream out;
  out << report_csv_header() << '\n';
  for (const auto& item : r.items) out << report_csv_row(item) << '\n';
  if (!r.columns.empty()) {
    out << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
    out << '\n';
    for (const auto& row : r.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
      out << '\n';
    }
  }
  return out.str();
}

std::vector<SigmaRow> sigma_curve(const std::vector<double>& eps) {
  for (double e : eps) require_eps(e, "sigma-curve");
  std::vector<SigmaRow> rows;
  const double d = distance_to_center(pauli_z()).distance;
  for (double e : eps) {
    SigmaRow row;
    row.eps = e;
    row.sigma = quality(example7_setup(e));
    row.closed_form = example7_sigma(e);
    row.hpdelta_rhs = hpdelta_bound(d, example7_disturbance(e));
    // At eps = 0 both reductions have zero denominators; the column carries the
    // one-sided limit, the reduced states being constant on (0, 1/2).
    row.reduction_gap = e == 0.0 ? 1.0 : counterexample_gap(e);
    rows.push_back(row);
  }
  return rows;
}

std::string sigma_curve_csv(const std::vector<SigmaRow>& rows) {
  std::ostringstream out;
  out << "eps,sigma,sigma_closed_form,hpdelta_rhs,reduction_gap\n";
  for (const auto& r : rows)
    out << format_double(r.eps) << ',' << format_double(r.sigma) << ',' << format_double(r.closed_form) << ','
        << format_double(r.hpdelta_rhs) << ',' << format_double(r.reduction_gap) << '\n';
  return out.str();
}

}  // namespace qmlab
