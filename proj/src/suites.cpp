#include "qmlab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "qmlab/collapse.hpp"
#include "qmlab/cp_calculus.hpp"
#include "qmlab/locality.hpp"
#include "qmlab/measurement.hpp"
#include "qmlab/parallel.hpp"
#include "qmlab/random.hpp"
#include "qmlab/rng.hpp"
#include "qmlab/scenarios.hpp"

namespace qmlab {

namespace {

using Reports = std::vector<BoundReport>;

double rel(double n) { return std::max(1.0, n); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p = 0.5) { return uniform(rng, 0.0, 1.0) < p; }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(v.size()) - 1))];
}

struct EigenPair {
  double value;
  Vector vec;  // full coordinates, supported on block `block`
  int block;
};

std::vector<EigenPair> eigenpairs(const Element& y) {
  std::vector<EigenPair> out;
  const AlgebraShape& s = y.shape();
  for (int b = 0; b < s.num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (y.block(b) + y.block(b).adjoint()));
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
      Vector v = Vector::Zero(s.total_dim());
      v.segment(s.offset(b), s.block_dim(b)) = es.eigenvectors().col(c);
      out.push_back({es.eigenvalues()(c), v, b});
    }
  }
  return out;
}

// Two eigenpairs whose values differ by more than min_gap.
std::optional<std::pair<EigenPair, EigenPair>> distinct_pair(Rng& rng, const Element& y, double min_gap = 1e-6) {
  const std::vector<EigenPair> ev = eigenpairs(y);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(ev.size()); ++i)
    for (int j = 0; j < static_cast<int>(ev.size()); ++j)
      if (i != j && std::abs(ev[static_cast<std::size_t>(i)].value - ev[static_cast<std::size_t>(j)].value) > min_gap)
        pairs.emplace_back(i, j);
  if (pairs.empty()) return std::nullopt;
  const auto [i, j] = pick(rng, pairs);
  return std::make_pair(ev[static_cast<std::size_t>(i)], ev[static_cast<std::size_t>(j)]);
}

// Random unit vector in the range of a projection, supported on one block.
Vector range_vector(Rng& rng, const Element& p) {
  std::vector<EigenPair> range;
  for (auto& e : eigenpairs(p))
    if (e.value > 0.5) range.push_back(e);
  if (range.empty()) throw DomainError("range_vector: zero projection");
  const int block = pick(rng, range).block;
  Vector out = Vector::Zero(p.shape().total_dim());
  std::normal_distribution<double> g;
  for (auto& e : range)
    if (e.block == block) out += Complex(g(rng), g(rng)) * e.vec;
  return out / out.norm();
}

// v plus a small random component inside the block of v.
Vector nudge(Rng& rng, const AlgebraShape& s, const EigenPair& e, double size) {
  Vector w = e.vec;
  w.segment(s.offset(e.block), s.block_dim(e.block)) += size * random_unit_vector(rng, s.block_dim(e.block));
  return w / w.norm();
}

Element random_commutant(Rng& rng, const Element& y) {
  std::normal_distribution<double> g;
  Element a = Element::zero(y.shape());
  for (const auto& b : commutant_basis(y)) a += Complex(g(rng), g(rng)) * b;
  a = a.hermitian_part();
  const double n = a.operator_norm();
  return n > 0.0 ? Complex(1.0 / n) * a : Element::identity(y.shape());
}

Vector orthogonal_partner(Rng& rng, const AlgebraShape& shape, const Vector& v) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vector w = random_block_vector(rng, shape);
    w -= v.dot(w) * v;
    if (w.norm() > 1e-3) return w / w.norm();
  }
  throw DomainError("orthogonal_partner: no orthogonal vector found");
}

std::pair<Complex, Complex> random_amplitudes(Rng& rng) {
  const double t = uniform(rng, 0.0, 1.0);
  return {std::polar(std::sqrt(t), uniform(rng, 0.0, 6.283185307179586)),
          std::polar(std::sqrt(1.0 - t), uniform(rng, 0.0, 6.283185307179586))};
}

struct Bands {
  double x;
  double y;
  double eps;
};

Bands random_bands(Rng& rng, double xv, double yv) {
  const double eps = uniform(rng, 0.0, 0.6) * std::abs(xv - yv);
  return {xv - uniform(rng, 0.0, 1.0) * eps, yv - uniform(rng, 0.0, 1.0) * eps, eps};
}

struct Ctx {
  Rng& rng;
  std::uint64_t seed;
  const SuiteConfig& cfg;

  const AlgebraShape& system() { return pick(rng, cfg.shapes); }
  const AlgebraShape& app() { return pick(rng, cfg.apparatus); }
  int outcomes(const AlgebraShape& s, int lo) { return uniform_int(rng, lo, std::min(s.total_dim(), 3)); }
};

Reports trial_cs(Ctx& c) {
  const AlgebraShape a = c.system(), b = c.system();
  const CPMap t = random_cpmap(b, a, uniform_int(c.rng, 1, 4), derive_seed(c.seed, 1));
  return {check_cs_inequality(t, random_element(c.rng, b), random_element(c.rng, b))};
}

Reports trial_cp(Ctx& c) {
  const AlgebraShape a = c.system(), b = c.system();
  const CPMap t = random_cpmap(b, a, uniform_int(c.rng, 1, 4), derive_seed(c.seed, 1));
  const CPVerdict v = is_completely_positive(t);
  BoundReport r = make_bound("random-cpmap", -v.min_choi_eigenvalue, 0.0, 1.0, 1e-9);
  r.aux["unitality-defect"] = v.unitality_defect;
  r.pass = r.pass && v.positive && v.unitality_defect <= 1e-10;
  r.digest = choi_digest(t);
  return {r};
}

State some_state(Ctx& c, const AlgebraShape& s) {
  return coin(c.rng, 0.3) ? random_pure_state(c.rng, s) : random_state(c.rng, s);
}

Reports trial_covariance(Ctx& c) {
  const AlgebraShape s = c.system();
  const State rho = some_state(c, s);
  return {covariance_inequality_check(rho, random_hermitian(c.rng, s), random_hermitian(c.rng, s))};
}

Reports trial_heisenberg(Ctx& c) {
  const AlgebraShape s = c.system();
  const State rho = some_state(c, s);
  return {heisenberg_uncertainty_check(rho, random_hermitian(c.rng, s), random_hermitian(c.rng, s))};
}

Reports trial_almost_mult(Ctx& c) {
  const AlgebraShape a = c.system();
  if (coin(c.rng, 0.3)) {
    const CPMap t = CPMap::conjugation(random_unitary(c.rng, a));
    return {almost_multiplication_bound(t, random_element(c.rng, a), random_element(c.rng, a))};
  }
  const AlgebraShape b = c.system();
  const CPMap t = random_cpmap(b, a, uniform_int(c.rng, 1, 4), derive_seed(c.seed, 1));
  return {almost_multiplication_bound(t, random_element(c.rng, b), random_element(c.rng, b))};
}

Reports trial_structure(Ctx& c) {
  const AlgebraShape s = c.system();
  if (coin(c.rng, 0.25)) {
    const CPMap t = CPMap::conjugation(random_unitary(c.rng, s));
    return structure_check(t, random_hermitian(c.rng, s), 1e-9, derive_seed(c.seed, 2)).items;
  }
  const PerfectSetup ps = random_perfect_setup(c.rng, s, c.outcomes(s, 1), uniform_int(c.rng, 1, 2));
  return structure_check(ps.dilated.setup.map(), ps.dilated.setup.pointer(), 1e-9, derive_seed(c.seed, 2)).items;
}

BoundReport perfect_verdict(const MeasurementSetup& s, bool expect, const std::string& id) {
  const PerfectVerdict v = is_perfect(s);
  BoundReport r = make_bound(id, v.perfect == expect && v.routes_agree ? 0.0 : 1.0, 0.0, 1.0, 0.0);
  r.aux["sigma"] = v.sigma;
  r.aux["max-projection-defect"] = v.max_projection_defect;
  r.note = std::string(v.perfect ? "perfect" : "not perfect") + (v.routes_agree ? "" : "; routes disagree");
  return r;
}

Reports trial_perfect(Ctx& c) {
  const AlgebraShape s = c.system();
  const PerfectSetup ps = random_perfect_setup(c.rng, s, c.outcomes(s, 1), uniform_int(c.rng, 1, 2));
  Reports out = {perfect_verdict(ps.dilated.setup, true, "perfect")};
  const DilatedSetup bent = perturb_setup(c.rng, ps.dilated, uniform(c.rng, 0.05, 0.5));
  if (ps.values.size() > 1) out.push_back(perfect_verdict(bent.setup, false, "perfect-negative"));
  return out;
}

Reports trial_jm(Ctx& c) {
  const AlgebraShape s = c.system();
  const bool perfect = coin(c.rng);
  const JointSetup js = random_joint_setup(c.rng, s, uniform_int(c.rng, 2, 3), uniform_int(c.rng, 2, 3), perfect);
  BoundReport r = joint_quality_bound(js.dilation.map, js.y1, js.y2);
  if (perfect) {
    r.aux["perfect-subfamily"] = 1.0;
    if (r.proposition != "jm" || r.lhs > 1e-9) {
      r.pass = false;
      r.note = "perfect subfamily: qualities must vanish and [X1, X2] = 0";
    }
  }
  return {r};
}

Reports trial_hpdelta(Ctx& c) {
  if (coin(c.rng, 0.2)) {
    // Identity dilation: nothing is disturbed and X = tau(Y) I is central.
    const AlgebraShape a = c.system(), b = c.app();
    const DilatedSetup ds = dilated_setup(Element::identity(tensor(a, b)), random_state(c.rng, b), a,
                                          random_hermitian(c.rng, b));
    return {heisenberg_principle_check(ds.setup, 0.0)};
  }
  const double eps = uniform(c.rng, 1e-3, 0.49);
  const MeasurementSetup s = example7_setup(eps, haar_unitary(c.rng, 2));
  const double delta = example7_disturbance(eps);
  BoundReport r = heisenberg_principle_check(s, delta);
  r.aux["eps"] = eps;
  const DisturbanceEstimate est =
      estimate_disturbance(s.map(), AlgebraShape::full(2), AlgebraShape::abelian(2), 4, derive_seed(c.seed, 3));
  BoundReport cert = make_bound("hpdelta-certificate", est.lower, delta, 1.0, 1e-9);
  cert.note = "sampled disturbance must not exceed the analytic Delta";
  return {r, cert};
}

Reports trial_local_heisenberg(Ctx& c) {
  const Matrix w = haar_unitary(c.rng, 4);
  const MeasurementSetup s = local_heisenberg_setup(uniform(c.rng, 0.05, 0.5), w);
  const Element a = coin(c.rng, 0.2) ? Element::identity(AlgebraShape::full(4))
                                     : Element::from_matrix(w * chain_spin('y').block(0) * w.adjoint());
  return {local_heisenberg_check(s, a)};
}

Reports trial_qn(Ctx& c) {
  const AlgebraShape s = c.system();
  Element x = random_hermitian(c.rng, s);
  if (coin(c.rng, 0.2)) {
    std::vector<Matrix> blocks;
    for (int d : s.block_dims()) blocks.push_back(uniform(c.rng, -1.0, 1.0) * Matrix::Identity(d, d));
    x = Element(s, std::move(blocks));
  }
  const CenterDistance cd = distance_to_center(x);
  double brute = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Element a = random_element(c.rng, s);
    brute = std::max(brute, commutator(x, a).operator_norm() / (2.0 * a.operator_norm()));
  }
  const double scale = rel(x.operator_norm());
  BoundReport r = make_bound("qn", brute, cd.distance, scale, 1e-9);
  const double w = commutator(x, cd.witness).operator_norm() / (2.0 * cd.witness.operator_norm());
  BoundReport wr = make_bound("qn-witness", std::abs(w - cd.distance), 0.0, scale, 1e-9);
  wr.aux["witness-ratio"] = w;
  return {r, wr};
}

Reports trial_vectorredux(Ctx& c) {
  const AlgebraShape s = c.system();
  const Element y = random_hermitian(c.rng, s);
  const int mode = uniform_int(c.rng, 0, 3);
  if (mode <= 1) {
    const State p1 = State::pure(s, random_block_vector(c.rng, s));
    const State p2 = State::pure(s, random_block_vector(c.rng, s));
    return {coherence_bound(p1, p2, y, random_hermitian(c.rng, s))};
  }
  const auto pr = distinct_pair(c.rng, y);
  if (!pr) return {vacuous_bound("vectorredux", "no distinct eigenvalues")};
  if (mode == 2) {
    const State p1 = State::pure(s, nudge(c.rng, s, pr->first, uniform(c.rng, 1e-4, 1e-2)));
    const State p2 = State::pure(s, nudge(c.rng, s, pr->second, uniform(c.rng, 1e-4, 1e-2)));
    const Element a = coin(c.rng) ? random_commutant(c.rng, y) + Complex(1e-3) * random_hermitian(c.rng, s)
                                  : random_hermitian(c.rng, s);
    return {coherence_bound(p1, p2, y, a.hermitian_part())};
  }
  const Element a = random_commutant(c.rng, y);
  BoundReport r = coherence_bound(State::pure(s, pr->first.vec), State::pure(s, pr->second.vec), y, a);
  BoundReport exact = make_bound("snarwak", r.lhs, 0.0, r.scale, 1e-9);
  exact.note = "eigenvectors of Y with A in its commutant";
  return {r, exact};
}

// A perfect setup, optionally perturbed, with two vectors from distinct outcome ranges.
struct CollapseInstance {
  DilatedSetup ds;
  Vector psi1;
  Vector psi2;
  bool perfect;
};

CollapseInstance collapse_instance(Ctx& c, int mode) {
  const AlgebraShape s = c.system();
  if (mode == 0) {
    DilatedSetup ds = random_dilated_setup(s, c.app(), derive_seed(c.seed, 1));
    const Vector v1 = random_block_vector(c.rng, s);
    const Vector v2 = coin(c.rng) ? orthogonal_partner(c.rng, s, v1) : random_block_vector(c.rng, s);
    const Vector w2 = v2 - v1.dot(v2) * v1;
    return {std::move(ds), v1, w2 / w2.norm(), false};
  }
  const PerfectSetup ps = random_perfect_setup(c.rng, s, c.outcomes(s, 2), uniform_int(c.rng, 1, 2));
  const int k1 = uniform_int(c.rng, 0, static_cast<int>(ps.values.size()) - 1);
  int k2 = uniform_int(c.rng, 0, static_cast<int>(ps.values.size()) - 2);
  if (k2 >= k1) ++k2;
  const Vector v1 = range_vector(c.rng, ps.projections[static_cast<std::size_t>(k1)]);
  const Vector v2 = range_vector(c.rng, ps.projections[static_cast<std::size_t>(k2)]);
  if (mode == 1) return {perturb_setup(c.rng, ps.dilated, std::pow(10.0, uniform(c.rng, -4.0, -1.0))), v1, v2, false};
  return {ps.dilated, v1, v2, true};
}

Reports trial_snarklop2(Ctx& c) {
  const int mode = uniform_int(c.rng, 0, 2);
  const CollapseInstance ci = collapse_instance(c, mode);
  const AlgebraShape& s = ci.ds.dilation.system;
  const auto [alpha, beta] = random_amplitudes(c.rng);
  const Element& y = ci.ds.setup.pointer();
  const Element a = mode == 0 ? random_hermitian(c.rng, y.shape()) : random_commutant(c.rng, y);
  BoundReport r = collapse_gap(ci.ds.dilation, State::pure(s, ci.psi1), State::pure(s, ci.psi2), alpha, beta, y, a);
  if (!ci.perfect) return {r};
  BoundReport exact = make_bound("snarklop", r.lhs, 0.0, r.scale, 1e-9);
  exact.note = "perfect dilation, eigenvectors of X, A in the commutant of the pointer";
  return {r, exact};
}

Reports trial_redrumdelta(Ctx& c) {
  const AlgebraShape s = c.system();
  const int mode = uniform_int(c.rng, 0, 2);
  const State rho = random_state(c.rng, s);
  if (mode == 0) {
    const AlgebraShape b = c.app();
    const DilatedSetup ds = random_dilated_setup(s, b, derive_seed(c.seed, 1));
    const Element p = random_projection(c.rng, s);
    const Element q = embed_apparatus(s, random_projection(c.rng, b));
    const double delta = reduction_defect(ds.dilation.map, p, q);
    return {reduction_gap_projection(ds.dilation, rho, p, q, delta, derive_seed(c.seed, 2))};
  }
  const PerfectSetup ps = random_perfect_setup(c.rng, s, c.outcomes(s, 1), uniform_int(c.rng, 1, 2));
  const int k = uniform_int(c.rng, 0, static_cast<int>(ps.values.size()) - 1);
  const Element& p = ps.projections[static_cast<std::size_t>(k)];
  const Element& q = ps.pointer_projections[static_cast<std::size_t>(k)];
  if (mode == 1) {
    const DilatedSetup bent = perturb_setup(c.rng, ps.dilated, std::pow(10.0, uniform(c.rng, -4.0, -1.0)));
    const double delta = reduction_defect(bent.dilation.map, p, q);
    return {reduction_gap_projection(bent.dilation, rho, p, q, delta, derive_seed(c.seed, 2))};
  }
  BoundReport r = reduction_gap_projection(ps.dilated.dilation, rho, p, q, 0.0, derive_seed(c.seed, 2));
  r.tolerance = 1e-9;
  r.evaluate();
  return {r};
}

Reports trial_reduction(Ctx& c) {
  const AlgebraShape s = c.system();
  const PerfectSetup ps = random_perfect_setup(c.rng, s, c.outcomes(s, 1), uniform_int(c.rng, 1, 2));
  const MeasurementSetup& m = ps.dilated.setup;
  const State rho = some_state(c, s);
  BoundReport r = perfect_reduction_check(m.map(), rho, m.measured(), m.pointer());
  r.tolerance = 1e-9;
  r.evaluate();
  return {r};
}

Reports trial_collapse(Ctx& c) {
  const AlgebraShape s = c.system();
  const PerfectSetup ps = random_perfect_setup(c.rng, s, c.outcomes(s, 1), uniform_int(c.rng, 1, 2));
  const MeasurementSetup& m = ps.dilated.setup;
  return {perfect_collapse_check(m.map(), some_state(c, s), m.measured(), m.pointer())};
}

Reports trial_collapsedelta(Ctx& c) {
  const int mode = uniform_int(c.rng, 0, 2);
  const AlgebraShape s = c.system();
  DilatedSetup ds = [&] {
    if (mode == 0) return random_dilated_setup(s, c.app(), derive_seed(c.seed, 1));
    const PerfectSetup ps = random_perfect_setup(c.rng, s, c.outcomes(s, 2), uniform_int(c.rng, 1, 2));
    if (mode == 1) return perturb_setup(c.rng, ps.dilated, std::pow(10.0, uniform(c.rng, -4.0, -1.0)));
    return ps.dilated;
  }();
  const Element& y = ds.setup.pointer();
  const Element b = mode == 0 ? random_hermitian(c.rng, y.shape()) : random_commutant(c.rng, y);
  const auto pr = distinct_pair(c.rng, ds.setup.measured());
  if (!pr) return {vacuous_bound("collapsedelta", "measured observable has one eigenvalue")};
  const Bands bands = random_bands(c.rng, pr->first.value, pr->second.value);
  return {heisenberg_collapse_band_bound(ds.setup, b, bands.x, bands.y, bands.eps)};
}

Reports trial_almost_classical(Ctx& c) {
  const AlgebraShape s = c.system();
  std::vector<Matrix> blocks;
  for (int d : s.block_dims()) blocks.push_back(uniform(c.rng, -1.0, 1.0) * Matrix::Identity(d, d));
  const Element central(s, std::move(blocks));
  const int mode = uniform_int(c.rng, 0, 2);
  const Element x = mode == 0   ? random_hermitian(c.rng, s)
                    : mode == 1 ? central
                                : central + Complex(std::pow(10.0, uniform(c.rng, -4.0, -1.0))) *
                                                random_hermitian(c.rng, s);
  const auto pr = distinct_pair(c.rng, x);
  if (!pr) return {vacuous_bound("almost-classical", "X has one eigenvalue")};
  const Bands bands = random_bands(c.rng, pr->first.value, pr->second.value);
  return {almost_classical_band_bound(random_element(c.rng, s), x, bands.x, bands.y, bands.eps)};
}

Reports trial_appred(Ctx& c) {
  const AlgebraShape s = c.system();
  const int mode = uniform_int(c.rng, 0, 2);
  const State rho = some_state(c, s);
  if (mode == 0) {
    const AlgebraShape b = c.app();
    const Element u = random_unitary(c.rng, tensor(s, b));
    const Element y = coin(c.rng) ? random_projection(c.rng, b) : random_hermitian(c.rng, b);
    const DilatedSetup ds = dilated_setup(u, random_state(c.rng, b), s, y);
    return generalized_reduction_bound(ds.setup, rho);
  }
  const PerfectSetup ps = random_perfect_setup(c.rng, s, c.outcomes(s, 1), uniform_int(c.rng, 1, 2));
  if (mode == 1) {
    const DilatedSetup bent = perturb_setup(c.rng, ps.dilated, std::pow(10.0, uniform(c.rng, -4.0, -1.0)));
    return generalized_reduction_bound(bent.setup, rho);
  }
  const MeasurementSetup& m = ps.dilated.setup;
  Reports out = generalized_reduction_bound(m, rho);
  BoundReport exact = perfect_reduction_check(m.map(), rho, m.measured(), m.pointer());
  exact.tolerance = 1e-9;
  exact.evaluate();
  out.push_back(exact);
  return out;
}

Reports trial_crux(Ctx& c) {
  const int m0 = uniform_int(c.rng, 2, 3), m1 = uniform_int(c.rng, 2, 3);
  const AlgebraShape f0 = AlgebraShape::full(m0), f1 = AlgebraShape::full(m1);
  const Element y1 = random_hermitian(c.rng, f1);
  Element d = Element::zero(AlgebraShape::full(m0 * m1));
  for (const auto& q : spectral_decompose(y1).projections) d += kron(random_hermitian(c.rng, f0), q);
  const Element target = kron(Element::identity(f0), y1);
  const bool exact = coin(c.rng, 0.7);
  if (!exact) d += Complex(std::pow(10.0, uniform(c.rng, -4.0, -1.0))) * random_hermitian(c.rng, d.shape());
  const MeasurementSetup vn = von_neumann_measurement(d);
  const int k = static_cast<int>(spectral_decompose(d).eigenvalues.size());
  CruxReport cr = pointer_erasure_check(vn.map(), embed_apparatus(AlgebraShape::abelian(k), target), vn.pointer(), d, target);
  BoundReport r = cr.bound;
  if (exact) {
    r.pass = r.pass && cr.preconditions_hold;
    if (!cr.preconditions_hold) r.note = "exact construction lost a precondition: " + r.note;
  }
  return {r};
}

Reports trial_corzel(Ctx& c) {
  const int n = uniform_int(c.rng, 2, 8);
  const LocalAlgebra chain = LocalAlgebra::uniform(n, 2);
  const AlgebraShape m2 = AlgebraShape::full(2);
  const bool near_eigen = coin(c.rng, 0.4);
  GlobalObservable g;
  if (near_eigen || coin(c.rng)) {
    g = spin_average(chain, near_eigen ? 'z' : "xyz"[uniform_int(c.rng, 0, 2)]);
  } else {
    std::vector<int> sites;
    for (int i = 0; i < n; ++i)
      if (coin(c.rng, 0.7)) sites.push_back(i);
    if (sites.empty()) sites.push_back(uniform_int(c.rng, 0, n - 1));
    std::vector<Matrix> terms;
    for (std::size_t i = 0; i < sites.size(); ++i) terms.push_back(random_hermitian(c.rng, m2).block(0));
    g = make_global(chain, sites, terms);
  }
  std::vector<Vector> f1, f2;
  for (int i = 0; i < n; ++i) {
    if (near_eigen) {
      const double t = uniform(c.rng, 0.0, 0.05);
      Vector u = spin_up() + t * random_unit_vector(c.rng, 2), d = spin_down() + t * random_unit_vector(c.rng, 2);
      f1.push_back(u / u.norm());
      f2.push_back(d / d.norm());
    } else {
      f1.push_back(random_unit_vector(c.rng, 2));
      f2.push_back(random_unit_vector(c.rng, 2));
    }
  }
  const ProductState p1 = make_product_state(chain, f1), p2 = make_product_state(chain, f2);
  const auto [alpha, beta] = random_amplitudes(c.rng);
  const int kind = uniform_int(c.rng, 0, 2);
  if (kind == 2) {
    std::vector<int> sites;
    std::vector<Matrix> terms;
    for (int i = 0; i < n; ++i) {
      sites.push_back(i);
      terms.push_back(random_hermitian(c.rng, m2).block(0));
    }
    const GlobalObservable a = make_global(chain, sites, terms);
    return {commutator_bounds(chain, g, a), corzel_check(chain, p1.dense(), p2.dense(), g, a, alpha, beta)};
  }
  std::vector<int> support = {uniform_int(c.rng, 0, n - 1)};
  if (kind == 1) {
    int other = uniform_int(c.rng, 0, n - 2);
    if (other >= support[0]) ++other;
    support.push_back(other);
  }
  const int dim = kind == 1 ? 4 : 2;
  const LocalElement a = make_local(chain, support, random_hermitian(c.rng, AlgebraShape::full(dim)).block(0));
  return {commutator_bounds(chain, g, a), corzel_check(chain, p1.dense(), p2.dense(), g, a, alpha, beta)};
}

using TrialFn = Reports (*)(Ctx&);

struct SuiteDef {
  const char* id;
  int trials;
  TrialFn fn;
};

const std::vector<SuiteDef>& registry() {
  static const std::vector<SuiteDef> defs = {
      {"cs", 1000, trial_cs},
      {"random-cpmap", 300, trial_cp},
      {"covariance", 300, trial_covariance},
      {"heisenberg", 300, trial_heisenberg},
      {"almost-mult", 300, trial_almost_mult},
      {"structure", 300, trial_structure},
      {"perfect", 300, trial_perfect},
      {"jm", 500, trial_jm},
      {"hpdelta", 300, trial_hpdelta},
      {"local-heisenberg", 300, trial_local_heisenberg},
      {"qn", 300, trial_qn},
      {"vectorredux", 300, trial_vectorredux},
      {"snarklop2", 300, trial_snarklop2},
      {"redrumdelta", 300, trial_redrumdelta},
      {"reduction", 300, trial_reduction},
      {"collapse", 300, trial_collapse},
      {"collapsedelta", 300, trial_collapsedelta},
      {"almost-classical", 300, trial_almost_classical},
      {"appred", 300, trial_appred},
      {"crux", 300, trial_crux},
      {"corzel", 300, trial_corzel},
  };
  return defs;
}

const SuiteDef& find_suite(const std::string& id) {
  for (const auto& d : registry())
    if (id == d.id) return d;
  throw ConfigError("unknown suite id '" + id + "'");
}

void apply_overrides(BoundReport& r, const SuiteConfig& cfg, const std::string& suite) {
  auto it = cfg.tolerance_overrides.find(r.proposition);
  if (it != cfg.tolerance_overrides.end() && !r.vacuous) {
    const bool other_failure = !r.pass && r.normalized_slack() >= -r.tolerance;
    r.tolerance = it->second;
    r.evaluate();
    if (other_failure) r.pass = false;
  }
  if (!cfg.inject_bug.empty() && cfg.inject_bug == suite && !r.vacuous) {
    r.rhs = -r.rhs - r.scale;
    r.slack = r.rhs - r.lhs;
    r.note = "injected bug: rhs negated" + (r.note.empty() ? std::string() : "; " + r.note);
    r.evaluate();
  }
}

int effective_trials(const SuiteConfig& cfg, const std::string& suite) {
  if (cfg.trials) return *cfg.trials;
  auto it = cfg.per_suite_trials.find(suite);
  return it != cfg.per_suite_trials.end() ? it->second : default_trials(suite);
}

Json shapes_json(const std::vector<AlgebraShape>& v) {
  Json j = Json::array();
  for (const auto& s : v) j.push_back(shape_to_json(s));
  return j;
}

}  // namespace

SuiteConfig default_suite_config() {
  SuiteConfig c;
  c.shapes = {AlgebraShape::full(2), AlgebraShape::full(3), AlgebraShape({2, 2}), AlgebraShape({2, 3})};
  c.apparatus = {AlgebraShape::full(2), AlgebraShape::full(3)};
  return c;
}

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& d : registry()) v.emplace_back(d.id);
    return v;
  }();
  return ids;
}

int default_trials(const std::string& suite) { return find_suite(suite).trials; }

std::vector<std::string> parse_suite_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      for (const auto& id : suite_ids())
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
      continue;
    }
    find_suite(item);
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  return out;
}

std::vector<BoundReport> run_trial(const std::string& suite, std::uint64_t seed, const SuiteConfig& cfg) {
  const SuiteDef& def = find_suite(suite);
  if (cfg.shapes.empty() || cfg.apparatus.empty()) throw ConfigError("empty shape menu");
  Rng rng(seed);
  Ctx ctx{rng, seed, cfg};
  Reports out;
  try {
    out = def.fn(ctx);
  } catch (const DegenerateGapError& e) {
    out = {vacuous_bound(suite, std::string("degenerate gap: ") + e.what())};
  } catch (const UndefinedReductionError& e) {
    out = {vacuous_bound(suite, std::string("reduction undefined: ") + e.what())};
  } catch (const ConfigError&) {
    throw;
  } catch (const SizeGuardError&) {
    throw;
  } catch (const std::exception& e) {
    BoundReport r = make_bound(suite, 1.0, 0.0, 1.0, 0.0);
    r.note = std::string("error: ") + e.what();
    out = {r};
  }
  for (auto& r : out) {
    r.seed = seed;
    apply_overrides(r, cfg, suite);
  }
  return out;
}

bool RunReport::pass() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteSummary& s) { return s.failed == 0; });
}

RunReport run_suite(const SuiteConfig& cfg) {
  RunReport report;
  report.config = cfg;
  if (!cfg.inject_bug.empty()) find_suite(cfg.inject_bug);
  for (const auto& suite : cfg.suites) {
    find_suite(suite);
    const int n = effective_trials(cfg, suite);
    if (n < 0) throw ConfigError("trial count must be non-negative");
    std::vector<Reports> slots(static_cast<std::size_t>(n));
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t i) { slots[i] = run_trial(suite, trial_seed(cfg.seed, suite, i), cfg); }, cfg.threads);

    SuiteSummary sum;
    sum.suite = suite;
    sum.trials = n;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& reps : slots) {
      for (const auto& r : reps) {
        ++sum.checks;
        if (r.vacuous) ++sum.vacuous;
        if (r.pass) {
          ++sum.passed;
        } else {
          ++sum.failed;
          sum.failures.push_back(r);
        }
        if (!r.vacuous && r.normalized_slack() < worst) {
          worst = r.normalized_slack();
          sum.worst_proposition = r.proposition;
          sum.worst_seed = r.seed;
        }
      }
    }
    sum.worst_normalized_slack = std::isfinite(worst) ? worst : 0.0;
    report.suites.push_back(std::move(sum));
  }
  return report;
}

Json run_report_to_json(const RunReport& r) {
  Json cfg;
  cfg["suites"] = r.config.suites;
  Json trials = Json::object();
  for (const auto& s : r.config.suites) trials[s] = effective_trials(r.config, s);
  cfg["trials"] = trials;
  cfg["seed"] = r.config.seed;
  cfg["shapes"] = shapes_json(r.config.shapes);
  cfg["apparatus"] = shapes_json(r.config.apparatus);
  Json tol = Json::object();
  for (const auto& [k, v] : r.config.tolerance_overrides) tol[k] = v;
  cfg["tolerance-overrides"] = tol;
  if (!r.config.inject_bug.empty()) cfg["inject-bug"] = r.config.inject_bug;

  Json j;
  j["config"] = cfg;
  Json suites = Json::array();
  for (const auto& s : r.suites) {
    Json js;
    js["suite"] = s.suite;
    js["trials"] = s.trials;
    js["checks"] = s.checks;
    js["passed"] = s.passed;
    js["failed"] = s.failed;
    js["vacuous"] = s.vacuous;
    js["worst-normalized-slack"] = s.worst_normalized_slack;
    js["worst-proposition"] = s.worst_proposition;
    js["worst-seed"] = s.worst_seed;
    Json fails = Json::array();
    for (const auto& f : s.failures) fails.push_back(report_to_json(f));
    js["failures"] = fails;
    suites.push_back(js);
  }
  j["suites"] = suites;
  j["pass"] = r.pass();
  return j;
}

std::string run_report_csv(const RunReport& r) {
  std::ostringstream out;
  out << "suite,trials,checks,passed,failed,vacuous,worst-normalized-slack,worst-proposition,worst-seed\n";
  for (const auto& s : r.suites)
    out << s.suite << ',' << s.trials << ',' << s.checks << ',' << s.passed << ',' << s.failed << ',' << s.vacuous
        << ',' << format_double(s.worst_normalized_slack) << ',' << s.worst_proposition << ',' << s.worst_seed
        << '\n';
  out << "\nsuite," << report_csv_header() << '\n';
  for (const auto& s : r.suites)
    for (const auto& f : s.failures) out << s.suite << ',' << report_csv_row(f) << '\n';
  return out.str();
}

SuiteConfig suite_config_from_text(const std::string& text) {
  SuiteConfig cfg = default_suite_config();
  try {
    const Json j = parse_text(text);
    if (!j.is_object()) throw ConfigError("manifest must be an object");
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
    auto read_shapes = [](const Json& a) {
      std::vector<AlgebraShape> v;
      for (const auto& s : a) v.push_back(shape_from_json(s));
      if (v.empty()) throw ConfigError("shape menu must not be empty");
      return v;
    };
    if (j.contains("shapes")) cfg.shapes = read_shapes(j.at("shapes"));
    if (j.contains("apparatus")) cfg.apparatus = read_shapes(j.at("apparatus"));
    for (const auto& s : j.at("suites")) {
      const std::string id = s.is_string() ? s.get<std::string>() : s.at("id").get<std::string>();
      for (const auto& expanded : parse_suite_list(id)) {
        if (std::find(cfg.suites.begin(), cfg.suites.end(), expanded) == cfg.suites.end())
          cfg.suites.push_back(expanded);
        if (s.is_object() && s.contains("trials")) cfg.per_suite_trials[expanded] = s.at("trials").get<int>();
      }
      if (s.is_object() && s.contains("tolerances"))
        for (const auto& [k, v] : s.at("tolerances").items()) cfg.tolerance_overrides[k] = v.get<double>();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad suite manifest: ") + e.what());
  }
  return cfg;
}

}  // namespace qmlab
