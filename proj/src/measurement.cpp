#include "qmlab/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmlab/parallel.hpp"
#include "qmlab/rng.hpp"

namespace qmlab {

namespace {

double rel(double norm) { return std::max(1.0, norm); }

// Distinct pointer values whose spectral projection survives the map, paired
// with M(Q). The largest norm of a discarded M(Q) is returned through dropped.
struct EffectiveSpectrum {
  std::vector<double> values;
  std::vector<Element> images;
  double dropped = 0.0;
};

EffectiveSpectrum effective_spectrum(const CPMap& m, const Element& y) {
  EffectiveSpectrum out;
  SpectralDecomposition sd = spectral_decompose(y);
  for (std::size_t k = 0; k < sd.eigenvalues.size(); ++k) {
    Element img = m.apply(sd.projections[k]);
    const double n = img.operator_norm();
    if (n > 0.5) {
      out.values.push_back(sd.eigenvalues[k]);
      out.images.push_back(std::move(img));
    } else {
      out.dropped = std::max(out.dropped, n);
    }
  }
  return out;
}

// Largest distance from a point of one set to the other set.
double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto one_way = [](const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (double x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (double z : q) best = std::min(best, std::abs(x - z));
      d = std::max(d, best);
    }
    return d;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

double min_gap(const std::vector<double>& v) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) g = std::min(g, v[i] - v[i - 1]);
  return g;
}

Element outer(const AlgebraShape& shape, const Vector& psi) {
  return Element::from_dense(shape, psi * psi.adjoint(), 1e-9);
}

void require_matrix_unit_commutation(const Element& pointer, const AlgebraShape& system,
                                     const AlgebraShape& apparatus, const char* where) {
  const double ny = pointer.operator_norm();
  for (int i = 0; i < system.num_blocks(); ++i) {
    for (int a = 0; a < system.block_dim(i); ++a) {
      for (int b = 0; b < system.block_dim(i); ++b) {
        std::vector<Matrix> blocks;
        for (int d : system.block_dims()) blocks.push_back(Matrix::Zero(d, d));
        blocks[static_cast<std::size_t>(i)](a, b) = 1.0;
        Element e = embed_system(Element(system, std::move(blocks)), apparatus);
        const double c = commutator(pointer, e).operator_norm();
        if (c > 1e-10 * rel(ny))
          throw PreconditionError(std::string(where) +
                                  ": pointer does not commute with the system algebra (defect " +
                                  format_double(c) + ")");
      }
    }
  }
}

}  // namespace

MeasurementSetup::MeasurementSetup(CPMap map, Element measured, Element pointer,
                                   std::optional<AlgebraShape> apparatus)
    : map_(std::move(map)),
      measured_(std::move(measured)),
      pointer_(std::move(pointer)),
      apparatus_(std::move(apparatus)) {
  require_same_shape(map_.codomain(), measured_.shape(), "MeasurementSetup measured");
  require_same_shape(map_.domain(), pointer_.shape(), "MeasurementSetup pointer");
  require_hermitian(measured_, "MeasurementSetup measured");
  require_hermitian(pointer_, "MeasurementSetup pointer");
  if (apparatus_)
    require_same_shape(tensor(map_.codomain(), *apparatus_), map_.domain(),
                       "MeasurementSetup apparatus");
  bias_defect_ = (map_.apply(pointer_) - measured_).operator_norm();
}

bool MeasurementSetup::unbiased() const {
  return bias_defect_ <= 1e-10 * measured_.operator_norm() + 1e-13;
}

double quality(const MeasurementSetup& s) {
  if (!s.unbiased())
    throw BiasError("setup is biased: ||M(Y) - X|| = " + format_double(s.bias_defect()),
                    s.bias_defect());
  return t_norm(s.map(), s.pointer());
}

PerfectVerdict is_perfect(const MeasurementSetup& s, double tol) {
  PerfectVerdict v;
  v.sigma = t_norm(s.map(), s.pointer());
  v.quality_route = s.unbiased() && v.sigma <= tol * rel(s.pointer().operator_norm());

  SpectralDecomposition sx = spectral_decompose(s.measured());
  EffectiveSpectrum ey = effective_spectrum(s.map(), s.pointer());
  v.max_projection_defect = ey.dropped;
  bool match = sx.eigenvalues.size() == ey.values.size();
  const double vtol = tol * rel(s.measured().operator_norm());
  for (std::size_t k = 0; match && k < ey.values.size(); ++k) {
    if (std::abs(sx.eigenvalues[k] - ey.values[k]) > vtol) match = false;
    else
      v.max_projection_defect = std::max(v.max_projection_defect,
                                         (ey.images[k] - sx.projections[k]).operator_norm());
  }
  v.spectral_route = match && v.max_projection_defect <= tol;
  v.routes_agree = v.spectral_route == v.quality_route;
  v.perfect = v.spectral_route;
  return v;
}

StructureReport structure_check(const CPMap& t, const Element& b, double tol, std::uint64_t seed) {
  require_hermitian(b, "structure_check");
  const double nb = b.operator_norm();
  const double tb = t_norm(t, b);
  if (tb > tol * rel(nb))
    throw PreconditionError("structure_check needs ||B||_T <= tol, got " + format_double(tb));

  StructureReport out;
  const std::string digest = instance_digest({to_text(t), to_text(b)});
  auto add = [&](BoundReport r) {
    r.seed = seed;
    r.digest = digest;
    out.pass = out.pass && r.pass;
    out.items.push_back(std::move(r));
  };
  const Element tbe = t.apply(b);

  Element power = Element::identity(b.shape());
  for (int k = 1; k <= 6; ++k) {
    power = power * b;
    Element tpow = Element::identity(t.codomain());
    for (int j = 0; j < k; ++j) tpow = tpow * tbe;
    const double scale = std::pow(rel(nb), k);
    BoundReport r = make_bound("structure-homomorphism", (t.apply(power) - tpow).operator_norm(),
                               0.0, scale, k * tol + 1e-12);
    r.note = "monomial degree " + std::to_string(k);
    add(r);
    BoundReport n = make_bound("structure-t-norm", t_norm(t, power), 0.0, scale, k * tol + 1e-12);
    n.note = "monomial degree " + std::to_string(k);
    add(n);
  }

  SpectralDecomposition sb = spectral_decompose(b);
  const double gap = sb.eigenvalues.size() > 1 ? min_gap(sb.eigenvalues) : 1.0;
  const double itol = 10.0 * tol * (1.0 + nb / gap) + 1e-12;
  for (std::size_t k = 0; k < sb.eigenvalues.size(); ++k) {
    const double lam = sb.eigenvalues[k];
    Element ind = band_projection(tbe, lam - gap / 2, lam + gap / 2, {.symmetrize = true});
    BoundReport r = make_bound("structure-homomorphism",
                               (t.apply(sb.projections[k]) - ind).operator_norm(), 0.0, 1.0, itol);
    r.note = "indicator of " + format_double(lam);
    add(r);
    BoundReport n = make_bound("structure-t-norm", t_norm(t, sb.projections[k]), 0.0, 1.0, itol);
    n.note = "indicator of " + format_double(lam);
    add(n);
  }

  EffectiveSpectrum eff = effective_spectrum(t, b);
  SpectralDecomposition st = spectral_decompose(tbe, {.symmetrize = true});
  const double hd = hausdorff(eff.values, st.eigenvalues);
  BoundReport sp = make_bound("structure-spectrum", std::isfinite(hd) ? hd : 1e300, 0.0, rel(nb), itol);
  sp.note = "spectrum of T(B) against the surviving spectrum of B";
  add(sp);

  Rng rng(seed);
  for (int trial = 0; trial < 3; ++trial) {
    Element r = random_element(rng, b.shape());
    Element a = Element::zero(b.shape());
    for (const auto& q : sb.projections) a += q * r * q;
    const double na = a.operator_norm();
    BoundReport c = make_bound("structure-commutant", commutator(t.apply(a), tbe).operator_norm(),
                               0.0, na * rel(nb), 2.0 * tol + 1e-12);
    c.note = "random element of the commutant of B";
    add(c);
  }
  return out;
}

BoundReport joint_quality_bound(const CPMap& m, const Element& y1, const Element& y2) {
  const double n1 = y1.operator_norm(), n2 = y2.operator_norm();
  const double c = commutator(y1, y2).operator_norm();
  if (c > 1e-9 * n1 * n2 + 1e-14)
    throw PreconditionError("joint_quality_bound needs commuting pointers (||[Y1,Y2]|| = " +
                            format_double(c) + ")");
  const double s1 = t_norm(m, y1), s2 = t_norm(m, y2);
  const double lhs = commutator(m.apply(y1), m.apply(y2)).operator_norm();
  BoundReport r = make_bound("jmdelta", lhs, 2.0 * s1 * s2, n1 * n2, 1e-8);
  r.aux["sigma1"] = s1;
  r.aux["sigma2"] = s2;
  if (s1 <= 1e-12 * rel(n1) || s2 <= 1e-12 * rel(n2)) {
    r.proposition = "jm";
    if (lhs > 1e-9 * rel(n1 * n2)) {
      r.pass = false;
      r.note = "perfect pointer but the measured observables do not commute";
    }
  }
  r.digest = instance_digest({to_text(m), to_text(y1), to_text(y2)});
  return r;
}

BoundReport heisenberg_principle_check(const MeasurementSetup& s, double delta) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw ArgumentError("disturbance bound must lie in [0, 1), got " + format_double(delta));
  if (!s.apparatus())
    throw ArgumentError("heisenberg_principle_check needs a setup on system (x) apparatus");
  require_matrix_unit_commutation(s.pointer(), s.map().codomain(), *s.apparatus(),
                                  "heisenberg_principle_check");
  const double sigma = quality(s);
  const double d = distance_to_center(s.measured()).distance;
  const std::string digest = instance_digest({to_text(s), format_double(delta)});
  if (delta <= 1e-12) {
    BoundReport r = make_bound("hp", d, 0.0, rel(s.measured().operator_norm()), 1e-9);
    r.aux["sigma"] = sigma;
    r.note = r.pass ? "zero disturbance and central X"
                    : "zero disturbance requires X to be central";
    r.digest = digest;
    return r;
  }
  const double bound = d * (1.0 - delta) / std::sqrt(3.0 * delta);
  BoundReport r = make_bound("hpdelta", bound, sigma, rel(s.pointer().operator_norm()), 1e-8);
  r.aux["distance-to-center"] = d;
  r.aux["delta"] = delta;
  r.digest = digest;
  return r;
}

double disturbance_at(const CPMap& m, const AlgebraShape& system, const AlgebraShape& apparatus,
                      const Vector& psi) {
  require_same_shape(system, m.codomain(), "disturbance_at");
  require_same_shape(tensor(system, apparatus), m.domain(), "disturbance_at");
  Element rho = outer(system, psi / psi.norm());
  Element after = partial_trace_apparatus(m.dual_linear(rho), system, apparatus);
  return trace_norm((after - rho).hermitian_part());
}

DisturbanceEstimate estimate_disturbance(const CPMap& m, const AlgebraShape& system,
                                         const AlgebraShape& apparatus, int restarts,
                                         std::uint64_t seed) {
  if (restarts < 1) throw ArgumentError("estimate_disturbance needs at least one restart");
  struct Slot {
    double value = -1.0;
    Vector psi;
    int block = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(restarts));
  parallel_for(slots.size(), [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const int block = static_cast<int>(r % static_cast<std::size_t>(system.num_blocks()));
    const int off = system.offset(block), dim = system.block_dim(block);
    Vector psi = random_block_vector(rng, system, block);
    double f = disturbance_at(m, system, apparatus, psi);
    double step = 0.5;
    int fails = 0;
    if (dim > 1) {
      for (int evals = 0; step > 1e-8 && evals < 4000; ++evals) {
        Vector cand = psi;
        cand.segment(off, dim) += step * gaussian_matrix(rng, dim, 1).col(0);
        cand /= cand.norm();
        const double fc = disturbance_at(m, system, apparatus, cand);
        if (fc > f) {
          psi = cand;
          f = fc;
          fails = 0;
        } else if (++fails >= 2 * dim + 4) {
          step *= 0.5;
          fails = 0;
        }
      }
    }
    slots[r] = Slot{f, psi, block};
  });
  const auto best = std::max_element(slots.begin(), slots.end(),
                                     [](const Slot& a, const Slot& b) { return a.value < b.value; });
  DisturbanceEstimate e;
  e.lower = best->value;
  e.argmax = best->psi;
  e.block = best->block;
  e.note = "lower estimate from " + std::to_string(restarts) +
           " seeded restarts over pure states; not a certified supremum";
  return e;
}

BoundReport local_heisenberg_check(const MeasurementSetup& s, const Element& a) {
  if (!s.apparatus()) throw ArgumentError("local_heisenberg_check needs a setup on system (x) apparatus");
  require_same_shape(s.map().codomain(), a.shape(), "local_heisenberg_check");
  const double na = a.operator_norm();
  const double preserved = (s.map().apply(embed_system(a, *s.apparatus())) - a).operator_norm();
  if (preserved > 1e-10 * rel(na))
    throw PreconditionError("M(A (x) I) != A (defect " + format_double(preserved) + ")");
  const double delta = na > 0.0 ? commutator(s.measured(), a).operator_norm() / na : 0.0;
  BoundReport r = make_bound("local-heisenberg", delta / 2.0, quality(s), 1.0, 1e-8);
  r.aux["delta"] = delta;
  r.aux["preserved-defect"] = preserved;
  r.digest = instance_digest({to_text(s), to_text(a)});
  return r;
}

MeasurementSetup povm_measurement(const std::vector<std::pair<double, Element>>& effects) {
  if (effects.empty()) throw ArgumentError("a POVM needs at least one effect");
  const AlgebraShape shape = effects.front().second.shape();
  const int m = static_cast<int>(effects.size());
  const int n = shape.total_dim();
  Element sum = Element::zero(shape);
  Element measured = Element::zero(shape);
  std::vector<Matrix> kraus;
  for (int k = 0; k < m; ++k) {
    const auto& [x, e] = effects[static_cast<std::size_t>(k)];
    require_same_shape(shape, e.shape(), "povm_measurement");
    require_hermitian(e, "povm_measurement");
    const double lo = min_eigenvalue(e);
    if (lo < -1e-10)
      throw DomainError("POVM effect " + std::to_string(k) + " is not positive (" +
                        format_double(lo) + ")");
    sum += e;
    measured += Complex(x) * e;
    for (int b = 0; b < shape.num_blocks(); ++b) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(e.hermitian_part().block(b));
      for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
        const double lam = es.eigenvalues()(c);
        if (lam <= 0.0) continue;
        Matrix kop = Matrix::Zero(m, n);
        kop.block(k, shape.offset(b), 1, shape.block_dim(b)) =
            std::sqrt(lam) * es.eigenvectors().col(c).adjoint();
        kraus.push_back(std::move(kop));
      }
    }
  }
  const double defect = (sum - Element::identity(shape)).operator_norm();
  if (defect > 1e-10)
    throw DomainError("POVM effects do not sum to the identity (defect " + format_double(defect) + ")");
  std::vector<Matrix> ptr;
  for (int k = 0; k < m; ++k) ptr.push_back(Matrix::Constant(1, 1, effects[static_cast<std::size_t>(k)].first));
  CPMap map(AlgebraShape::abelian(m), shape, std::move(kraus), 1e-9);
  return MeasurementSetup(std::move(map), measured.hermitian_part(),
                          Element(AlgebraShape::abelian(m), std::move(ptr)));
}

MeasurementSetup von_neumann_measurement(const Element& x) {
  require_hermitian(x, "von_neumann_measurement");
  SpectralDecomposition sd = spectral_decompose(x);
  const AlgebraShape& a = x.shape();
  const int k = static_cast<int>(sd.eigenvalues.size());
  const int n = a.total_dim();
  const AlgebraShape outcomes = AlgebraShape::abelian(k);
  std::vector<Matrix> kraus;
  std::vector<Matrix> values;
  for (int i = 0; i < k; ++i) {
    Matrix kop = Matrix::Zero(static_cast<Eigen::Index>(k) * n, n);
    kop.block(static_cast<Eigen::Index>(i) * n, 0, n, n) = sd.projections[static_cast<std::size_t>(i)].to_dense();
    kraus.push_back(std::move(kop));
    values.push_back(Matrix::Constant(1, 1, sd.eigenvalues[static_cast<std::size_t>(i)]));
  }
  CPMap map(tensor(outcomes, a), a, std::move(kraus), 1e-9);
  Element pointer = kron(Element(outcomes, std::move(values)), Element::identity(a));
  return MeasurementSetup(std::move(map), x, std::move(pointer));
}

std::string to_text(const MeasurementSetup& s) {
  Json j;
  j["setup"] = true;
  j["map"] = cpmap_to_json(s.map());
  j["measured"] = element_to_json(s.measured());
  j["pointer"] = element_to_json(s.pointer());
  j["apparatus"] = s.apparatus() ? shape_to_json(*s.apparatus()) : Json();
  return dump_text(j);
}

MeasurementSetup setup_from_text(const std::string& text) {
  Json j = parse_text(text);
  if (!j.is_object() || !j.contains("map") || !j.contains("measured") || !j.contains("pointer"))
    throw ConfigError("measurement setup record needs map, measured and pointer");
  std::optional<AlgebraShape> app;
  if (j.contains("apparatus") && !j["apparatus"].is_null()) app = shape_from_json(j["apparatus"]);
  return MeasurementSetup(cpmap_from_json(j["map"]), element_from_json(j["measured"]),
                          element_from_json(j["pointer"]), app);
}

}  // namespace qmlab
