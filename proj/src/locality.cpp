#include "qmlab/locality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>

namespace qmlab {

namespace {

Matrix pauli_matrix(char axis) {
  switch (axis) {
    case 'x': return pauli_x().block(0);
    case 'y': return pauli_y().block(0);
    case 'z': return pauli_z().block(0);
    default: throw ArgumentError(std::string("unknown spin axis '") + axis + "'");
  }
}

double spectral_norm(const Matrix& m) { return Element::from_matrix(m).operator_norm(); }

void require_site(const LocalAlgebra& chain, int site, const char* where) {
  if (site < 0 || site >= chain.sites())
    throw ArgumentError(std::string(where) + ": site " + std::to_string(site) + " outside the chain");
}

struct Moments {
  double mean;
  double sigma;
};

Moments moments(const Vector& v, const Matrix& y) {
  const Vector yv = y * v;
  const double m = v.dot(yv).real();
  const double m2 = yv.squaredNorm();
  return {m, std::sqrt(std::max(0.0, m2 - m * m))};
}

BoundReport corzel_impl(const std::string& id, const Vector& phi1, const Vector& phi2, const Matrix& y,
                        const Matrix& a, double numerator_const, double norm_factor,
                        std::complex<double> alpha, std::complex<double> beta) {
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > 1e-10)
    throw ArgumentError("corzel_check needs |alpha|^2 + |beta|^2 = 1, got " + format_double(norm));
  const Vector v1 = phi1 / phi1.norm(), v2 = phi2 / phi2.norm();
  const Moments m1 = moments(v1, y), m2 = moments(v2, y);
  const double gap = std::abs(m1.mean - m2.mean);
  if (gap <= 1e-8) return vacuous_bound(id, "degenerate gap |y1 - y2| below threshold");
  const Vector sup = alpha * v1 + beta * v2;
  const Complex mixed = std::norm(alpha) * v1.dot(a * v1) + std::norm(beta) * v2.dot(a * v2);
  const double lhs = std::abs(sup.dot(a * sup) - mixed);
  BoundReport r = make_bound(id, lhs, (numerator_const + m1.sigma + m2.sigma) / gap * norm_factor,
                             norm_factor, 1e-8);
  r.aux["gap"] = gap;
  r.aux["sigma1"] = m1.sigma;
  r.aux["sigma2"] = m2.sigma;
  return r;
}

}  // namespace

std::size_t size_guard() {
  const char* env = std::getenv("QMLAB_SIZE_GUARD");
  if (!env || !*env) return kDefaultSizeGuard;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0 || env[0] == '-')
    throw ConfigError(std::string("QMLAB_SIZE_GUARD must be a positive integer, got '") + env + "'");
  return static_cast<std::size_t>(v);
}

LocalAlgebra::LocalAlgebra(std::vector<int> atom_dims) : dims_(std::move(atom_dims)), dense_(1) {
  if (dims_.empty()) throw ShapeError("a chain needs at least one atom");
  for (int d : dims_) {
    if (d < 1) throw ShapeError("atom dimensions must be positive");
    const auto ud = static_cast<std::size_t>(d);
    dense_ = dense_ > std::numeric_limits<std::size_t>::max() / ud ? std::numeric_limits<std::size_t>::max()
                                                                  : dense_ * ud;
  }
}

LocalAlgebra LocalAlgebra::uniform(int sites, int dim) {
  if (sites < 1) throw ShapeError("a chain needs at least one atom");
  return LocalAlgebra(std::vector<int>(static_cast<std::size_t>(sites), dim));
}

void LocalAlgebra::require_dense(const char* where) const {
  const std::size_t cap = size_guard();
  if (dense_ > cap)
    throw SizeGuardError(std::string(where) + ": dense dimension " + std::to_string(dense_) +
                         " exceeds the size guard " + std::to_string(cap));
}

AlgebraShape LocalAlgebra::shape() const {
  require_dense("LocalAlgebra::shape");
  return AlgebraShape::full(static_cast<int>(dense_));
}

double LocalElement::norm() const { return spectral_norm(factor); }

LocalElement make_local(const LocalAlgebra& chain, std::vector<int> support, Matrix factor) {
  if (support.empty()) throw ArgumentError("a local element needs a non-empty support");
  std::sort(support.begin(), support.end());
  if (std::adjacent_find(support.begin(), support.end()) != support.end())
    throw ArgumentError("support sites must be distinct");
  long dim = 1;
  for (int s : support) {
    require_site(chain, s, "make_local");
    dim *= chain.atom_dim(s);
  }
  if (factor.rows() != dim || factor.cols() != dim)
    throw ShapeError("local factor must be " + std::to_string(dim) + "x" + std::to_string(dim));
  return LocalElement{std::move(support), std::move(factor)};
}

Element embed(const LocalAlgebra& chain, const LocalElement& e) {
  chain.require_dense("embed");
  const int n = chain.sites();
  const auto total = static_cast<Eigen::Index>(chain.dense_dim());
  std::vector<Eigen::Index> stride(static_cast<std::size_t>(n));
  Eigen::Index s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] = s;
    s *= chain.atom_dim(i);
  }
  const auto ds = e.factor.rows();
  // place[l]: global offset contributed by local index l.
  std::vector<Eigen::Index> place(static_cast<std::size_t>(ds), 0);
  for (Eigen::Index l = 0; l < ds; ++l) {
    Eigen::Index rem = l, off = 0;
    for (auto it = e.support.rbegin(); it != e.support.rend(); ++it) {
      const int d = chain.atom_dim(*it);
      off += (rem % d) * stride[static_cast<std::size_t>(*it)];
      rem /= d;
    }
    place[static_cast<std::size_t>(l)] = off;
  }
  Matrix out = Matrix::Zero(total, total);
  for (Eigen::Index r = 0; r < total; ++r) {
    Eigen::Index local = 0, rest = r;
    for (int site : e.support) {
      const int d = chain.atom_dim(site);
      const Eigen::Index digit = (r / stride[static_cast<std::size_t>(site)]) % d;
      local = local * d + digit;
      rest -= digit * stride[static_cast<std::size_t>(site)];
    }
    for (Eigen::Index c = 0; c < ds; ++c) out(r, rest + place[static_cast<std::size_t>(c)]) = e.factor(local, c);
  }
  return Element::from_matrix(out);
}

double GlobalObservable::kappa() const { return count() ? term_bound() / count() : 0.0; }

double GlobalObservable::term_bound() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, spectral_norm(t));
  return m;
}

GlobalObservable make_global(const LocalAlgebra& chain, std::vector<int> sites, std::vector<Matrix> terms) {
  if (sites.empty() || sites.size() != terms.size())
    throw ArgumentError("a global observable needs one term per site");
  std::vector<std::size_t> order(sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sites[a] < sites[b]; });
  GlobalObservable g;
  for (std::size_t i : order) {
    require_site(chain, sites[i], "make_global");
    const Matrix& t = terms[i];
    const int d = chain.atom_dim(sites[i]);
    if (t.rows() != d || t.cols() != d) throw ShapeError("global observable term has the wrong size");
    if (!Element::from_matrix(t).is_hermitian()) throw DomainError("global observable terms must be Hermitian");
    if (!g.sites.empty() && g.sites.back() == sites[i]) throw ArgumentError("global observable sites must be distinct");
    g.sites.push_back(sites[i]);
    g.terms.push_back(t);
  }
  return g;
}

GlobalObservable spin_average(const LocalAlgebra& chain, char axis) {
  std::vector<int> sites;
  std::vector<Matrix> terms;
  for (int i = 0; i < chain.sites(); ++i) {
    if (chain.atom_dim(i) != 2) throw ShapeError("spin_average needs a qubit chain");
    sites.push_back(i);
    terms.push_back(pauli_matrix(axis));
  }
  return make_global(chain, std::move(sites), std::move(terms));
}

Element global_realize(const LocalAlgebra& chain, const GlobalObservable& g) {
  chain.require_dense("global_realize");
  Element out = Element::zero(chain.shape());
  for (int k = 0; k < g.count(); ++k)
    out += embed(chain, LocalElement{{g.sites[static_cast<std::size_t>(k)]}, g.terms[static_cast<std::size_t>(k)]});
  return Complex(1.0 / g.count()) * out;
}

BoundReport commutator_bounds(const LocalAlgebra& chain, const GlobalObservable& g, const LocalElement& a) {
  const double lhs = commutator(global_realize(chain, g), embed(chain, a)).operator_norm();
  BoundReport r = make_bound("corzel-commutator", lhs, 2.0 * a.locality() * g.kappa() * a.norm(), 1.0, 1e-9);
  r.aux["kappa"] = g.kappa();
  r.aux["locality"] = a.locality();
  return r;
}

BoundReport commutator_bounds(const LocalAlgebra& chain, const GlobalObservable& g,
                              const GlobalObservable& a) {
  const double lhs = commutator(global_realize(chain, g), global_realize(chain, a)).operator_norm();
  BoundReport r = make_bound("corzel-commutator-global", lhs, 2.0 * g.kappa() * a.term_bound(), 1.0, 1e-9);
  r.aux["kappa"] = g.kappa();
  r.aux["y-prime"] = a.term_bound();
  return r;
}

Vector ProductState::dense() const {
  Vector v = Vector::Ones(1);
  for (const auto& f : factors) {
    Vector next(v.size() * f.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * f.size(), f.size()) = v(i) * f;
    v = std::move(next);
  }
  return v;
}

ProductState make_product_state(const LocalAlgebra& chain, std::vector<Vector> factors) {
  if (static_cast<int>(factors.size()) != chain.sites())
    throw ArgumentError("a product state needs one factor per site");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].size() != chain.atom_dim(static_cast<int>(i)))
      throw ShapeError("product state factor " + std::to_string(i) + " has the wrong length");
    const double n = factors[i].norm();
    if (n <= 0.0) throw DomainError("product state factors must be nonzero");
    factors[i] /= n;
  }
  return ProductState{std::move(factors)};
}

BoundReport corzel_check(const LocalAlgebra& chain, const Vector& phi1, const Vector& phi2,
                         const GlobalObservable& g, const LocalElement& a, std::complex<double> alpha,
                         std::complex<double> beta) {
  chain.require_dense("corzel_check");
  BoundReport r = corzel_impl("corzel", phi1, phi2, global_realize(chain, g).block(0),
                              embed(chain, a).block(0), 2.0 * a.locality() * g.kappa(), a.norm(), alpha, beta);
  r.aux["kappa"] = g.kappa();
  r.aux["locality"] = a.locality();
  return r;
}

BoundReport corzel_check(const LocalAlgebra& chain, const Vector& phi1, const Vector& phi2,
                         const GlobalObservable& g, const GlobalObservable& a,
                         std::complex<double> alpha, std::complex<double> beta) {
  chain.require_dense("corzel_check");
  BoundReport r = corzel_impl("corzel-global", phi1, phi2, global_realize(chain, g).block(0),
                              global_realize(chain, a).block(0), 2.0 * g.kappa(), a.term_bound(), alpha, beta);
  r.aux["kappa"] = g.kappa();
  r.aux["y-prime"] = a.term_bound();
  return r;
}

void ScenarioReport::add(BoundReport r) {
  pass = pass && r.pass;
  items.push_back(std::move(r));
}

CnotSetup cnot_setup() {
  const Element up = spin_up_projection(), down = spin_down_projection();
  const Element i2 = Element::identity(AlgebraShape::full(2));
  Element u = kron(up, i2) + kron(down, pauli_x());
  DilatedMap dm = dilated_measurement(u, State::pure(AlgebraShape::full(2), spin_up()), AlgebraShape::full(2));
  MeasurementSetup s(dm.map, pauli_z(), kron(i2, pauli_z()), AlgebraShape::full(2));
  return CnotSetup{u, dm, s};
}

ScenarioReport hepp_cnot_scenario() {
  CnotSetup c = cnot_setup();
  ScenarioReport out;
  BoundReport bias = make_bound("cnot-unbiased", c.setup.bias_defect(), 0.0, 1.0, 1e-12);
  bias.note = "||M(I (x) sigma_z) - sigma_z||";
  out.add(bias);

  PerfectVerdict v = is_perfect(c.setup);
  BoundReport perfect = make_bound("cnot-perfect", v.sigma, 0.0, 1.0, 1e-10);
  perfect.pass = perfect.pass && v.perfect && v.routes_agree;
  perfect.aux["max-projection-defect"] = v.max_projection_defect;
  perfect.note = v.perfect ? "perfect measurement" : "not perfect";
  out.add(perfect);

  // The back-rotated sigma_x keeps the coherence of |+x>: M*(rho)(A) = rho(sigma_x) = 1.
  const Element back = c.unitary * kron(pauli_x(), Element::identity(AlgebraShape::full(2))) * c.unitary.adjoint();
  Vector plus(2);
  plus << 1.0, 1.0;
  const State rho = State::pure(AlgebraShape::full(2), plus);
  const double seen = c.dilation.map.dual(rho)(back).real();
  BoundReport coh = make_bound("cnot-coherence", std::abs(seen - rho(pauli_x()).real()), 0.0, 1.0, 1e-12);
  coh.aux["M*(rho)(A)"] = seen;
  coh.aux["rho(sigma_x)"] = rho(pauli_x()).real();
  coh.aux["commutator-with-pointer"] = commutator(back, c.setup.pointer()).operator_norm();
  coh.note = "back-rotated sigma_x retains the coherence of |+x>";
  out.add(coh);
  return out;
}

DilatedMap two_bit_dilation() {
  const AlgebraShape m2 = AlgebraShape::full(2);
  const Element i2 = Element::identity(m2);
  const Element up = spin_up_projection(), down = spin_down_projection();
  const Element u1 = kron(kron(up, i2), i2) + kron(kron(down, pauli_x()), i2);
  const Element u2 = kron(kron(up, i2), i2) + kron(kron(down, i2), pauli_x());
  const Vector tau = kron_vector(spin_up(), spin_up(), m2, m2);
  return dilated_measurement(u2 * u1, State::pure(AlgebraShape::full(4), tau), m2);
}

TwoBitReport two_bit_scenario(const State& rho) {
  require_same_shape(AlgebraShape::full(2), rho.shape(), "two_bit_scenario");
  const DilatedMap dm = two_bit_dilation();
  const AlgebraShape m2 = AlgebraShape::full(2);
  const Element i2 = Element::identity(m2);
  const Element y1 = kron(kron(i2, pauli_z()), i2);
  const Element y2 = kron(kron(i2, i2), pauli_z());
  const State mrho = dm.map.dual(rho);

  TwoBitReport out;
  out.table = joint_distribution(mrho, y1, y2);
  out.max_off_diagonal = std::max(out.table.at(1.0, -1.0), out.table.at(-1.0, 1.0));
  const double p_up = rho(spin_up_projection()).real();
  out.diagonal_defect = std::max(std::abs(out.table.at(1.0, 1.0) - p_up),
                                 std::abs(out.table.at(-1.0, -1.0) - (1.0 - p_up)));
  if (p_up <= kDust) {
    out.reduction = vacuous_bound("two-bit-reduction", "rho(P+) below dust");
  } else {
    const Element q = kron(kron(i2, spin_up_projection()), i2);
    const double d = state_distance(reduced_state(mrho, q), dm.map.dual(reduced_state(rho, spin_up_projection())));
    out.reduction = make_bound("two-bit-reduction", d, 0.0, 1.0, 1e-10);
  }
  out.reduction.digest = instance_digest({to_text(rho)});
  out.pass = out.max_off_diagonal <= 1e-12 && out.diagonal_defect <= 1e-12 && out.reduction.pass;
  return out;
}

namespace {

Matrix matrix_spec(const Json& j, int dim) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (dim == 2 && (s == "sx" || s == "sy" || s == "sz")) return pauli_matrix(s[1]);
    if (s == "id") return Matrix::Identity(dim, dim);
    throw ConfigError("unknown operator name '" + s + "'");
  }
  return matrix_from_json(j, dim, dim);
}

Vector vector_spec(const Json& j, int dim) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    Vector v = Vector::Zero(dim);
    if (dim == 2 && s == "up") v(0) = 1.0;
    else if (dim == 2 && s == "down") v(1) = 1.0;
    else if (dim == 2 && (s == "+x" || s == "-x")) v << 1.0, (s == "+x" ? 1.0 : -1.0);
    else throw ConfigError("unknown state factor '" + s + "'");
    return v;
  }
  return matrix_from_json(j, dim, 1).col(0);
}

std::complex<double> complex_spec(const Json& j, const char* key, std::complex<double> fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(std::string(key) + " must be a number or [re, im]");
}

GlobalObservable global_spec(const LocalAlgebra& chain, const Json& j) {
  if (!j.contains("sites") || !j.contains("terms")) throw ConfigError("global observable needs sites and terms");
  std::vector<int> sites = j["sites"].get<std::vector<int>>();
  std::vector<Matrix> terms;
  const Json& t = j["terms"];
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] < 0 || sites[k] >= chain.sites()) throw ConfigError("observable site outside the chain");
    terms.push_back(matrix_spec(t.is_array() && !t.empty() && t.size() == sites.size() ? t[k] : t,
                                chain.atom_dim(sites[k])));
  }
  return make_global(chain, std::move(sites), std::move(terms));
}

}  // namespace

ChainConfig chain_config_from_text(const std::string& text) {
  try {
    Json j = parse_text(text);
    if (!j.is_object()) throw ConfigError("chain config must be an object");
    std::vector<int> dims;
    if (j.contains("atom_dims")) dims = j["atom_dims"].get<std::vector<int>>();
    else if (j.contains("N")) dims.assign(j["N"].get<std::size_t>(), 2);
    else throw ConfigError("chain config needs N or atom_dims");
    if (j.contains("N") && j["N"].get<std::size_t>() != dims.size())
      throw ConfigError("N does not match atom_dims");
    LocalAlgebra chain(dims);
    if (!j.contains("pointer") || !j.contains("observable") || !j.contains("states"))
      throw ConfigError("chain config needs pointer, observable and states");
    GlobalObservable pointer = global_spec(chain, j["pointer"]);
    const Json& obs = j["observable"];
    const std::string kind = obs.value("kind", "local");
    const Json& states = j["states"];
    if (!states.is_array() || states.size() != 2) throw ConfigError("chain config needs exactly two states");
    std::vector<ProductState> ps;
    for (const auto& s : states) {
      const Json& f = s.contains("factors") ? s["factors"] : s;
      if (!f.is_array() || static_cast<int>(f.size()) != chain.sites())
        throw ConfigError("each state needs one factor per site");
      std::vector<Vector> factors;
      for (int i = 0; i < chain.sites(); ++i) factors.push_back(vector_spec(f[static_cast<std::size_t>(i)], chain.atom_dim(i)));
      ps.push_back(make_product_state(chain, std::move(factors)));
    }
    ChainConfig cfg{chain, pointer, false, {}, {}, ps[0], ps[1],
                    complex_spec(j, "alpha", std::sqrt(0.5)), complex_spec(j, "beta", std::sqrt(0.5))};
    if (kind == "global") {
      cfg.observable_is_global = true;
      cfg.global_observable = global_spec(chain, obs);
    } else if (kind == "local") {
      if (!obs.contains("sites") || !obs.contains("factor")) throw ConfigError("local observable needs sites and factor");
      std::vector<int> support = obs["sites"].get<std::vector<int>>();
      int dim = 1;
      for (int s : support) {
        if (s < 0 || s >= chain.sites()) throw ConfigError("observable site outside the chain");
        dim *= chain.atom_dim(s);
      }
      cfg.local_observable = make_local(chain, std::move(support), matrix_spec(obs["factor"], dim));
    } else {
      throw ConfigError("observable kind must be local or global");
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed chain config: ") + e.what());
  } catch (const ShapeError& e) {
    throw ConfigError(e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<BoundReport> run_chain(const ChainConfig& cfg) {
  const Vector v1 = cfg.phi1.dense(), v2 = cfg.phi2.dense();
  std::vector<BoundReport> out;
  if (cfg.observable_is_global) {
    out.push_back(commutator_bounds(cfg.chain, cfg.pointer, cfg.global_observable));
    out.push_back(corzel_check(cfg.chain, v1, v2, cfg.pointer, cfg.global_observable, cfg.alpha, cfg.beta));
  } else {
    out.push_back(commutator_bounds(cfg.chain, cfg.pointer, cfg.local_observable));
    out.push_back(corzel_check(cfg.chain, v1, v2, cfg.pointer, cfg.local_observable, cfg.alpha, cfg.beta));
  }
  return out;
}

}  // namespace qmlab
