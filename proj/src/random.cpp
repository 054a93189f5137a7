#include "qmlab/random.hpp"

#include <algorithm>
#include <cmath>

#include "qmlab/locality.hpp"

namespace qmlab {

namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Matrix inverse_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  Eigen::VectorXd d = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * d.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Element unitary_exp(const Element& h, double eta) {
  std::vector<Matrix> blocks;
  for (const auto& b : h.blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.adjoint()));
    Vector ph(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, eta * es.eigenvalues()(i));
    blocks.push_back(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
  }
  return Element(h.shape(), std::move(blocks));
}

// G Pi diag(H_r, H'_{m-r}) Gt^dagger, where Pi sends coordinate j < r to
// slot start + j and the remaining coordinates to the remaining slots in order.
Matrix carrier_unitary(Rng& rng, const Matrix& g, const Matrix& gt, int start, int r) {
  const int m = static_cast<int>(g.rows());
  Matrix inner = Matrix::Zero(m, m);
  inner.topLeftCorner(r, r) = haar_unitary(rng, r);
  if (m > r) inner.bottomRightCorner(m - r, m - r) = haar_unitary(rng, m - r);
  Matrix perm = Matrix::Zero(m, m);
  int next = 0;
  for (int j = 0; j < m; ++j) {
    int slot;
    if (j < r) {
      slot = start + j;
    } else {
      while (next >= start && next < start + r) ++next;
      slot = next++;
    }
    perm(slot, j) = 1.0;
  }
  return g * perm * inner * gt.adjoint();
}

std::vector<double> distinct_values(Rng& rng, int k) {
  for (;;) {
    std::vector<double> v;
    for (int i = 0; i < k; ++i) v.push_back(uniform(rng, -2.0, 2.0));
    std::sort(v.begin(), v.end());
    bool ok = true;
    for (int i = 1; i < k; ++i) ok = ok && v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i - 1)] > 0.1;
    if (ok) return v;
  }
}

// Orthogonal projections summing to I, each nonzero, built from a random
// block unitary and a random labelling of the diagonal.
std::vector<Element> random_partition(Rng& rng, const AlgebraShape& shape, int k) {
  const int n = shape.total_dim();
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(uniform_int(rng, 0, i))]);
  std::vector<int> label(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    label[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i < k ? i : uniform_int(rng, 0, k - 1);
  const Element v = random_unitary(rng, shape);
  std::vector<Element> out;
  for (int c = 0; c < k; ++c) {
    std::vector<Matrix> blocks;
    for (int b = 0; b < shape.num_blocks(); ++b) {
      Vector d = Vector::Zero(shape.block_dim(b));
      for (int i = 0; i < shape.block_dim(b); ++i)
        if (label[static_cast<std::size_t>(shape.offset(b) + i)] == c) d(i) = 1.0;
      blocks.push_back(v.block(b) * d.asDiagonal() * v.block(b).adjoint());
    }
    out.emplace_back(shape, std::move(blocks));
  }
  return out;
}

void require_guard(const AlgebraShape& joint, const char* where) {
  const std::size_t cap = size_guard();
  if (static_cast<std::size_t>(joint.total_dim()) > cap)
    throw SizeGuardError(std::string(where) + ": dimension " + std::to_string(joint.total_dim()) +
                         " exceeds the size guard " + std::to_string(cap));
}

}  // namespace

CPMap random_cpmap(const AlgebraShape& domain, const AlgebraShape& codomain, int kraus_rank,
                   std::uint64_t seed) {
  if (kraus_rank < 1) throw ArgumentError("random_cpmap needs kraus_rank >= 1");
  Rng rng(seed);
  const int nd = domain.num_blocks(), nc = codomain.num_blocks();
  const int rank = std::max(kraus_rank, (nc + nd - 1) / nd);
  const int pairs = rank * nd;
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::vector<int> target(static_cast<std::size_t>(pairs));
    std::vector<int> order(static_cast<std::size_t>(pairs));
    for (int i = 0; i < pairs; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = pairs - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(uniform_int(rng, 0, i))]);
    for (int i = 0; i < pairs; ++i)
      target[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i < nc ? i : uniform_int(rng, 0, nc - 1);
    // Each codomain block needs at least as many incoming rows as its dimension.
    std::vector<int> rows(static_cast<std::size_t>(nc), 0);
    for (int q = 0; q < pairs; ++q)
      rows[static_cast<std::size_t>(target[static_cast<std::size_t>(q)])] += domain.block_dim(q % nd);
    for (;;) {
      std::vector<int> short_blocks;
      for (int j = 0; j < nc; ++j)
        if (rows[static_cast<std::size_t>(j)] < codomain.block_dim(j)) short_blocks.push_back(j);
      if (short_blocks.empty()) break;
      for (int i = 0; i < nd; ++i) {
        const int j = short_blocks[static_cast<std::size_t>(i) % short_blocks.size()];
        target.push_back(j);
        rows[static_cast<std::size_t>(j)] += domain.block_dim(i);
      }
    }
    const int ops = static_cast<int>(target.size()) / nd;
    std::vector<Matrix> kraus;
    Matrix s = Matrix::Zero(codomain.total_dim(), codomain.total_dim());
    for (int r = 0; r < ops; ++r) {
      Matrix k = Matrix::Zero(domain.total_dim(), codomain.total_dim());
      for (int i = 0; i < nd; ++i) {
        const int j = target[static_cast<std::size_t>(r * nd + i)];
        k.block(domain.offset(i), codomain.offset(j), domain.block_dim(i), codomain.block_dim(j)) =
            gaussian_matrix(rng, domain.block_dim(i), codomain.block_dim(j));
      }
      s += k.adjoint() * k;
      kraus.push_back(std::move(k));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.eigenvalues().minCoeff() < 1e-8) continue;
    const Matrix w = inverse_sqrt(s);
    for (auto& k : kraus) k = (k * w).eval();
    return CPMap(domain, codomain, std::move(kraus), 1e-9);
  }
  throw DomainError("random_cpmap: Kraus Gram matrix stayed singular after 16 draws");
}

DilatedSetup dilated_setup(const Element& u, const State& tau, const AlgebraShape& system,
                           const Element& apparatus_pointer) {
  require_same_shape(tau.shape(), apparatus_pointer.shape(), "dilated_setup");
  DilatedMap dm = dilated_measurement(u, tau, system);
  Element pointer = embed_apparatus(system, apparatus_pointer);
  Element x = dm.map.apply(pointer).hermitian_part();
  MeasurementSetup s(dm.map, std::move(x), std::move(pointer), tau.shape());
  return DilatedSetup{std::move(dm), std::move(s), apparatus_pointer};
}

DilatedSetup random_dilated_setup(const AlgebraShape& a, const AlgebraShape& b, std::uint64_t seed) {
  const AlgebraShape joint = tensor(a, b);
  require_guard(joint, "random_dilated_setup");
  Rng rng(seed);
  Element u = random_unitary(rng, joint);
  State tau = random_state(rng, b);
  Element y = random_hermitian(rng, b);
  return dilated_setup(u, tau, a, y);
}

PerfectSetup random_perfect_setup(Rng& rng, const AlgebraShape& system, int outcomes, int tau_rank) {
  const int n = system.total_dim();
  if (outcomes < 1 || outcomes > n) throw ArgumentError("random_perfect_setup: outcomes must lie in [1, dim]");
  if (tau_rank < 1) throw ArgumentError("random_perfect_setup: tau_rank must be positive");
  const int k = outcomes, r = tau_rank;
  const int group = r + uniform_int(rng, 0, 1);
  const int m = k * group;
  const AlgebraShape app = AlgebraShape::full(m);
  require_guard(tensor(system, app), "random_perfect_setup");

  std::vector<double> values = distinct_values(rng, k);
  std::vector<Element> projections = random_partition(rng, system, k);
  std::vector<Element> pointer_projections;

  const Matrix g = haar_unitary(rng, m), gt = haar_unitary(rng, m);
  Vector p(r);
  for (int i = 0; i < r; ++i) p(i) = uniform(rng, 0.2, 1.0);
  p /= p.sum();
  Matrix tau = Matrix::Zero(m, m);
  tau.topLeftCorner(r, r) = p.asDiagonal();
  tau = gt * tau * gt.adjoint();
  tau = (0.5 * (tau + tau.adjoint())).eval();

  Vector yd(m);
  for (int i = 0; i < m; ++i) yd(i) = values[static_cast<std::size_t>(i / group)];
  const Matrix y = g * yd.asDiagonal() * g.adjoint();

  Element u = Element::zero(tensor(system, app));
  for (int c = 0; c < k; ++c) {
    Element w = Element::from_matrix(carrier_unitary(rng, g, gt, c * group, r));
    u += kron(projections[static_cast<std::size_t>(c)], w);
    Vector qd = Vector::Zero(m);
    qd.segment(c * group, group).setOnes();
    pointer_projections.push_back(
        embed_apparatus(system, Element::from_matrix(g * qd.asDiagonal() * g.adjoint())));
  }
  DilatedSetup d = dilated_setup(u, State(Element::from_matrix(tau)), system,
                                 Element::from_matrix(0.5 * (y + y.adjoint())));
  return PerfectSetup{std::move(d), std::move(values), std::move(projections),
                      std::move(pointer_projections)};
}

DilatedSetup perturb_setup(Rng& rng, const DilatedSetup& s, double eta) {
  Element h = random_hermitian(rng, s.dilation.unitary.shape());
  h *= Complex(1.0 / h.operator_norm());
  return dilated_setup(s.dilation.unitary * unitary_exp(h, eta), s.dilation.apparatus_state,
                       s.dilation.system, s.apparatus_pointer);
}

JointSetup random_joint_setup(Rng& rng, const AlgebraShape& system, int m1, int m2, bool perfect) {
  if (m1 < 1 || m2 < 1) throw ArgumentError("random_joint_setup: apparatus dimensions must be positive");
  const AlgebraShape b1 = AlgebraShape::full(m1), b2 = AlgebraShape::full(m2);
  const AlgebraShape app = AlgebraShape::full(m1 * m2);
  const AlgebraShape joint = tensor(system, app);
  require_guard(joint, "random_joint_setup");
  const Element i1 = Element::identity(b1), i2 = Element::identity(b2);

  if (!perfect) {
    Element u = random_unitary(rng, joint);
    State t1 = random_state(rng, b1), t2 = random_state(rng, b2);
    State tau(Element::from_matrix(kron(t1.density().block(0), t2.density().block(0))));
    Element y1 = random_hermitian(rng, b1), y2 = random_hermitian(rng, b2);
    DilatedMap dm = dilated_measurement(u, tau, system);
    return JointSetup{dm, embed_apparatus(system, Element::from_matrix(kron(y1.block(0), i2.block(0)))),
                      embed_apparatus(system, Element::from_matrix(kron(i1.block(0), y2.block(0)))), false};
  }

  const int n = system.total_dim();
  const int k = uniform_int(rng, 1, std::min(n, 3));
  const std::vector<Element> proj = random_partition(rng, system, k);
  auto pointer_side = [&](int m, std::vector<int>& starts, Matrix& g, Matrix& gt) {
    const int groups = std::min(2, m);
    const int size = m / groups;
    std::vector<double> vals = distinct_values(rng, groups);
    g = haar_unitary(rng, m);
    gt = haar_unitary(rng, m);
    Vector d(m);
    for (int i = 0; i < m; ++i) d(i) = vals[static_cast<std::size_t>(std::min(i / size, groups - 1))];
    starts.clear();
    for (int c = 0; c < groups; ++c) starts.push_back(c * size);
    return Matrix(g * d.asDiagonal() * g.adjoint());
  };
  std::vector<int> s1, s2;
  Matrix g1, gt1, g2, gt2;
  const Matrix y1 = pointer_side(m1, s1, g1, gt1);
  const Matrix y2 = pointer_side(m2, s2, g2, gt2);
  Element u = Element::zero(joint);
  for (int c = 0; c < k; ++c) {
    const int a = s1[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(s1.size()) - 1))];
    const int b = s2[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(s2.size()) - 1))];
    const Matrix w = kron(carrier_unitary(rng, g1, gt1, a, 1), carrier_unitary(rng, g2, gt2, b, 1));
    u += kron(proj[static_cast<std::size_t>(c)], Element::from_matrix(w));
  }
  const Vector f1 = gt1.col(0), f2 = gt2.col(0);
  const Vector f = kron(Matrix(f1), Matrix(f2)).col(0);
  State tau(Element::from_matrix(f * f.adjoint()));
  DilatedMap dm = dilated_measurement(u, tau, system);
  return JointSetup{dm,
                    embed_apparatus(system, Element::from_matrix(kron(Matrix(0.5 * (y1 + y1.adjoint())), i2.block(0)))),
                    embed_apparatus(system, Element::from_matrix(kron(i1.block(0), Matrix(0.5 * (y2 + y2.adjoint()))))),
                    true};
}

Element random_projection(Rng& rng, const AlgebraShape& shape, bool allow_trivial) {
  Element best = Element::identity(shape);
  for (int attempt = 0; attempt < 32; ++attempt) {
    SpectralDecomposition sd = spectral_decompose(random_hermitian(rng, shape));
    Element p = Element::zero(shape);
    int used = 0;
    for (const auto& q : sd.projections) {
      if (uniform(rng, 0.0, 1.0) < 0.5) {
        p += q;
        ++used;
      }
    }
    best = p;
    if (allow_trivial || (used > 0 && used < static_cast<int>(sd.projections.size()))) return p;
  }
  return best;
}

}  // namespace qmlab
