#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmlab/cp_calculus.hpp"
#include "qmlab/maps.hpp"
#include "qmlab/report.hpp"

namespace qmlab {

// M: B -> A measuring X in A with pointer Y in B. When B = A (x) C is laid
// out as tensor(A, C), `apparatus` records C.
class MeasurementSetup {
 public:
  MeasurementSetup(CPMap map, Element measured, Element pointer,
                   std::optional<AlgebraShape> apparatus = std::nullopt);

  const CPMap& map() const { return map_; }
  const Element& measured() const { return measured_; }
  const Element& pointer() const { return pointer_; }
  const std::optional<AlgebraShape>& apparatus() const { return apparatus_; }
  // ||M(Y) - X||.
  double bias_defect() const { return bias_defect_; }
  bool unbiased() const;

 private:
  CPMap map_;
  Element measured_;
  Element pointer_;
  std::optional<AlgebraShape> apparatus_;
  double bias_defect_;
};

// sigma = ||Y||_M; throws BiasError for a biased setup.
double quality(const MeasurementSetup& s);

struct PerfectVerdict {
  bool perfect = false;
  bool spectral_route = false;
  bool quality_route = false;
  bool routes_agree = false;
  double sigma = 0.0;
  double max_projection_defect = 0.0;
};

// Spectral route: the distinct eigenvalues of X equal the pointer values that
// M does not annihilate, and M(Q) = P for each matching spectral pair.
// Quality route: sigma <= tol. perfect is the spectral verdict.
PerfectVerdict is_perfect(const MeasurementSetup& s, double tol = 1e-9);

struct StructureReport {
  std::vector<BoundReport> items;
  bool pass = true;
};

// Requires ||B||_T <= tol. Checks T(f(B)) = f(T(B)) and ||f(B)||_T ~ 0 for
// monomials of degree <= 6 and spectral indicators, equality of spectra, and
// [T(A), T(B)] = 0 for random A in the commutant of B.
StructureReport structure_check(const CPMap& t, const Element& b, double tol = 1e-9,
                                std::uint64_t seed = 1);

// 2 ||Y1||_M ||Y2||_M >= ||[M(Y1), M(Y2)]|| for commuting pointers.
BoundReport joint_quality_bound(const CPMap& m, const Element& y1, const Element& y2);

// sigma >= d(X, Z)(1 - delta)/sqrt(3 delta). Here lhs is the lower bound and
// rhs is sigma. For delta <= 1e-12 the zero-disturbance verdict applies: it
// passes only when X is central.
BoundReport heisenberg_principle_check(const MeasurementSetup& s, double delta);

struct DisturbanceEstimate {
  double lower = 0.0;
  Vector argmax;
  int block = 0;
  std::string note;
};

// Lower estimate of sup over states of ||T*(rho) - rho||_1 with T(A) = M(A (x) I),
// from a seeded multi-start local search over pure states.
DisturbanceEstimate estimate_disturbance(const CPMap& m, const AlgebraShape& system,
                                         const AlgebraShape& apparatus, int restarts = 64,
                                         std::uint64_t seed = 1);
// ||T*(psi psi^dagger) - psi psi^dagger||_1 for a vector psi in the system space.
double disturbance_at(const CPMap& m, const AlgebraShape& system, const AlgebraShape& apparatus,
                      const Vector& psi);

// sigma >= ||[X, A]|| / (2 ||A||) whenever M(A (x) I) = A; lhs is the bound.
BoundReport local_heisenberg_check(const MeasurementSetup& s, const Element& a);

// Discrete POVM on the abelian algebra of outcomes: M(f) = sum_k f_k E_k.
MeasurementSetup povm_measurement(const std::vector<std::pair<double, Element>>& effects);

// N(f (x) A) = sum_i f(i) P_i A P_i on tensor(abelian(k), A), with pointer
// sum_i x_i e_i (x) I. The outcome factor comes first in this layout.
MeasurementSetup von_neumann_measurement(const Element& x);

std::string to_text(const MeasurementSetup& s);
MeasurementSetup setup_from_text(const std::string& text);

}  // namespace qmlab
