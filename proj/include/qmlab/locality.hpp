#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qmlab/maps.hpp"
#include "qmlab/measurement.hpp"
#include "qmlab/report.hpp"
#include "qmlab/text.hpp"

namespace qmlab {

inline constexpr std::size_t kDefaultSizeGuard = std::size_t{1} << 14;

// Dense-dimension cap: QMLAB_SIZE_GUARD if set (a positive integer), else 2^14.
std::size_t size_guard();

// A chain of N atoms, atom i carrying the full matrix algebra M_{d_i}.
class LocalAlgebra {
 public:
  explicit LocalAlgebra(std::vector<int> atom_dims);
  static LocalAlgebra uniform(int sites, int dim);

  int sites() const { return static_cast<int>(dims_.size()); }
  int atom_dim(int site) const { return dims_.at(static_cast<std::size_t>(site)); }
  const std::vector<int>& atom_dims() const { return dims_; }
  // Product of the atom dimensions, saturating at SIZE_MAX.
  std::size_t dense_dim() const { return dense_; }
  // Throws SizeGuardError when dense_dim() exceeds size_guard().
  void require_dense(const char* where) const;
  AlgebraShape shape() const;

 private:
  std::vector<int> dims_;
  std::size_t dense_;
};

// An operator acting on the sorted sites in `support` (identity elsewhere);
// factor is a matrix on the tensor product of the supported atoms, in site order.
struct LocalElement {
  std::vector<int> support;
  Matrix factor;

  int locality() const { return static_cast<int>(support.size()); }
  double norm() const;
};

LocalElement make_local(const LocalAlgebra& chain, std::vector<int> support, Matrix factor);
Element embed(const LocalAlgebra& chain, const LocalElement& e);

// Y = (1/M) sum_k Y^{i_k} with Y^{i_k} Hermitian on atom i_k.
struct GlobalObservable {
  std::vector<int> sites;
  std::vector<Matrix> terms;

  int count() const { return static_cast<int>(sites.size()); }
  // max_k ||Y^{i_k}|| / M.
  double kappa() const;
  // max_k ||Y^{i_k}||.
  double term_bound() const;
};

GlobalObservable make_global(const LocalAlgebra& chain, std::vector<int> sites, std::vector<Matrix> terms);
// (1/N) sum_i sigma_axis^(i) over all sites of a qubit chain; axis is 'x', 'y' or 'z'.
GlobalObservable spin_average(const LocalAlgebra& chain, char axis);
Element global_realize(const LocalAlgebra& chain, const GlobalObservable& g);

// ||[Y, A]|| <= 2 n kappa ||A|| for n-local A.
BoundReport commutator_bounds(const LocalAlgebra& chain, const GlobalObservable& g, const LocalElement& a);
// ||[Y, Y']|| <= 2 kappa y' for global Y' with term norms bounded by y'.
BoundReport commutator_bounds(const LocalAlgebra& chain, const GlobalObservable& g,
                              const GlobalObservable& a);

// Vector state on a chain stored as one factor per site.
struct ProductState {
  std::vector<Vector> factors;

  Vector dense() const;
};

ProductState make_product_state(const LocalAlgebra& chain, std::vector<Vector> factors);

// |<a phi1 + b phi2| A |a phi1 + b phi2> - |a|^2 <phi1|A|phi1> - |b|^2 <phi2|A|phi2>|
// against (2 n kappa + sigma1 + sigma2)/|y1 - y2| ||A||. A gap below the
// threshold gives a vacuous report.
BoundReport corzel_check(const LocalAlgebra& chain, const Vector& phi1, const Vector& phi2,
                         const GlobalObservable& g, const LocalElement& a, std::complex<double> alpha,
                         std::complex<double> beta);
// Global variant with (2 kappa + sigma1 + sigma2)/|y1 - y2| y'.
BoundReport corzel_check(const LocalAlgebra& chain, const Vector& phi1, const Vector& phi2,
                         const GlobalObservable& g, const GlobalObservable& a,
                         std::complex<double> alpha, std::complex<double> beta);

// The controlled-not measurement of sigma_z on M_2 with apparatus M_2 in psi+.
struct CnotSetup {
  Element unitary;
  DilatedMap dilation;
  MeasurementSetup setup;
};
CnotSetup cnot_setup();

struct ScenarioReport {
  std::vector<BoundReport> items;
  bool pass = true;

  void add(BoundReport r);
};

// M(I (x) sigma_z) = sigma_z, perfection, and coherence retained on the
// back-rotated sigma_x.
ScenarioReport hepp_cnot_scenario();

struct TwoBitReport {
  JointProbabilityTable table;
  double max_off_diagonal = 0.0;
  double diagonal_defect = 0.0;
  BoundReport reduction;
  bool pass = true;
};

// Two controlled-nots copy sigma_z of M_2 into two apparatus bits.
DilatedMap two_bit_dilation();
TwoBitReport two_bit_scenario(const State& rho);

// Chain scenario read from a structured-text record:
// {"N": 4, "atom_dims": [2, 2, 2, 2], "pointer": {...}, "observable": {...},
//  "states": [{...}, {...}], "alpha": [re, im], "beta": [re, im]}.
// Observables: {"kind": "global", "sites": [...], "terms": ["sz", ...]} or
// {"kind": "local", "sites": [...], "factor": <matrix>}; single-site terms may
// be named sx, sy, sz or given as matrices. States: {"factors": ["up", "down",
// "+x", "-x" or [[re, im], ...]]}.
struct ChainConfig {
  LocalAlgebra chain;
  GlobalObservable pointer;
  bool observable_is_global = false;
  GlobalObservable global_observable;
  LocalElement local_observable;
  ProductState phi1;
  ProductState phi2;
  std::complex<double> alpha;
  std::complex<double> beta;
};

ChainConfig chain_config_from_text(const std::string& text);
std::vector<BoundReport> run_chain(const ChainConfig& cfg);

}  // namespace qmlab
