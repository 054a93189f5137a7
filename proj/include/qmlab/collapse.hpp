#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmlab/maps.hpp"
#include "qmlab/measurement.hpp"
#include "qmlab/report.hpp"

namespace qmlab {

inline constexpr double kGapThreshold = 1e-8;

// |<phi1|A|phi2>| <= (delta + sigma1 + sigma2) / |y1 - y2| * ||A|| with
// y_i, sigma_i^2 the mean and variance of Y in phi_i and delta = ||[A,Y]||/||A||.
// Throws DegenerateGapError when |y1 - y2| <= gap_threshold.
BoundReport coherence_bound(const State& phi1, const State& phi2, const Element& y, const Element& a,
                            double gap_threshold = kGapThreshold);

// Difference between the dilated images of the superposition alpha psi1 + beta psi2
// and of the corresponding mixture, evaluated on A, against the same ratio
// with y_i, sigma_i taken in M*(psi_i).
BoundReport collapse_gap(const DilatedMap& m, const State& psi1, const State& psi2,
                         std::complex<double> alpha, std::complex<double> beta, const Element& y,
                         const Element& a, double gap_threshold = kGapThreshold);

// The certified defect ||M(Q) - P|| = sup over states of |M*(rho)(Q) - rho(P)|.
double reduction_defect(const CPMap& m, const Element& p, const Element& q);

// ||(M* rho)_Q - M*(rho_P)||_1 against sqrt(Delta) / M*(rho)(Q) times
// (1 + 2 sqrt(Delta) + sqrt(1 + (1 + 2 sqrt(Delta))^2)). Delta below the
// certified defect is a PreconditionError.
BoundReport reduction_gap_projection(const DilatedMap& m, const State& rho, const Element& p,
                                     const Element& q, double delta, std::uint64_t seed = 1);

// For quality zero: (M* rho)_Y = M*(rho_X).
BoundReport perfect_reduction_check(const CPMap& m, const State& rho, const Element& x,
                                    const Element& y);

// Finite spanning set of the commutant of a Hermitian Y: matrix units built
// from eigenvectors of Y sharing a block and an eigenvalue cluster.
std::vector<Element> commutant_basis(const Element& y);

// For quality zero: M*(rho) and M*(C*(rho)) agree on the commutant of Y.
BoundReport perfect_collapse_check(const CPMap& m, const State& rho, const Element& x,
                                   const Element& y,
                                   const std::optional<std::vector<Interval>>& partition = std::nullopt);

// ||P([x,x+eps]) M(B) P([y,y+eps])|| <= (delta + 2 sigma + eps)/|x - y| * ||B||.
BoundReport heisenberg_collapse_band_bound(const MeasurementSetup& s, const Element& b, double x,
                                           double y, double eps);

// ||P([x,x+eps]) A P([y,y+eps])|| <= (eps + 2 d(X, Z))/|x - y| * ||A||.
BoundReport almost_classical_band_bound(const Element& a, const Element& x, double xv, double yv,
                                        double eps);

// Main bound plus the variance and projection-pointer corollaries, in that
// order (ids appred, appred-var, appred-proj). Inapplicable variants are
// returned as vacuous reports.
std::vector<BoundReport> generalized_reduction_bound(const MeasurementSetup& s, const State& rho);

struct CruxReport {
  BoundReport bound;
  bool preconditions_hold = false;
  std::vector<std::string> failed_preconditions;
  double pointer_commutator = 0.0;  // ||[Y1, Y2]||
  double sigma2 = 0.0;              // ||Y2||_M
  double preservation_defect = 0.0; // ||M(Y1) - I (x) Y1||
  double bias_defect = 0.0;         // ||M(Y2) - D||
};

// M measures D with pointer Y2 and maps Y1 to target = I (x) Y1. The report
// compares ||[D, target]|| with the rigorous estimate
// ||[Y1,Y2]|| + 2 ||Y1|| sigma2 + 2 ||M(Y1)|| e_D + 2 e_1 ||D||,
// which vanishes when all preconditions hold exactly.
CruxReport pointer_erasure_check(const CPMap& m, const Element& y1, const Element& y2,
                                 const Element& d, const Element& target, double tol1 = 1e-10,
                                 double tol2 = 1e-10);

}  // namespace qmlab
