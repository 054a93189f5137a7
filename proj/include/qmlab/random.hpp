#pragma once

#include <cstdint>
#include <vector>

#include "qmlab/maps.hpp"
#include "qmlab/measurement.hpp"
#include "qmlab/rng.hpp"

namespace qmlab {

// Gaussian Kraus operators respecting the block structure, right-normalized
// by S^{-1/2} with S = sum K^dagger K. Extra Kraus operators are added until
// every codomain block receives enough rows for S to be invertible; draws with
// min eig(S) < 1e-8 are redrawn (bounded retries).
CPMap random_cpmap(const AlgebraShape& domain, const AlgebraShape& codomain, int kraus_rank,
                   std::uint64_t seed);

struct DilatedSetup {
  DilatedMap dilation;
  MeasurementSetup setup;
  Element apparatus_pointer;  // Y on the apparatus; setup.pointer() = I (x) Y
};

// Block-Haar unitary on A (x) B, random apparatus state and random Hermitian
// apparatus pointer; the measured observable is X = M(I (x) Y).
DilatedSetup random_dilated_setup(const AlgebraShape& a, const AlgebraShape& b, std::uint64_t seed);
// Same construction with a caller-supplied apparatus pointer.
DilatedSetup dilated_setup(const Element& u, const State& tau, const AlgebraShape& system,
                           const Element& apparatus_pointer);

struct PerfectSetup {
  DilatedSetup dilated;
  std::vector<double> values;          // distinct outcome values y_k
  std::vector<Element> projections;    // P_k on the system
  std::vector<Element> pointer_projections;  // I (x) Q_k on system (x) apparatus
};

// Perfect dilated measurement of X = sum_k y_k P_k on `system` (1 <= outcomes
// <= total dim) with apparatus M_m, m = outcomes * group: U = sum_k P_k (x) W_k
// with W_k carrying the support of tau into the range of Q_k.
PerfectSetup random_perfect_setup(Rng& rng, const AlgebraShape& system, int outcomes, int tau_rank = 1);

// Replaces U by U exp(i eta H) for a random Hermitian H of norm one, keeping
// tau and the apparatus pointer; X is recomputed so the setup stays unbiased.
DilatedSetup perturb_setup(Rng& rng, const DilatedSetup& s, double eta);

struct JointSetup {
  DilatedMap dilation;
  Element y1;  // pointers on system (x) apparatus, commuting
  Element y2;
  bool perfect = false;
};

// Two commuting pointers Y1 (x) I and I (x) Y2 on the apparatus B1 (x) B2.
// perfect: the dilation is sum_k P_k (x) W_k (x) W'_k so both qualities vanish.
JointSetup random_joint_setup(Rng& rng, const AlgebraShape& system, int m1, int m2, bool perfect);

// Random spectral projection of a random Hermitian element (possibly 0 or I
// when allow_trivial).
Element random_projection(Rng& rng, const AlgebraShape& shape, bool allow_trivial = false);

}  // namespace qmlab
