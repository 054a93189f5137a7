#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qmlab/algebra.hpp"

namespace qmlab {

inline constexpr double kDust = 1e-12;

// A normalized positive functional, stored as its density.
class State {
 public:
  // Validates Hermiticity, positivity (min eigenvalue >= -tol) and trace one.
  explicit State(Element density, double tol = 1e-10);

  static State maximally_mixed(const AlgebraShape& shape);
  // Vector state of psi (length total_dim); only the block-diagonal part of
  // |psi><psi| is kept. psi is normalized here.
  static State pure(const AlgebraShape& shape, const Vector& psi);

  const AlgebraShape& shape() const { return density_.shape(); }
  const Element& density() const { return density_; }
  Complex operator()(const Element& a) const;

  // For a rank-one density, the phase-fixed representative vector
  // (first nonzero coordinate real positive); empty otherwise.
  std::optional<Vector> vector(double tol = 1e-9) const;

 private:
  Element density_;
};

Complex expectation(const State& rho, const Element& a);
double variance(const State& rho, const Element& a);
double covariance(const State& rho, const Element& a, const Element& b);

struct ProbabilityTable {
  struct Entry {
    double value;
    double probability;
  };
  std::vector<Entry> entries;

  double total() const;
  double mean() const;
};

struct JointProbabilityTable {
  struct Entry {
    double x;
    double y;
    double probability;
  };
  std::vector<Entry> entries;

  double total() const;
  ProbabilityTable marginal_x() const;
  ProbabilityTable marginal_y() const;
  // Probability of the pair, zero if absent (values compared within tol).
  double at(double x, double y, double tol = 1e-9) const;
};

ProbabilityTable induced_distribution(const State& rho, const Element& x);
JointProbabilityTable joint_distribution(const State& rho, const Element& x, const Element& y);

State reduced_state(const State& rho, const Element& y, double dust = kDust);

struct Interval {
  double lo;
  double hi;
};

// Without a partition, every distinct eigenvalue of x is its own cell.
State collapsed_state(const State& rho, const Element& x,
                      const std::optional<std::vector<Interval>>& partition = std::nullopt);

// Trace-norm distance of two densities (the dual norm of the operator norm).
double state_distance(const State& a, const State& b);

// Structured-text record: the density element plus a "state" marker.
std::string to_text(const State& s);
State state_from_text(const std::string& text);

// psi+ = spin up = e_0, psi- = spin down = e_1 on C^2.
Vector spin_up();
Vector spin_down();

}  // namespace qmlab
