#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qmlab/algebra.hpp"
#include "qmlab/states.hpp"
#include "qmlab/text.hpp"

namespace qmlab {

// A unital completely positive map M: B -> A in the Heisenberg picture,
// held in operator-sum form M(X) = sum_i K_i^dagger X K_i. Each K_i is a
// dense (dim B) x (dim A) matrix; domain() is B and codomain() is A.
class CPMap {
 public:
  // Validates dimensions, unitality (sum K^dagger K = I within tol) and that
  // block-diagonal inputs land in the block structure of the codomain.
  CPMap(AlgebraShape domain, AlgebraShape codomain, std::vector<Matrix> kraus, double tol = 1e-10);

  static CPMap identity(const AlgebraShape& shape);
  // X -> U^dagger X U for a unitary element U.
  static CPMap conjugation(const Element& u);

  const AlgebraShape& domain() const { return domain_; }
  const AlgebraShape& codomain() const { return codomain_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  Element apply(const Element& b) const;
  // Linear extension of the dual action to arbitrary codomain elements:
  // d -> projection onto the domain blocks of sum_i K_i d K_i^dagger.
  Element dual_linear(const Element& d) const;
  State dual(const State& rho) const;
  double unitality_defect() const;

 private:
  AlgebraShape domain_;
  AlgebraShape codomain_;
  std::vector<Matrix> kraus_;
};

Element apply_heisenberg(const CPMap& m, const Element& b);
State dual_apply(const CPMap& m, const State& rho);

// A candidate linear map between algebras, not assumed to be CP.
class LinearMap {
 public:
  LinearMap(AlgebraShape domain, AlgebraShape codomain, std::function<Element(const Element&)> fn);

  static LinearMap from_cpmap(const CPMap& m);
  // images[k] is the image of the k-th matrix unit, enumerated block by
  // block and row-major inside each block.
  static LinearMap from_table(const AlgebraShape& domain, const AlgebraShape& codomain,
                              std::vector<Element> images);
  static LinearMap transpose(const AlgebraShape& shape);

  const AlgebraShape& domain() const { return domain_; }
  const AlgebraShape& codomain() const { return codomain_; }
  Element operator()(const Element& b) const;

 private:
  AlgebraShape domain_;
  AlgebraShape codomain_;
  std::function<Element(const Element&)> fn_;
};

// One Choi block per domain block i: sum_{a,b} E_ab (x) M(E^(i)_ab) as a dense
// (n_i * dim A) square matrix. The map is CP iff every block is PSD.
std::vector<Matrix> choi_blocks(const LinearMap& m);
std::vector<Matrix> choi_blocks(const CPMap& m);
std::string choi_digest(const CPMap& m);
// max over blocks of the operator-norm distance of Choi blocks.
double choi_distance(const CPMap& a, const CPMap& b);
bool maps_equal(const CPMap& a, const CPMap& b, double tol = 1e-10);

struct CPVerdict {
  bool positive = false;
  double min_choi_eigenvalue = 0.0;
  double unitality_defect = 0.0;
};

CPVerdict is_completely_positive(const LinearMap& m, double tol = 1e-9);
CPVerdict is_completely_positive(const CPMap& m, double tol = 1e-9);

CPMap tensor_with_identity(int n, const CPMap& m);
// The map X -> first(second(X)); second.codomain() must equal first.domain().
CPMap compose(const CPMap& first, const CPMap& second);

// Placement helpers for A (x) B laid out as tensor(A, B).
Element embed_system(const Element& a, const AlgebraShape& apparatus);
Element embed_apparatus(const AlgebraShape& system, const Element& b);
Element partial_trace_apparatus(const Element& d, const AlgebraShape& system,
                                const AlgebraShape& apparatus);
Element partial_trace_system(const Element& d, const AlgebraShape& system,
                             const AlgebraShape& apparatus);
// The vector a (x) b with coordinates in tensor-shape order.
Vector kron_vector(const Vector& a, const Vector& b, const AlgebraShape& s, const AlgebraShape& t);

// A measurement realized by a unitary U on A (x) B and an apparatus state tau:
// M(D) = (id (x) tau)(U^dagger D U).
struct DilatedMap {
  AlgebraShape system;
  AlgebraShape apparatus;
  Element unitary;
  State apparatus_state;
  CPMap map;
};

DilatedMap dilated_measurement(const Element& u, const State& tau, const AlgebraShape& system);

std::string to_text(const CPMap& m);
CPMap cpmap_from_text(const std::string& text);
Json cpmap_to_json(const CPMap& m);
CPMap cpmap_from_json(const Json& j);

}  // namespace qmlab
