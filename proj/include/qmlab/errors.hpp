#pragma once

#include <stdexcept>
#include <string>

namespace qmlab {

// Block dimensions of two operands do not agree, or a shape is malformed.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input lies outside the mathematical domain of an operation
// (non-Hermitian where Hermitian is required, non-PSD density, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommutationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UndefinedReductionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateGapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class BiasError : public std::runtime_error {
 public:
  BiasError(const std::string& what, double defect)
      : std::runtime_error(what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qmlab
