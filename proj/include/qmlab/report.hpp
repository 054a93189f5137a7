#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qmlab/text.hpp"

namespace qmlab {

// One proposition check. slack = rhs - lhs unless a check documents a
// different slack (the Cauchy-Schwarz check uses a minimum eigenvalue);
// pass iff slack / scale >= -tolerance.
struct BoundReport {
  std::string proposition;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double scale = 1.0;
  double tolerance = 1e-8;
  bool pass = true;
  // The bound is uninformative here (degenerate gap, dust denominator, ...);
  // such a report never counts as a failure.
  bool vacuous = false;
  std::string digest;
  std::string note;
  std::map<std::string, double> aux;

  double normalized_slack() const { return scale > 0.0 ? slack / scale : slack; }
  // Recomputes pass from slack, scale and tolerance; extra conditions are
  // and-ed in by the caller.
  void evaluate() { pass = vacuous || normalized_slack() >= -tolerance; }
};

BoundReport make_bound(std::string proposition, double lhs, double rhs, double scale,
                       double tolerance = 1e-8);
BoundReport vacuous_bound(std::string proposition, std::string note);

// FNV-1a digest over the serialized inputs of a check.
std::string instance_digest(const std::vector<std::string>& parts);

Json report_to_json(const BoundReport& r);
BoundReport report_from_json(const Json& j);
// Comma-separated header and row for the report fields (aux omitted).
std::string report_csv_header();
std::string report_csv_row(const BoundReport& r);

}  // namespace qmlab
