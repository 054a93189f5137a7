#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmlab/algebra.hpp"
#include "qmlab/report.hpp"
#include "qmlab/text.hpp"

namespace qmlab {

struct SuiteConfig {
  std::vector<std::string> suites;
  // Applies to every suite when set; otherwise per_suite_trials, then the default.
  std::optional<int> trials;
  std::map<std::string, int> per_suite_trials;
  std::uint64_t seed = 7;
  std::vector<AlgebraShape> shapes;     // system menu
  std::vector<AlgebraShape> apparatus;  // apparatus menu
  // Keyed by proposition id.
  std::map<std::string, double> tolerance_overrides;
  // Harness self-test: every report of this suite gets rhs -> -rhs - scale.
  std::string inject_bug;
  unsigned threads = 0;
};

// The default menus: {M2, M3, M2+M2, M2+M3} and {M2, M3}.
SuiteConfig default_suite_config();

const std::vector<std::string>& suite_ids();
int default_trials(const std::string& suite);
// Expands "all" and comma-separated lists; throws ConfigError for unknown ids.
std::vector<std::string> parse_suite_list(const std::string& text);

// Reports of one trial, each tagged with the trial seed. Exceptions other than
// configuration errors become a failing report carrying the message.
std::vector<BoundReport> run_trial(const std::string& suite, std::uint64_t seed, const SuiteConfig& cfg);

struct SuiteSummary {
  std::string suite;
  int trials = 0;
  int checks = 0;
  int passed = 0;
  int failed = 0;
  int vacuous = 0;
  double worst_normalized_slack = 0.0;
  std::string worst_proposition;
  std::uint64_t worst_seed = 0;
  std::vector<BoundReport> failures;
};

struct RunReport {
  SuiteConfig config;
  std::vector<SuiteSummary> suites;

  bool pass() const;
};

RunReport run_suite(const SuiteConfig& cfg);

Json run_report_to_json(const RunReport& r);
std::string run_report_csv(const RunReport& r);

// Manifest: {"seed": 7, "threads": 0, "shapes": [[2], [2, 3]], "apparatus": [[2]],
// "suites": [{"id": "cs", "trials": 100, "tolerances": {"cs": 1e-8}}]}.
SuiteConfig suite_config_from_text(const std::string& text);

}  // namespace qmlab
