// Runs every acceptance criterion at its stated tolerance and runtime budget
// and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "qmlab/collapse.hpp"
#include "qmlab/cp_calculus.hpp"
#include "qmlab/locality.hpp"
#include "qmlab/scenarios.hpp"
#include "qmlab/suites.hpp"

#ifndef QMLAB_EXE
#error "QMLAB_EXE must name the qmlab executable"
#endif

using namespace qmlab;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> eps_grid() { return EpsGrid{}.values(); }

Outcome criterion_quality() {
  double worst = 0.0;
  for (double eps : eps_grid()) {
    const MeasurementSetup s = example7_setup(eps);
    const double sigma = std::sqrt(std::max(0.0, max_eigenvalue(cs_form(s.map(), s.pointer(), s.pointer()))));
    worst = std::max({worst, std::abs(sigma - example7_sigma(eps)), std::abs(quality(s) - example7_sigma(eps))});
  }
  return {worst <= 1e-9, "max |sigma - closed form| = " + fmt("%.3g", worst)};
}

Outcome criterion_hpdelta() {
  double worst = 0.0;
  bool ok = true;
  for (double eps : eps_grid()) {
    if (eps == 0.0) {
      // Delta = 1 here and the bound degenerates to zero.
      worst = std::max(worst, std::abs(example7_hpdelta_rhs(eps)));
      continue;
    }
    const BoundReport r = heisenberg_principle_check(example7_setup(eps), example7_disturbance(eps));
    ok = ok && r.pass && distance_to_center(pauli_z()).distance == 1.0;
    worst = std::max(worst, std::abs(r.lhs - example7_hpdelta_rhs(eps)));
  }
  return {ok && worst <= 1e-9, "bound holds on the grid; max |rhs - closed form| = " + fmt("%.3g", worst)};
}

Outcome criterion_counterexample() {
  double worst = 0.0, worst_full = 0.0;
  int points = 0;
  for (double eps : eps_grid()) {
    if (eps == 0.0) continue;
    const MeasurementSetup s = reduction_counterexample_setup(eps);
    const State down = State::pure(AlgebraShape::full(2), spin_down());
    const State a = reduced_state(s.map().dual(down), s.pointer());
    const State b = s.map().dual(reduced_state(down, s.measured()));
    const double full = state_distance(a, b);
    worst = std::max(worst, std::abs(0.5 * full - (1.0 - eps)));
    worst_full = std::max(worst_full, std::abs(full - 2.0 * (1.0 - eps)));
    ++points;
  }
  bool undefined_at_zero = false;
  try {
    const MeasurementSetup s = reduction_counterexample_setup(0.0);
    (void)reduced_state(State::pure(AlgebraShape::full(2), spin_down()), s.measured());
  } catch (const UndefinedReductionError&) {
    undefined_at_zero = true;
  }
  return {worst <= 1e-12 && worst_full <= 1e-12 && undefined_at_zero,
          "max |trace distance - (1 - eps)| = " + fmt("%.3g", worst) + ", max |trace norm - 2(1 - eps)| = " +
              fmt("%.3g", worst_full) + " over " + std::to_string(points) +
              " points; eps = 0 excluded, the reduction is undefined there"};
}

Outcome criterion_cnot_two_bit() {
  const CnotSetup c = cnot_setup();
  const double bias = (c.dilation.map.apply(embed_apparatus(AlgebraShape::full(2), pauli_z())) - pauli_z()).operator_norm();
  const ScenarioResult cnot = run_scenario("cnot");
  const ScenarioResult two = run_scenario("two-bit");
  double off = 0.0, diag = 0.0, red = 0.0;
  for (const auto& r : two.items) {
    if (r.proposition == "two-bit-off-diagonal") off = r.lhs;
    if (r.proposition == "two-bit-diagonal") diag = r.lhs;
    if (r.proposition == "two-bit-reduction") red = r.lhs;
  }
  const bool ok = bias <= 1e-12 && cnot.pass && two.pass && off <= 1e-12 && diag <= 1e-12 && red <= 1e-10;
  return {ok, "bias " + fmt("%.2g", bias) + ", off-diagonal " + fmt("%.2g", off) + ", diagonal " +
                  fmt("%.2g", diag) + ", reduction " + fmt("%.2g", red)};
}

Outcome suite_outcome(const std::vector<std::string>& ids, int min_trials = 0,
                      std::optional<int> trials = std::nullopt) {
  SuiteConfig cfg = default_suite_config();
  cfg.suites = ids;
  cfg.trials = trials;
  const RunReport r = run_suite(cfg);
  bool ok = r.pass();
  std::string detail;
  for (const auto& s : r.suites) {
    ok = ok && s.trials >= min_trials && s.worst_normalized_slack >= -1e-8;
    detail += s.suite + ": " + std::to_string(s.trials) + " trials, " + std::to_string(s.failed) +
              " failed, worst " + fmt("%.2g", s.worst_normalized_slack) + "; ";
  }
  if (!detail.empty()) detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome criterion_locality() {
  Outcome o = suite_outcome({"corzel"});
  double worst = 0.0;
  for (int n = 2; n <= 8; ++n) {
    const LocalAlgebra chain = LocalAlgebra::uniform(n, 2);
    for (int site = 0; site < n; ++site) {
      const BoundReport r = commutator_bounds(chain, spin_average(chain, 'z'), make_local(chain, {site}, pauli_x().block(0)));
      worst = std::max({worst, std::abs(r.lhs - 2.0 / n), std::abs(r.rhs - 2.0 / n)});
    }
  }
  o.ok = o.ok && worst <= 1e-10;
  o.detail += "; max |[S_z, sigma_x] - 2/N| = " + fmt("%.2g", worst);
  return o;
}

Outcome criterion_davies() {
  DaviesOptions o;
  o.n = 2048;
  const DaviesResult r = davies_study(o);
  const bool ok = r.interior_bias <= 1e-9 * o.half_width && r.relative_error <= 1e-3;
  return {ok, "interior bias " + fmt("%.2g", r.interior_bias) + ", boundary bias " + fmt("%.2g", r.boundary_bias) +
                  ", relative sigma^2 error " + fmt("%.2g", r.relative_error)};
}

Outcome criterion_center_distance() {
  const std::vector<AlgebraShape> shapes = {AlgebraShape::full(2), AlgebraShape::full(3),
                                            AlgebraShape({2, 2}), AlgebraShape({2, 3}),
                                            AlgebraShape({1, 3}), AlgebraShape({3, 1, 2})};
  double above = 0.0, below = 0.0, witness = 0.0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(derive_seed(2024, static_cast<std::uint64_t>(t)));
    const Element x = random_hermitian(rng, shapes[static_cast<std::size_t>(t) % shapes.size()]);
    const CenterDistance d = distance_to_center(x);
    double best = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const Element a = random_element(rng, x.shape());
      best = std::max(best, commutator(x, a).operator_norm() / (2.0 * a.operator_norm()));
    }
    const double w = commutator(x, d.witness).operator_norm() / (2.0 * d.witness.operator_norm());
    best = std::max(best, w);
    above = std::max(above, best - d.distance);
    below = std::max(below, d.distance - best);
    witness = std::max(witness, std::abs(w - d.distance));
  }
  return {above <= 1e-6 && below <= 1e-6 && witness <= 1e-9,
          "brute force exceeds formula by " + fmt("%.2g", above) + ", falls short by " + fmt("%.2g", below) +
              ", witness defect " + fmt("%.2g", witness)};
}

Outcome criterion_crux() {
  const ScenarioResult r = run_scenario("crux");
  double worst = -1.0;
  bool ok = r.pass;
  for (const auto& item : r.items)
    if (item.proposition == "crux") worst = std::max(worst, item.lhs / item.scale);
  Outcome suite = suite_outcome({"crux"}, 50, 50);
  ok = ok && worst >= 0.0 && worst <= 1e-9 && suite.ok;
  return {ok, "exact construction ||[D, I (x) Y1]|| / scale = " + fmt("%.2g", worst) + "; " + suite.detail};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_determinism() {
  const std::string exe = QMLAB_EXE;
  const std::string a = "acceptance_run_a.json", b = "acceptance_run_b.json";
  const int ra = std::system((exe + " verify --suite all --seed 7 --report " + a + " 2>/dev/null").c_str());
  const int rb = std::system((exe + " verify --suite all --seed 7 --threads 1 --report " + b + " 2>/dev/null").c_str());
  const std::string ta = slurp(a), tb = slurp(b);
  const bool same = !ta.empty() && ta == tb;
  return {same && ra == 0 && rb == 0, std::string(same ? "byte-identical" : "reports differ") + " (" +
                                          std::to_string(ta.size()) + " bytes, exit codes " +
                                          std::to_string(ra) + "/" + std::to_string(rb) + ")"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "unsharp-family quality", 1.0, criterion_quality},
      {2, "hpdelta consistency", 1.0, criterion_hpdelta},
      {3, "reduction counterexample", 1.0, criterion_counterexample},
      {4, "cnot and two-bit scenarios", 5.0, criterion_cnot_two_bit},
      {5, "Cauchy-Schwarz suite", 60.0, [] { return suite_outcome({"cs"}, 1000); }},
      {6, "joint-measurement suite", 60.0, [] { return suite_outcome({"jm"}, 500); }},
      {7, "collapse and reduction suites", 300.0,
       [] {
         return suite_outcome({"vectorredux", "snarklop2", "redrumdelta", "collapsedelta", "almost-classical",
                               "appred", "reduction", "collapse"},
                              300);
       }},
      {8, "locality suite", 60.0, criterion_locality},
      {9, "blurred position measurement", 10.0, criterion_davies},
      {10, "distance-to-center oracle", 60.0, criterion_center_distance},
      {11, "pointer erasure", 1.0, criterion_crux},
      {12, "determinism", 0.0, criterion_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds <= 0.0 || secs < c.budget_seconds;
    const bool ok = o.ok && in_time;
    if (!ok) ++failed;
    std::string budget = c.budget_seconds > 0.0 ? " < " + fmt("%g", c.budget_seconds) + " s" : "";
    std::printf("criterion %2d %s  %-30s %.2f s%s%s | %s\n", c.id, ok ? "PASS" : "FAIL", c.name, secs,
                budget.c_str(), in_time ? "" : " (over budget)", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
