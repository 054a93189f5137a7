#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmlab/collapse.hpp"
#include "qmlab/locality.hpp"
#include "qmlab/maps.hpp"
#include "qmlab/measurement.hpp"
#include "qmlab/random.hpp"
#include "qmlab/report.hpp"

namespace qmlab {

// Inclusive grid a, a + step, ..., parsed from "a:b:step".
struct EpsGrid {
  double start = 0.0;
  double stop = 0.45;
  double step = 0.05;

  std::vector<double> values() const;
};
EpsGrid parse_eps_grid(const std::string& text);

// The unsharp sigma_z measurement with parameter eps in [0, 1/2):
// M(A (x) d) = d_0 X0 A X0 + d_1 X1 A X1, X0 = diag(sqrt(1-eps), sqrt(eps)),
// X1 = diag(sqrt(eps), sqrt(1-eps)), on the domain tensor(M_2, C^2) with
// pointer (1 - 2 eps)^{-1} I (x) diag(1, -1). A unitary w rotates the system.
CPMap example7_map(double eps, const Matrix& w = Matrix::Identity(2, 2));
MeasurementSetup example7_setup(double eps, const Matrix& w = Matrix::Identity(2, 2));
// Same map realized on M_2 (x) M_2 by U = P0 (x) R0 + P1 (x) R1 and tau = |0><0|,
// with R_k |0> = (X0_kk, X1_kk).
DilatedMap example7_dilation(double eps);
double example7_sigma(double eps);       // 2 sqrt(eps(1-eps)) / (1 - 2 eps)
double example7_disturbance(double eps); // 1 - 2 sqrt(eps(1-eps))
// 2 sqrt(eps(1-eps) / (3 - 6 sqrt(eps(1-eps)))).
double example7_hpdelta_rhs(double eps);

// Measured X = diag(1-eps, eps) with the projection pointer I (x) diag(1, 0)
// on the example-7 map, and the spin-down state.
MeasurementSetup reduction_counterexample_setup(double eps);

// Two-qubit chain preserving S_y and measuring S_x through an 8-outcome
// apparatus; p in (0, 1/2] weighs the off-axis effects. w rotates the system.
MeasurementSetup local_heisenberg_setup(double p = 0.25, const Matrix& w = Matrix::Identity(4, 4));
Element chain_spin(char axis);  // S_axis = (sigma (x) I + I (x) sigma) / 2 on M_4

struct DaviesOptions {
  int n = 2048;
  double half_width = 8.0;
  double kernel_std = 0.5;
};

struct DaviesResult {
  int n = 0;
  double spacing = 0.0;
  double target_variance = 0.0;     // kernel_std^2
  double kernel_variance = 0.0;     // variance of the discretized kernel at the central row
  double interior_sigma2 = 0.0;     // max row variance over the central half of the grid
  double full_sigma2 = 0.0;         // max row variance over the whole grid
  double interior_bias = 0.0;       // max |M(x)_i - x_i| over the central half
  double boundary_bias = 0.0;       // max |M(x)_i - x_i| over the whole grid
  double relative_error = 0.0;      // |interior_sigma2 - target| / target
};

// Blurred position measurement on a uniform grid: effects M(V) = sum_x (f * 1_V)(x) P(x)
// with a row-normalized discretized Gaussian f.
DaviesResult davies_study(const DaviesOptions& opts = {});
// The same construction through povm_measurement (small n only).
MeasurementSetup davies_povm(const DaviesOptions& opts);

struct ScenarioOptions {
  std::optional<EpsGrid> eps;
  std::optional<int> grid;
  std::uint64_t seed = 1;
};

struct ScenarioResult {
  std::string name;
  std::vector<BoundReport> items;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;
  bool pass = true;

  void add(BoundReport r);
};

const std::vector<std::string>& scenario_names();
// Throws ArgumentError for an unknown name.
ScenarioResult run_scenario(const std::string& name, const ScenarioOptions& opts = {});

Json scenario_to_json(const ScenarioResult& r);
std::string scenario_to_csv(const ScenarioResult& r);

struct SigmaRow {
  double eps = 0.0;
  double sigma = 0.0;
  double closed_form = 0.0;
  double hpdelta_rhs = 0.0;
  double reduction_gap = 0.0;
};

// Throws ArgumentError for eps outside [0, 1/2).
std::vector<SigmaRow> sigma_curve(const std::vector<double>& eps);
std::string sigma_curve_csv(const std::vector<SigmaRow>& rows);

}  // namespace qmlab
