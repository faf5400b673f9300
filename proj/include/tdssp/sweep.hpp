#pragma once

#include <string>
#include <vector>

#include "tdssp/tableaux.hpp"

// Total-variation CFL sweep for explicit methods on the upwind advection
// problem: integrate the step initial condition for a fixed number of steps
// at each lambda = dt/dx over a grid, record the maximal TV rises, and
// refine the observed threshold lambda_obs by bisection.

namespace tdssp {

struct SweepOptions {
  double dx = 1.0 / 1600.0;
  int steps = 50;
  double lambda_min = 0.05;
  double lambda_max = 2.0;
  double lambda_step = 0.0025;
  double refine = 1e-4;
  double rise_tol = 1e-10;
  int threads = 0;  // 0 = hardware concurrency
};

struct SweepRow {
  double lambda = 0.0;
  double max_rise_per_step = 0.0;
  double max_rise_from_initial = 0.0;
};

struct SweepResult {
  std::string method;
  std::vector<SweepRow> rows;
  /// sup of lambdas with per-step rise <= rise_tol, bisection-refined
  /// between the last non-rising and first rising grid points; 0 when the
  /// first grid point already rises.
  double lambda_obs = 0.0;
};

/// Runs the sweep; throws std::invalid_argument for methods that are not
/// explicit one-step tableaux (class mismatch).  Lambda points are evaluated
/// in a parallel map and reduced in grid order, so the output is
/// reproducible regardless of thread count.
SweepResult tv_sweep(const MethodSpec& spec, const SweepOptions& opts = {});

/// CSV with a '#'-prefixed schema header and a lambda_obs summary line.
std::string sweep_csv(const SweepResult& result, const SweepOptions& opts);

}  // namespace tdssp
