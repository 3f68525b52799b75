#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nakao/solver.hpp"

namespace nakao::experiments {

struct SweepConfig {
  solver::SimConfig base;
  int eps_count = 7;
  double eps_min = 0.2;
  double eps_max = 0.8;
  int repeats_per_eps = 1;  ///< duplicate runs; determinism cross-check
  double slack = 0.5;       ///< consistency margin on the fitted slope

  /// Strictly decreasing geometric grid from eps_max down to eps_min.
  std::vector<double> eps_grid() const;
  void validate() const;
};

struct SweepPoint {
  double eps = 0.0;
  std::optional<double> T_num;  ///< absent when censored
  bool blown_up = false;
  bool robust = false;   ///< both thresholds crossed with T_num agreeing within 5%
  bool censored = false; ///< horizon reached without triggering blow-up
};

/// One verdict per eps, in grid (descending) order regardless of execution
/// order. Runs are independent and may execute concurrently.
std::vector<SweepPoint> run_sweep(const SweepConfig& cfg);

struct PowerLawFit {
  double slope = 0.0;      ///< empirical lifespan exponent
  double intercept = 0.0;
  double r_squared = 0.0;
  double theoretical_exponent = 0.0;
  bool consistent = false;  ///< slope <= theoretical + slack (one-sided: the bound has a free constant)
  double slack = 0.5;
  int points_used = 0;
};

/// Least squares of log T against log(1/eps). Requires >= 4 points and a
/// non-degenerate eps grid.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points,
                          double theoretical, double slack = 0.5);

struct MonotonicityReport {
  bool monotone = true;
  std::vector<int> violations;  ///< indices i where T(eps_i) > (1+tol) T(eps_{i+1})
};

/// T_num should not increase with eps (larger data blows up sooner), up to
/// the given relative noise. Violations flag resolution problems.
MonotonicityReport check_monotonicity(const std::vector<SweepPoint>& points, double tol = 0.05);

}  // namespace nakao::experiments
