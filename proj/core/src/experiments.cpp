#include "nakao/experiments.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace nakao::experiments {

std::vector<double> SweepConfig::eps_grid() const {
  std::vector<double> grid(eps_count);
  const double ratio = std::log(eps_min / eps_max) / (eps_count - 1);
  for (int k = 0; k < eps_count; ++k) grid[k] = eps_max * std::exp(ratio * k);
  return grid;
}

void SweepConfig::validate() const {
  base.validate();
  if (eps_count < 5) throw std::invalid_argument("eps grid needs at least 5 points");
  if (!(eps_min > 0.0) || !(eps_max > eps_min))
    throw std::invalid_argument("eps grid requires 0 < eps_min < eps_max");
  if (repeats_per_eps < 1) throw std::invalid_argument("repeats_per_eps must be >= 1");
  if (!(slack >= 0.0)) throw std::invalid_argument("slack must be nonnegative");
}

namespace {

SweepPoint run_one(const SweepConfig& cfg, double eps) {
  solver::SimConfig sim = cfg.base;
  sim.params.eps = eps;

  SweepPoint point;
  point.eps = eps;
  for (int rep = 0; rep < cfg.repeats_per_eps; ++rep) {
    const solver::FunctionalTrace trace = solver::run(sim);
    const auto lo = solver::detect_blowup(trace, sim.blowup_threshold);
    const auto hi =
        solver::detect_blowup(trace, sim.blowup_threshold * sim.robustness_factor);

    if (!lo) {
      point.censored = true;
      point.blown_up = false;
      point.robust = false;
      point.T_num.reset();
      return point;  // repeats cannot change a deterministic censored run
    }
    bool robust = false;
    if (hi) robust = std::abs(hi->T_num - lo->T_num) <= 0.05 * lo->T_num;
    if (rep == 0) {
      point.T_num = lo->T_num;
      point.blown_up = true;
      point.robust = robust;
    } else {
      // The solver is deterministic; disagreeing repeats mark the verdict inconclusive.
      if (*point.T_num != lo->T_num) point.robust = false;
    }
  }
  return point;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<double> grid = cfg.eps_grid();
  std::vector<std::future<SweepPoint>> futures;
  futures.reserve(grid.size());
  for (double eps : grid)
    futures.push_back(std::async(std::launch::async, run_one, std::cref(cfg), eps));
  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  for (auto& f : futures) points.push_back(f.get());  // merged in eps order
  return points;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points,
                          double theoretical, double slack) {
  if (points.size() < 4)
    throw std::invalid_argument("power-law fit needs at least 4 uncensored points");

  double sx = 0.0, sy = 0.0;
  const auto n = static_cast<double>(points.size());
  std::vector<std::pair<double, double>> xy;
  xy.reserve(points.size());
  for (const auto& [eps, t] : points) {
    if (!(eps > 0.0) || !(t > 0.0))
      throw std::invalid_argument("power-law fit requires positive eps and T");
    xy.emplace_back(std::log(1.0 / eps), std::log(t));
    sx += xy.back().first;
    sy += xy.back().second;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("degenerate eps grid: all values equal");

  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.theoretical_exponent = theoretical;
  fit.slack = slack;
  fit.consistent = fit.slope <= theoretical + slack;
  fit.points_used = static_cast<int>(points.size());
  return fit;
}

MonotonicityReport check_monotonicity(const std::vector<SweepPoint>& points, double tol) {
  MonotonicityReport rep;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    // Grid is descending in eps; the later (smaller-eps) run should not blow
    // up sooner than the earlier one beyond the noise allowance.
    if (!points[i].T_num || !points[i + 1].T_num) {
      if (points[i + 1].T_num && !points[i].T_num) {
        // Larger eps censored while smaller eps blew up: monotonicity breach.
        rep.monotone = false;
        rep.violations.push_back(static_cast<int>(i));
      }
      continue;
    }
    if (*points[i].T_num > (1.0 + tol) * *points[i + 1].T_num) {
      rep.monotone = false;
      rep.violations.push_back(static_cast<int>(i));
    }
  }
  return rep;
}

}  // namespace nakao::experiments
