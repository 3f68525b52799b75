#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "nakao/experiments.hpp"
#include "test_support.hpp"

using namespace nakao;
using nakao::testsupport::rel_err;

namespace {

experiments::SweepConfig tiny_sweep(double eps_min, double eps_max, double t_max, int nx) {
  experiments::SweepConfig cfg;
  cfg.base.params = ProblemParams{2.0, 2.0, 1, 1.0, 0.5};
  cfg.base.nx = nx;
  cfg.base.t_max = t_max;
  cfg.base.track_every = 8;
  cfg.eps_count = 5;
  cfg.eps_min = eps_min;
  cfg.eps_max = eps_max;
  return cfg;
}

}  // namespace

TEST_CASE("eps grid construction") {
  const auto cfg = tiny_sweep(0.2, 0.8, 1.0, 256);
  const auto grid = cfg.eps_grid();
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == doctest::Approx(0.8));
  CHECK(grid.back() == doctest::Approx(0.2));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    CHECK(grid[k] < grid[k - 1]);
    // geometric: constant ratio
    CHECK(rel_err(grid[k] / grid[k - 1], grid[1] / grid[0]) < 1e-12);
  }

  auto bad = cfg;
  bad.eps_count = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.eps_min = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("power-law fit on exact data") {
  std::vector<std::pair<double, double>> pts;
  for (double eps : {0.8, 0.6, 0.4, 0.3, 0.2}) pts.emplace_back(eps, std::pow(eps, -3.0));
  const auto fit = experiments::fit_power_law(pts, 3.0);
  CHECK(std::abs(fit.slope - 3.0) < 1e-10);
  CHECK(std::abs(fit.intercept) < 1e-10);
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.consistent);
  CHECK(fit.points_used == 5);
}

TEST_CASE("power-law fit on noisy data") {
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<std::pair<double, double>> pts;
  for (double eps = 0.8; eps >= 0.1; eps *= 0.8)
    pts.emplace_back(eps, 5.0 * std::pow(eps, -3.0) * (1.0 + 0.02 * noise(rng)));
  const auto fit = experiments::fit_power_law(pts, 3.0);
  CHECK(fit.slope > 2.8);
  CHECK(fit.slope < 3.2);
  CHECK(fit.r_squared > 0.99);
}

TEST_CASE("fit consistency is one-sided") {
  std::vector<std::pair<double, double>> pts;
  for (double eps : {0.8, 0.6, 0.4, 0.3, 0.2}) pts.emplace_back(eps, std::pow(eps, -5.0));
  const auto fit = experiments::fit_power_law(pts, 3.0, 0.5);
  CHECK(fit.slope > 3.5);
  CHECK_FALSE(fit.consistent);  // exceeding the bound flags inconsistency, nothing more

  // a shallower-than-theoretical slope stays consistent (the bound is upper)
  std::vector<std::pair<double, double>> shallow;
  for (double eps : {0.8, 0.6, 0.4, 0.3, 0.2}) shallow.emplace_back(eps, std::pow(eps, -1.5));
  CHECK(experiments::fit_power_law(shallow, 3.0, 0.5).consistent);
}

TEST_CASE("fit input validation") {
  std::vector<std::pair<double, double>> few{{0.8, 2.0}, {0.4, 8.0}, {0.2, 64.0}};
  CHECK_THROWS_AS(experiments::fit_power_law(few, 3.0), std::invalid_argument);
  std::vector<std::pair<double, double>> degenerate{
      {0.5, 2.0}, {0.5, 2.1}, {0.5, 1.9}, {0.5, 2.0}};
  CHECK_THROWS_AS(experiments::fit_power_law(degenerate, 3.0), std::invalid_argument);
}

TEST_CASE("monotonicity checker") {
  auto mk = [](double eps, double t) {
    experiments::SweepPoint p;
    p.eps = eps;
    p.T_num = t;
    p.blown_up = true;
    return p;
  };
  std::vector<experiments::SweepPoint> good{mk(0.8, 2.0), mk(0.4, 8.0), mk(0.2, 60.0)};
  CHECK(experiments::check_monotonicity(good).monotone);

  std::vector<experiments::SweepPoint> bad{mk(0.8, 9.0), mk(0.4, 8.0), mk(0.2, 60.0)};
  const auto rep = experiments::check_monotonicity(bad);
  CHECK_FALSE(rep.monotone);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0] == 0);

  // larger eps censored while smaller eps blew up is also a breach
  std::vector<experiments::SweepPoint> censored{mk(0.8, 2.0), mk(0.4, 8.0), mk(0.2, 60.0)};
  censored[1].T_num.reset();
  censored[1].blown_up = false;
  censored[1].censored = true;
  CHECK_FALSE(experiments::check_monotonicity(censored).monotone);
}

TEST_CASE("all-censored sweep") {
  const auto cfg = tiny_sweep(0.2, 0.4, 1.0, 256);  // horizon too short for any blow-up
  const auto points = experiments::run_sweep(cfg);
  REQUIRE(points.size() == 5);
  for (const auto& p : points) {
    CHECK(p.censored);
    CHECK_FALSE(p.blown_up);
    CHECK_FALSE(p.T_num.has_value());
  }
}

TEST_CASE("sweep determinism and a large-data blow-up sweep") {
  const auto cfg = tiny_sweep(0.5, 0.9, 25.0, 512);
  const auto a = experiments::run_sweep(cfg);
  const auto b = experiments::run_sweep(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].eps == b[k].eps);
    REQUIRE(a[k].T_num.has_value());
    REQUIRE(b[k].T_num.has_value());
    CHECK(*a[k].T_num == *b[k].T_num);  // bitwise: the pipeline is deterministic
    CHECK(a[k].blown_up);
    CHECK(a[k].robust);
  }
  CHECK(experiments::check_monotonicity(a).monotone);

  std::vector<std::pair<double, double>> pts;
  for (const auto& p : a) pts.emplace_back(p.eps, *p.T_num);
  const auto fit = experiments::fit_power_law(pts, 3.0, 0.5);
  CHECK(fit.consistent);
  CHECK(fit.slope < 3.5);
}

TEST_CASE("repeats are tolerated and cannot flip a deterministic verdict") {
  auto cfg = tiny_sweep(0.5, 0.9, 25.0, 512);
  cfg.repeats_per_eps = 2;
  const auto points = experiments::run_sweep(cfg);
  for (const auto& p : points) CHECK(p.robust);
}
