#include "nakao/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nakao::testfn {

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureSpec phi_spec() {
  QuadratureSpec s;
  s.nodes = 32;
  s.rule = quadrature::Rule::gauss_legendre;
  s.refinement_tol = 1e-13;
  return s;
}

double log_sphere_area(int n) {
  // |S^{m}| = 2 pi^{(m+1)/2} / Gamma((m+1)/2) with m = n-1.
  return std::numbers::ln2 + 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n);
}

}  // namespace

double sphere_area(int n) {
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  return std::exp(log_sphere_area(n));
}

LogValue phi(int n, double r) { return phi(n, r, phi_spec()); }

LogValue phi(int n, double r, const QuadratureSpec& spec) {
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  if (r < 0.0) throw std::invalid_argument("phi requires r >= 0");
  if (n == 1) return LogValue::from_log(r + std::log1p(std::exp(-2.0 * r)));

  // Factor out the peak value e^r at θ = 0; the remaining integrand lies in
  // [0, 1], so the quadrature itself never overflows.
  const double m = n - 2;
  auto log_f = [r, m](double theta) {
    const double s = std::sin(theta);
    const double base = -r * (1.0 - std::cos(theta));
    if (m == 0.0) return base;
    if (s <= 0.0) return -std::numeric_limits<double>::infinity();
    return base + m * std::log(s);
  };
  const double log_int = quadrature::integrate_log(log_f, 0.0, kPi, spec);
  return LogValue::from_log(log_sphere_area(n - 1) + r + log_int);
}

LogValue psi(int n, double t, double r) {
  if (t < 0.0) throw std::invalid_argument("psi requires t >= 0");
  const LogValue p = phi(n, r);
  return LogValue::from_log(p.log_magnitude() - t);
}

LogValue phi_ball_integral(int n, double radius, const QuadratureSpec& spec) {
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  if (!(radius > 0.0)) throw std::invalid_argument("phi_ball_integral requires radius > 0");
  spec.validate();
  auto log_f = [n](double r) {
    const double lp = phi(n, r).log_magnitude();
    if (n == 1) return lp;
    if (r <= 0.0) return -std::numeric_limits<double>::infinity();
    return lp + (n - 1) * std::log(r);
  };
  const double log_radial = quadrature::integrate_log(log_f, 0.0, radius, spec);
  return LogValue::from_log(log_sphere_area(n) + log_radial);
}

C1Estimate c1_estimate(int n, double R, double t_max, double dt_grid) {
  if (!(R > 0.0)) throw std::invalid_argument("c1_estimate requires R > 0");
  if (!(t_max >= 1.0)) throw std::invalid_argument("c1_estimate requires t_max >= 1");
  if (!(dt_grid > 0.0)) throw std::invalid_argument("c1_estimate requires dt_grid > 0");

  QuadratureSpec spec;
  spec.nodes = 64;
  spec.refinement_tol = 1e-9;

  C1Estimate est;
  est.t_max = t_max;
  est.dt_grid = dt_grid;

  double tail_lo = std::numeric_limits<double>::infinity();
  double tail_hi = 0.0;
  for (double t = 0.0; t <= t_max + 0.5 * dt_grid; t += dt_grid) {
    const double a = R + t;
    const double log_ratio =
        phi_ball_integral(n, a, spec).log_magnitude() - t - 0.5 * (n - 1) * std::log(a);
    const double ratio = std::exp(log_ratio);
    est.c1 = std::max(est.c1, ratio);
    if (t >= t_max - 10.0) {
      tail_lo = std::min(tail_lo, ratio);
      tail_hi = std::max(tail_hi, ratio);
    }
  }
  est.last_decade_variation = (tail_hi - tail_lo) / tail_hi;
  return est;
}

double verify_laplacian_eigen(int n, std::span<const double> sample_radii, double h) {
  if (!(h >= 1e-4 && h <= 1e-2))
    throw std::invalid_argument("central-difference step h must lie in [1e-4, 1e-2]");
  double worst = 0.0;
  for (double r : sample_radii) {
    if (!(r > 0.0 && r <= 20.0))
      throw std::invalid_argument("sample radii must lie in (0, 20]");
    const double fm = phi(n, r - h).to_double();
    const double f0 = phi(n, r).to_double();
    const double fp = phi(n, r + h).to_double();
    const double lap = (fp - 2.0 * f0 + fm) / (h * h) + (n - 1) / r * (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(lap - f0) / f0);
  }
  return worst;
}

double asymptotic_flatness(int n, double r_lo, double r_hi, double dr) {
  if (!(r_hi > r_lo) || !(dr > 0.0)) throw std::invalid_argument("bad flatness range");
  std::vector<double> g;
  for (double r = r_lo; r <= r_hi + 0.5 * dr; r += dr)
    g.push_back(phi(n, r).log_magnitude() - (r - 0.5 * (n - 1) * std::log(r)));
  double flat = 0.0;
  for (std::size_t k = g.size() / 2; k + 1 < g.size(); ++k)
    flat = std::max(flat, std::abs(g[k + 1] - g[k]));
  return flat;
}

double bump_profile(double r, double R) {
  const double s = r / R;
  if (std::abs(s) >= 1.0) return 0.0;
  const double y = 1.0 - s * s;
  return y * y * y * y;
}

double bump_phi_integral(int n, double R) {
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
  QuadratureSpec spec;
  spec.nodes = 32;
  spec.refinement_tol = 1e-12;
  auto f = [n, R](double r) {
    const double w = n == 1 ? 1.0 : std::pow(r, n - 1);
    return bump_profile(r, R) * phi(n, r).to_double() * w;
  };
  return sphere_area(n) * quadrature::integrate(f, 0.0, R, spec);
}

}  // namespace nakao::testfn
