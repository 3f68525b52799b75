#include "nakao/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "nakao/log_value.hpp"

namespace nakao::quadrature {

void QuadratureSpec::validate() const {
  if (nodes < 8) throw std::invalid_argument("quadrature nodes must be >= 8");
  if (!(refinement_tol > 0.0) || refinement_tol > 1e-3)
    throw std::invalid_argument("refinement_tol must lie in (0, 1e-3]");
  if (max_nodes < nodes) throw std::invalid_argument("max_nodes below starting node count");
}

namespace {

GaussTable compute_gauss_table(int m) {
  GaussTable t;
  t.x.resize(m);
  t.w.resize(m);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_m from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    t.x[i] = -x;
    t.x[m - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    t.w[i] = w;
    t.w[m - 1 - i] = w;
  }
  return t;
}

}  // namespace

const GaussTable& gauss_table(int m) {
  static std::map<int, GaussTable> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, compute_gauss_table(m)).first;
  return it->second;
}

namespace {

double eval_log(const std::function<double(double)>& log_f, double a, double b, Rule rule,
                int m, std::vector<double>& scratch) {
  scratch.clear();
  if (rule == Rule::gauss_legendre) {
    const GaussTable& t = gauss_table(m);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double log_half = std::log(half);
    for (int i = 0; i < m; ++i)
      scratch.push_back(log_f(mid + half * t.x[i]) + std::log(t.w[i]) + log_half);
  } else {
    const double h = (b - a) / (m - 1);
    const double log_h = std::log(h);
    for (int i = 0; i < m; ++i) {
      const double x = a + h * i;
      const double lw = (i == 0 || i == m - 1) ? log_h - std::numbers::ln2 : log_h;
      scratch.push_back(log_f(x) + lw);
    }
  }
  return LogValue::log_sum(scratch);
}

double eval_linear(const std::function<double(double)>& f, double a, double b, Rule rule, int m) {
  if (rule == Rule::gauss_legendre) {
    const GaussTable& t = gauss_table(m);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += t.w[i] * f(mid + half * t.x[i]);
    return acc * half;
  }
  const double h = (b - a) / (m - 1);
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < m - 1; ++i) acc += f(a + h * i);
  return acc * h;
}

}  // namespace

double integrate_log(const std::function<double(double)>& log_f, double a, double b,
                     const QuadratureSpec& spec) {
  spec.validate();
  if (!(b > a)) return -std::numeric_limits<double>::infinity();
  std::vector<double> scratch;
  int m = spec.nodes;
  double prev = eval_log(log_f, a, b, spec.rule, m, scratch);
  while (2 * m <= spec.max_nodes) {
    m *= 2;
    const double cur = eval_log(log_f, a, b, spec.rule, m, scratch);
    if (!std::isfinite(cur) && !std::isfinite(prev)) return cur;  // identically zero
    if (std::abs(1.0 - std::exp(prev - cur)) <= spec.refinement_tol) return cur;
    prev = cur;
  }
  throw QuadratureError("quadrature did not converge within the node budget");
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  spec.validate();
  if (!(b > a)) return 0.0;
  int m = spec.nodes;
  double prev = eval_linear(f, a, b, spec.rule, m);
  while (2 * m <= spec.max_nodes) {
    m *= 2;
    const double cur = eval_linear(f, a, b, spec.rule, m);
    const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
    if (std::abs(cur - prev) <= spec.refinement_tol * scale) return cur;
    prev = cur;
  }
  throw QuadratureError("quadrature did not converge within the node budget");
}

}  // namespace nakao::quadrature
