#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace nakao::quadrature {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Rule { trapezoid, gauss_legendre };

struct QuadratureSpec {
  int nodes = 64;               ///< starting node count (>= 8)
  Rule rule = Rule::gauss_legendre;
  double refinement_tol = 1e-10;  ///< relative tolerance between refinements, in (0, 1e-3]
  int max_nodes = 1 << 20;      ///< refinement budget

  void validate() const;
};

/// Gauss-Legendre abscissae and weights on [-1, 1]; cached per node count.
struct GaussTable {
  std::vector<double> x, w;
};
const GaussTable& gauss_table(int m);

/// Integral of a positive integrand over [a, b], where log_f returns the
/// natural log of the integrand (-inf where it vanishes). Returns the log of
/// the integral. Node count doubles until two successive estimates agree to
/// refinement_tol relatively; past max_nodes this throws QuadratureError.
double integrate_log(const std::function<double(double)>& log_f, double a, double b,
                     const QuadratureSpec& spec);

/// Linear-scale counterpart for integrands of moderate magnitude.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec);

}  // namespace nakao::quadrature
