#include "nakao/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nakao {

void ProblemParams::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!(q > 1.0)) throw std::invalid_argument("q must exceed 1");
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
}

double ExtendedReal::value() const {
  if (infinite_) throw std::logic_error("value() called on infinite ExtendedReal");
  return value_;
}

namespace exponents {

ExtendedReal glassey_exponent(int n) {
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  if (n == 1) return ExtendedReal::infinity();
  return ExtendedReal(static_cast<double>(n + 1) / static_cast<double>(n - 1));
}

bool blowup_condition(const ProblemParams& params) {
  params.validate();
  return ExtendedReal(params.pq()) < glassey_exponent(params.n);
}

double lifespan_exponent(const ProblemParams& params) {
  params.validate();
  const double pq = params.pq();
  const double denom = (params.n + 1) - (params.n - 1) * pq;
  if (!(denom > 0.0))
    throw std::domain_error("lifespan exponent undefined: pq is not below the Glassey exponent");
  return 2.0 * (pq - 1.0) / denom;
}

std::pair<double, double> t1_t2(const ProblemParams& params) {
  params.validate();
  const double pq = params.pq();
  const double n = params.n;
  const double t1 = ((n + 1.0) - (n - 1.0) * pq) / (2.0 * (pq - 1.0));
  const double t2 = ((n + 1.0) + 2.0 * params.p - (n + 1.0) * pq) / (2.0 * (pq - 1.0));
  return {t1, t2};
}

RegionReport curve_values(const ProblemParams& params, double boundary_eps) {
  params.validate();
  const double p = params.p;
  const double q = params.q;
  const double pq = p * q;
  const double n = params.n;

  RegionReport rep;
  rep.glassey = glassey_exponent(params.n);

  const double wakasugi_max = std::max(
      {(q / 2.0 + 1.0) / (pq - 1.0) + 0.5, (q + 1.0) / (pq - 1.0), (p + 1.0) / (pq - 1.0)});
  rep.wakasugi_holds = wakasugi_max >= n / 2.0;

  rep.nakao_alpha = std::max({(q / 2.0 + 1.0) / (pq - 1.0), (2.0 + 1.0 / p) / (pq - 1.0),
                              (0.5 + p) / (pq - 1.0) - 0.5});
  rep.wave_alpha = (std::max(p, q) + 1.0) / (pq - 1.0);
  rep.shrift_alpha = q / (pq - 1.0);

  rep.blowup_condition_holds = blowup_condition(params);
  if (rep.blowup_condition_holds) rep.lifespan_exponent = lifespan_exponent(params);

  std::tie(rep.t1, rep.t2) = t1_t2(params);

  if (params.n >= 2 && boundary_eps > 0.0)
    rep.on_boundary = std::abs(pq - rep.glassey.value()) <= boundary_eps;
  return rep;
}

}  // namespace exponents
}  // namespace nakao
