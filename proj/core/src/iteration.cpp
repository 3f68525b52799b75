#include "nakao/iteration.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace nakao::iteration {

namespace {

const double kSqrt5 = std::sqrt(5.0);
const double kSlicingBase = 4.0 / (3.0 + kSqrt5);  // = 3 - sqrt 5

double alpha1(const ProblemParams& pp) { return 0.5 * (pp.n - 1) * (pp.p - 1.0); }
double a1(const ProblemParams& pp) { return 0.5 * (pp.n + 1) * (pp.q - 1.0); }

// log(ell_k) without the 1 + tiny rounding that plain log(ell(k)) suffers for
// large k (the tail factors sit below double resolution).
double log_ell(int k, double p, double q) {
  return std::log1p(kSlicingBase * std::pow(p * q, -0.5 * (k - 1)));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::runtime_error(std::string(name) + " is nonpositive");
}

}  // namespace

double ell(int k, double p, double q) {
  if (k < 1) throw std::invalid_argument("ell requires k >= 1");
  if (!(p > 1.0 && q > 1.0)) throw std::invalid_argument("ell requires p, q > 1");
  return 1.0 + kSlicingBase * std::pow(p * q, -0.5 * (k - 1));
}

SlicingProduct slicing_product(int j_max, double p, double q) {
  if (j_max < 1) throw std::invalid_argument("slicing_product requires j_max >= 1");
  SlicingProduct out;
  out.partial.reserve(j_max);
  double prod = 1.0;
  int k = 1;
  for (; k <= j_max; ++k) {
    prod *= ell(k, p, q);
    out.partial.push_back(prod);
  }
  // The relative increment of the partial product at step k is ell_k - 1.
  for (; ell(k, p, q) - 1.0 >= 1e-14; ++k) prod *= ell(k, p, q);
  out.limit = prod;
  out.converged_at = k;
  return out;
}

IterationConstants constants_ledger(const ProblemParams& params, double c1,
                                    const DataIntegrals& data) {
  params.validate();
  if (!(c1 > 0.0)) throw std::invalid_argument("C1 must be positive");
  if (data.u1_phi < 1e-12 || data.v1_phi < 1e-12)
    throw std::invalid_argument(
        "degenerate data: velocity integrals against phi must be bounded away from zero");

  const double p = params.p, q = params.q, pq = params.pq();
  const double n = params.n;
  const double gamma = 3.0 + kSqrt5;

  IterationConstants c;
  c.C1 = c1;
  c.data = data;
  c.C2 = (2.0 / gamma) * (1.0 - std::exp(-0.5 * gamma)) * data.u1_phi;
  c.C3 = 0.5 * data.v1_phi;
  c.C4 = 0.5 * std::pow(c1, 1.0 - q) * std::pow(0.5 * (n + 1.0), q - 1.0);
  require_positive(c.C2, "C2");
  require_positive(c.C3, "C3");
  require_positive(c.C4, "C4");

  const double log_eps = std::log(params.eps);
  c.D1 = LogValue::from_log((1.0 - p) * std::log(c1) + p * std::log(c.C3) - std::log(gamma) +
                            std::log1p(-std::exp(-1.0 - 0.25 * gamma)) + p * log_eps);
  c.Q1 = LogValue::from_log(q * std::log(c.C2) + std::log(c.C4) + q * log_eps);

  // Exact maxima of the parity-branch leading coefficients (beta_1 = 1, b_1 = 0).
  const double inv_pq1 = 1.0 / (pq - 1.0);
  const double root_pq = std::sqrt(pq);
  c.B0 = std::max((1.0 + inv_pq1) / root_pq, (0.0 + q * inv_pq1) / q);
  c.B1 = std::max((0.0 + q * inv_pq1) / root_pq, (1.0 + inv_pq1) / p);
  require_positive(c.B0, "B0");
  require_positive(c.B1, "B1");

  // M bounds 1/ell_j^{b_{j-1}p + 1} = 1/ell_j^{beta_j} from below: the
  // L'Hopital tail limit, cross-checked against the direct minimum over
  // j <= 200, keeping the smaller.
  double m_val = std::exp(-(4.0 * c.B0 / gamma) * root_pq);
  for (int j = 1; j <= 200; ++j) {
    const auto [beta_j, b_j] = closed_form_beta_b(j, params);
    (void)b_j;
    m_val = std::min(m_val, std::exp(-beta_j * log_ell(j, p, q)));
  }
  c.M = m_val;
  require_positive(c.M, "M");

  const double log_c1 = std::log(c1);
  const double log_root_m1 = std::log(root_pq - 1.0);
  c.E0 = LogValue::from_log(std::log(4.0) + (1.0 - p) * log_c1 + p * std::log(c.C4) +
                            log_root_m1 + std::log(c.M) - std::log(gamma) - std::log(c.B0));
  c.E1 = LogValue::from_log(q * std::log(4.0) + (1.0 - p) * q * log_c1 + std::log(c.C4) +
                            q * log_root_m1 + q * std::log(c.M) - q * std::log(gamma) -
                            q * std::log(c.B0));

  const double log_pq = std::log(pq);
  c.j0 = static_cast<int>(
      std::ceil(2.0 / 3.0 + 2.0 * c.E0.log_magnitude() / (3.0 * log_pq) - 2.0 * pq * inv_pq1));
  c.j1 = static_cast<int>(std::ceil(2.0 / 3.0 + 2.0 * c.E1.log_magnitude() / (3.0 * q * log_pq) -
                                    2.0 * pq * inv_pq1));

  const double shrink = (1.0 - 7.0 * pq) / (2.0 * (pq - 1.0) * (pq - 1.0));
  c.E2 = LogValue::from_log(c.D1.log_magnitude() - p * log_eps + shrink * log_pq +
                            c.E0.log_magnitude() * inv_pq1);
  c.E3 = LogValue::from_log(c.Q1.log_magnitude() - q * log_eps + q * shrink * log_pq +
                            c.E1.log_magnitude() * inv_pq1);

  std::tie(c.T1, c.T2) = exponents::t1_t2(params);

  // The divergence constants exist only inside the blow-up region.
  if (c.T1 > 0.0) {
    const double ln2 = std::numbers::ln2;
    const double pow2_u =
        0.5 * (n - 1.0) * (p - 1.0) + ((n + 1.0) * pq - 2.0 * p - (n - 1.0)) * 0.5 * inv_pq1 +
        pq * inv_pq1;
    c.E4 = LogValue::from_log((-c.E2.log_magnitude() + pow2_u * ln2) / (p * c.T1));
    c.eps0 = std::exp(c.T1 * c.E4->log_magnitude());
    if (c.T2 > 0.0) {
      const double pow2_v =
          0.5 * (n + 1.0) * (q - 1.0) + ((n - 1.0) * pq + 2.0 * q - (n + 1.0)) * 0.5 * inv_pq1 +
          q * inv_pq1;
      c.E5 = LogValue::from_log((-c.E3.log_magnitude() + pow2_v * ln2) / (q * c.T2));
      c.eps0 = std::min(c.eps0, std::exp(c.T2 * c.E5->log_magnitude()));
    }
    require_positive(c.eps0, "eps0");
  }

  c.L = slicing_product(1, params.p, params.q).limit;
  if (!(c.L > 1.0)) throw std::runtime_error("slicing product limit must exceed 1");
  return c;
}

IterationState first_terms(const ProblemParams& params, const IterationConstants& c) {
  params.validate();
  if (c.D1.is_zero() || c.Q1.is_zero())
    throw std::invalid_argument("ledger carries no first-step constants");
  IterationState s;
  s.j = 1;
  s.alpha = alpha1(params);
  s.a = a1(params);
  s.beta = 1.0;
  s.b = 0.0;
  s.D = c.D1;
  s.Q = c.Q1;
  s.L_j = ell(1, params.p, params.q);
  return s;
}

IterationState recursion_step(const IterationState& s, const ProblemParams& params,
                              const IterationConstants& c) {
  const double p = params.p, q = params.q, pq = params.pq();
  const double gamma = 3.0 + kSqrt5;
  const double exponent = s.b * p + 1.0;

  IterationState t;
  t.j = s.j + 1;
  t.alpha = alpha1(params) + s.a * p;
  t.a = a1(params) + s.alpha * q;
  t.beta = 1.0 + s.b * p;
  t.b = s.beta * q;
  t.D = LogValue::from_log(std::log(4.0) + (1.0 - p) * std::log(c.C1) +
                           std::log(std::sqrt(pq) - 1.0) - s.j * std::log(pq) - std::log(gamma) -
                           std::log(exponent) - exponent * log_ell(s.j + 1, p, q) +
                           p * s.Q.log_magnitude());
  t.Q = LogValue::from_log(std::log(c.C4) + q * s.D.log_magnitude());
  t.L_j = s.L_j * ell(s.j + 1, p, q);
  return t;
}

ClosedFormExponents closed_form_exponents(int j, const ProblemParams& params) {
  params.validate();
  if (j < 1 || j % 2 == 0)
    throw std::invalid_argument("closed-form exponents are defined for odd j only");
  const double pq = params.pq();
  const double n = params.n;
  const double s = std::pow(pq, 0.5 * (j - 1));
  const double k_alpha = ((n + 1.0) * pq - 2.0 * params.p - (n - 1.0)) / (2.0 * (pq - 1.0));
  const double k_a = ((n - 1.0) * pq + 2.0 * params.q - (n + 1.0)) / (2.0 * (pq - 1.0));
  ClosedFormExponents cf;
  cf.alpha = (alpha1(params) + k_alpha) * s - k_alpha;
  cf.a = (a1(params) + k_a) * s - k_a;
  cf.beta = (1.0 + 1.0 / (pq - 1.0)) * s - 1.0 / (pq - 1.0);
  cf.b = (params.q / (pq - 1.0)) * s - params.q / (pq - 1.0);
  return cf;
}

std::pair<double, double> closed_form_beta_b(int j, const ProblemParams& params) {
  if (j % 2 == 1) {
    const auto cf = closed_form_exponents(j, params);
    return {cf.beta, cf.b};
  }
  const double pq = params.pq();
  const double s = std::pow(pq, 0.5 * j);
  const double inv_pq1 = 1.0 / (pq - 1.0);
  const double beta = (1.0 / params.q) * (params.q * inv_pq1) * s - inv_pq1;
  const double b = (1.0 / params.p) * (1.0 + inv_pq1) * s - params.q * inv_pq1;
  return {beta, b};
}

std::pair<double, double> closed_form_alpha_a(int j, const ProblemParams& params) {
  if (j % 2 == 1) {
    const auto cf = closed_form_exponents(j, params);
    return {cf.alpha, cf.a};
  }
  const auto prev = closed_form_exponents(j - 1, params);
  return {alpha1(params) + prev.a * params.p, a1(params) + prev.alpha * params.q};
}

IterationState closed_form(int j, const ProblemParams& params, const IterationConstants& c) {
  const auto cf = closed_form_exponents(j, params);
  IterationState s = first_terms(params, c);
  while (s.j < j) s = recursion_step(s, params, c);
  s.alpha = cf.alpha;
  s.a = cf.a;
  s.beta = cf.beta;
  s.b = cf.b;
  return s;
}

std::pair<LogValue, LogValue> envelope(double t, int j, const ProblemParams& params,
                                       const IterationConstants& c) {
  const IterationState s = closed_form(j, params, c);
  if (!(t > s.L_j)) throw std::invalid_argument("envelope requires t > L_j");
  const double log_rt = std::log(params.R + t);
  const double log_tl = std::log(t - s.L_j);
  const LogValue f1 =
      LogValue::from_log(s.D.log_magnitude() - s.alpha * log_rt + s.beta * log_tl);
  const LogValue f2 = LogValue::from_log(s.Q.log_magnitude() - s.a * log_rt + s.b * log_tl);
  return {f1, f2};
}

double predicted_blowup_time(const ProblemParams& params, const IterationConstants& c) {
  params.validate();
  if (!exponents::blowup_condition(params) || !c.E4)
    throw std::domain_error("predicted blow-up time requires pq below the Glassey exponent");
  if (params.eps > c.eps0)
    throw std::domain_error("eps exceeds the admissible threshold eps0 of the envelope argument");
  const double t_eps = std::exp(c.E4->log_magnitude() - std::log(params.eps) / c.T1);
  return std::max({params.R, 2.0 * c.L, t_eps});
}

}  // namespace nakao::iteration
