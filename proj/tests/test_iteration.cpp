#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "nakao/iteration.hpp"
#include "nakao/testfn.hpp"
#include "test_support.hpp"

using namespace nakao;
using nakao::testsupport::rel_err;

namespace {

// Ledger with synthetic inputs; the sequence algebra does not care where C1
// and the data integrals come from.
iteration::IterationConstants synthetic_ledger(const ProblemParams& pp) {
  iteration::DataIntegrals data{1.0, 1.0, 2.0};
  return iteration::constants_ledger(pp, 2.0, data);
}

// Ledger with the real measured inputs for n = 1, p = q = 2, R = 1.
iteration::IterationConstants measured_ledger(const ProblemParams& pp) {
  iteration::DataIntegrals data;
  data.u1_phi = testfn::bump_phi_integral(pp.n, pp.R);
  data.v1_phi = data.u1_phi;
  data.u0_plus_u1_phi = 2.0 * data.u1_phi;
  const double c1 = testfn::c1_estimate(pp.n, pp.R, 50.0).c1;
  return iteration::constants_ledger(pp, c1, data);
}

}  // namespace

TEST_CASE("slicing factors") {
  CHECK(rel_err(iteration::ell(1, 2.0, 2.0), 1.763932) < 1e-6);
  CHECK(rel_err(iteration::ell(1, 1.3, 1.9), 1.0 + 4.0 / (3.0 + std::sqrt(5.0))) < 1e-15);
  CHECK(rel_err(iteration::ell(2, 2.0, 2.0), 1.381966) < 1e-6);
  CHECK(iteration::ell(200, 2.0, 2.0) - 1.0 < 1e-14);
  double prev = iteration::ell(1, 1.4, 1.6);
  for (int k = 2; k <= 40; ++k) {
    const double cur = iteration::ell(k, 1.4, 1.6);
    CHECK(cur < prev);
    CHECK(cur > 1.0);
    prev = cur;
  }
}

TEST_CASE("slicing partial products") {
  const auto sp = iteration::slicing_product(40, 2.0, 2.0);
  CHECK(rel_err(sp.partial[0], 1.763932) < 1e-6);
  // dual route: the second partial product is exactly ell_1 * ell_2
  CHECK(rel_err(sp.partial[1], iteration::ell(1, 2, 2) * iteration::ell(2, 2, 2)) < 1e-14);
  CHECK(sp.limit > 1.0);
  CHECK(sp.converged_at <= 200);
  for (std::size_t j = 1; j < sp.partial.size(); ++j) {
    CHECK(sp.partial[j] > sp.partial[j - 1]);
    CHECK(sp.partial[j] <= sp.limit);
  }
  // geometric tail decay of the remainder
  for (int j : {4, 10, 20}) {
    const double tail = sp.limit - sp.partial[j - 1];
    CHECK(tail <= 3.0 * sp.limit * std::pow(4.0, -0.5 * j));
  }
}

TEST_CASE("first terms") {
  ProblemParams pp{2.0, 2.0, 3, 1.0, 0.5};
  const auto c = synthetic_ledger(pp);
  const auto s = iteration::first_terms(pp, c);
  CHECK(s.j == 1);
  CHECK(s.alpha == 1.0);  // (n-1)(p-1)/2
  CHECK(s.a == 2.0);      // (n+1)(q-1)/2
  CHECK(s.beta == 1.0);
  CHECK(s.b == 0.0);
  CHECK(rel_err(s.L_j, iteration::ell(1, 2, 2)) < 1e-15);
}

TEST_CASE("hand-computed recursion values at p = q = 2, n = 3") {
  ProblemParams pp{2.0, 2.0, 3, 1.0, 0.5};
  const auto c = synthetic_ledger(pp);
  auto s = iteration::first_terms(pp, c);
  const auto s2 = iteration::recursion_step(s, pp, c);
  CHECK(s2.alpha == 5.0);
  CHECK(s2.a == 4.0);
  CHECK(s2.beta == 1.0);
  CHECK(s2.b == 2.0);
  const auto s3 = iteration::recursion_step(s2, pp, c);
  CHECK(s3.alpha == 9.0);
  CHECK(s3.beta == 5.0);
  CHECK(s3.b == 2.0);
}

TEST_CASE("closed forms reproduce the hand values") {
  ProblemParams pp{2.0, 2.0, 3, 1.0, 0.5};
  const auto cf3 = iteration::closed_form_exponents(3, pp);
  CHECK(rel_err(cf3.alpha, 9.0) < 1e-14);
  CHECK(rel_err(cf3.beta, 5.0) < 1e-14);
  CHECK(rel_err(cf3.b, 2.0) < 1e-14);
  CHECK_THROWS_AS(iteration::closed_form_exponents(2, pp), std::invalid_argument);
  CHECK_THROWS_AS(iteration::closed_form_exponents(4, pp), std::invalid_argument);
}

TEST_CASE("closed forms match the recursion for both parities") {
  nakao::testsupport::InRegionSampler sampler;
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemParams pp = sampler.next();
    const auto c = synthetic_ledger(pp);
    iteration::IterationState s = iteration::first_terms(pp, c);
    for (int j = 1; j <= 41; ++j) {
      if (j > 1) s = iteration::recursion_step(s, pp, c);
      const auto [alpha_cf, a_cf] = iteration::closed_form_alpha_a(j, pp);
      const auto [beta_cf, b_cf] = iteration::closed_form_beta_b(j, pp);
      CHECK(rel_err(s.alpha, alpha_cf) < 1e-10);
      CHECK(rel_err(s.a, a_cf) < 1e-10);
      CHECK(rel_err(s.beta, beta_cf) < 1e-10);
      if (s.b == 0.0)
        CHECK(std::abs(b_cf) < 1e-10);
      else
        CHECK(rel_err(s.b, b_cf) < 1e-10);
    }
  }
}

TEST_CASE("exponent growth bounds and the affine monotone update") {
  nakao::testsupport::InRegionSampler sampler(99u);
  for (int trial = 0; trial < 20; ++trial) {
    const ProblemParams pp = sampler.next();
    const auto c = synthetic_ledger(pp);
    const double pq = pp.pq();
    iteration::IterationState s = iteration::first_terms(pp, c);
    for (int j = 1; j <= 41; ++j) {
      if (j > 1) {
        const auto prev = s;
        s = iteration::recursion_step(prev, pp, c);
        CHECK(s.alpha >= prev.a);   // alpha_{j+1} = (n-1)(p-1)/2 + a_j p
        CHECK(s.a >= prev.alpha);   // a_{j+1}    = (n+1)(q-1)/2 + alpha_j q
        CHECK(s.beta >= prev.b);
        CHECK(s.b >= prev.beta);
        CHECK(s.L_j > prev.L_j);
      }
      CHECK(s.alpha >= 0.0);
      CHECK(s.a >= 0.0);
      CHECK(s.beta <= c.B0 * std::pow(pq, 0.5 * j) * (1.0 + 1e-12));
      CHECK(s.b <= c.B1 * std::pow(pq, 0.5 * j) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("envelope time-exponents reduce to p T1 and q T2") {
  // Collapsing the first-step exponents against the odd-j closed-form offsets
  // must reproduce the lifespan exponents:
  //   -alpha_1 - K_alpha + pq/(pq-1) = p T1,
  //   -a_1     - K_a     + q /(pq-1) = q T2.
  nakao::testsupport::InRegionSampler sampler(41u);
  for (int trial = 0; trial < 200; ++trial) {
    const ProblemParams pp = sampler.next();
    const double pq = pp.pq();
    const double n = pp.n;
    const double k_alpha = ((n + 1) * pq - 2.0 * pp.p - (n - 1)) / (2.0 * (pq - 1.0));
    const double k_a = ((n - 1) * pq + 2.0 * pp.q - (n + 1)) / (2.0 * (pq - 1.0));
    const double alpha1 = 0.5 * (n - 1) * (pp.p - 1.0);
    const double a1 = 0.5 * (n + 1) * (pp.q - 1.0);
    const auto [t1, t2] = exponents::t1_t2(pp);
    CHECK(std::abs((-alpha1 - k_alpha + pq / (pq - 1.0)) - pp.p * t1) < 1e-12);
    CHECK(std::abs((-a1 - k_a + pp.q / (pq - 1.0)) - pp.q * t2) < 1e-12);
  }
}

TEST_CASE("geometric-sum identity") {
  nakao::testsupport::InRegionSampler sampler(3u);
  for (int trial = 0; trial < 20; ++trial) {
    const ProblemParams pp = sampler.next();
    const double pq = pp.pq();
    for (int j = 3; j <= 41; j += 2) {
      double lhs = 0.0;
      for (int k = 1; k <= (j - 1) / 2; ++k) lhs += (j + 2 - 2 * k) * std::pow(pq, k - 1);
      const double rhs =
          (1.0 / (pq - 1.0)) *
          ((2.0 * pq / (pq - 1.0)) *
               (1.5 * std::pow(pq, 0.5 * (j - 1)) - 0.5 * std::pow(pq, 0.5 * (j - 3)) - 1.0) -
           j);
      CHECK(rel_err(lhs, rhs) < 1e-10);
    }
  }
}

TEST_CASE("constants ledger") {
  SUBCASE("C4 hand value") {
    ProblemParams pp{2.0, 2.0, 1, 1.0, 0.5};
    iteration::DataIntegrals data{1.0, 1.0, 2.0};
    const auto c = iteration::constants_ledger(pp, 1.0, data);
    CHECK(rel_err(c.C4, 0.5) < 1e-15);  // (C1^{1-q}/2)((n+1)/2)^{q-1} with C1 = 1
  }
  SUBCASE("finite and positive over random in-region parameters") {
    nakao::testsupport::InRegionSampler sampler(11u);
    for (int trial = 0; trial < 100; ++trial) {
      const ProblemParams pp = sampler.next();
      const auto c = synthetic_ledger(pp);
      CHECK(c.M > 0.0);
      CHECK(c.M <= 1.0);
      CHECK(c.B0 > 0.0);
      CHECK(c.B1 > 0.0);
      CHECK(c.L > 1.0);
      CHECK(c.eps0 > 0.0);
      CHECK(std::isfinite(static_cast<double>(c.j0)));
      CHECK(std::isfinite(static_cast<double>(c.j1)));
      REQUIRE(c.E4.has_value());
      CHECK(std::isfinite(c.E4->log_magnitude()));
      if (c.T2 > 0.0) CHECK(c.E5.has_value());
      if (c.T2 <= 0.0) CHECK_FALSE(c.E5.has_value());
    }
  }
  SUBCASE("degenerate data is refused") {
    ProblemParams pp{2.0, 2.0, 1, 1.0, 0.5};
    iteration::DataIntegrals degenerate{0.0, 1.0, 1.0};
    CHECK_THROWS_AS(iteration::constants_ledger(pp, 1.0, degenerate), std::invalid_argument);
  }
  SUBCASE("outside the region the divergence constants are absent") {
    ProblemParams pp{2.0, 2.0, 2, 1.0, 0.5};
    iteration::DataIntegrals data{1.0, 1.0, 2.0};
    const auto c = iteration::constants_ledger(pp, 1.0, data);
    CHECK_FALSE(c.E4.has_value());
    CHECK_FALSE(c.E5.has_value());
    CHECK(c.eps0 == 0.0);
    CHECK(c.T1 <= 0.0);
    CHECK_THROWS_AS(iteration::predicted_blowup_time(pp, c), std::domain_error);
  }
}

TEST_CASE("lower bounds on log D_j and log Q_j past the ledger thresholds") {
  nakao::testsupport::InRegionSampler sampler(23u);
  for (int trial = 0; trial < 25; ++trial) {
    const ProblemParams pp = sampler.next();
    const auto c = synthetic_ledger(pp);
    const double log_eps = std::log(pp.eps);
    iteration::IterationState s = iteration::first_terms(pp, c);
    for (int j = 1; j <= 41; ++j) {
      if (j > 1) s = iteration::recursion_step(s, pp, c);
      if (j % 2 == 0) continue;
      const double scale = std::pow(pp.pq(), 0.5 * (j - 1));
      if (j >= std::max(c.j0, 1)) {
        const double bound = scale * (c.E2.log_magnitude() + pp.p * log_eps);
        CHECK(s.D.log_magnitude() >= bound - 1e-9 * std::abs(bound));
      }
      if (j >= std::max(c.j1, 1)) {
        const double bound = scale * (c.E3.log_magnitude() + pp.q * log_eps);
        CHECK(s.Q.log_magnitude() >= bound - 1e-9 * std::abs(bound));
      }
    }
  }
}

TEST_CASE("envelopes") {
  ProblemParams pp{2.0, 2.0, 1, 1.0, 0.5};
  const auto c = measured_ledger(pp);

  SUBCASE("j = 1 limits near t = L_1") {
    const double L1 = iteration::ell(1, 2, 2);
    const auto [f1a, f2a] = iteration::envelope(L1 + 1e-9, 1, pp, c);
    // b_1 = 0: the F2 bound approaches Q1 (R + L1)^{-a_1}, a_1 = (n+1)(q-1)/2 = 1
    const double expect = c.Q1.log_magnitude() - 1.0 * std::log(pp.R + L1);
    CHECK(std::abs(f2a.log_magnitude() - expect) < 1e-6);
    // beta_1 = 1: the F1 bound vanishes linearly in (t - L1)
    const auto [f1b, f2b] = iteration::envelope(L1 + 2e-9, 1, pp, c);
    (void)f2b;
    CHECK(std::abs((f1b.log_magnitude() - f1a.log_magnitude()) - std::log(2.0)) < 1e-4);
    CHECK_THROWS_AS(iteration::envelope(L1, 1, pp, c), std::invalid_argument);
  }

  SUBCASE("envelopes grow in j once t clears the divergence threshold") {
    ProblemParams pe = pp;
    pe.eps = c.eps0;  // largest admissible data size: divergence time collapses to max{R, 2L}
    const auto ce = measured_ledger(pe);
    const double t = 4.0 * ce.L;
    double prev_f1 = -1e300, prev_f2 = -1e300;
    for (int j : {1, 3, 5}) {
      const auto [f1, f2] = iteration::envelope(t, j, pe, ce);
      CHECK(f1.log_magnitude() > prev_f1);
      CHECK(f2.log_magnitude() > prev_f2);
      prev_f1 = f1.log_magnitude();
      prev_f2 = f2.log_magnitude();
    }
  }
}

TEST_CASE("predicted blow-up time") {
  ProblemParams pp{2.0, 2.0, 1, 1.0, 0.5};
  const auto c = measured_ledger(pp);
  const double t_half = iteration::predicted_blowup_time(pp, c);
  CHECK(t_half >= 2.0 * c.L);

  ProblemParams pp2 = pp;
  pp2.eps = 0.25;
  const auto c2 = measured_ledger(pp2);
  // E4 is eps-free; doubling eps scales the eps-dependent factor by 2^{-1/T1} = 1/8
  CHECK(std::abs(c2.E4->log_magnitude() - c.E4->log_magnitude()) < 1e-10);
  const double t_quarter = iteration::predicted_blowup_time(pp2, c2);
  CHECK(rel_err(t_quarter / t_half, 8.0) < 1e-9);

  // 1/T1 = 3 here, matching the lifespan exponent
  CHECK(rel_err(1.0 / c.T1, 3.0) < 1e-14);

  ProblemParams big = pp;
  big.eps = c.eps0 * 2.0;
  const auto cbig = measured_ledger(big);
  CHECK_THROWS_AS(iteration::predicted_blowup_time(big, cbig), std::domain_error);
}
