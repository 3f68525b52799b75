#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nakao/exponents.hpp"
#include "nakao/log_value.hpp"

namespace nakao::iteration {

/// One row of the lower-bound iteration
///   F1(t) >= D_j (R+t)^{-alpha_j} (t-L_j)^{beta_j},
///   F2(t) >= Q_j (R+t)^{-a_j}    (t-L_j)^{b_j},   t >= L_j.
struct IterationState {
  int j = 1;
  double alpha = 0.0;
  double a = 0.0;
  double beta = 0.0;
  double b = 0.0;
  LogValue D;  ///< multiplicative constant, log domain (grows like exp((pq)^{j/2}))
  LogValue Q;
  double L_j = 0.0;  ///< slicing partial product
};

/// Integrals of the (unscaled) data profiles against Φ; the eps factor enters
/// through the constants that consume them.
struct DataIntegrals {
  double u1_phi = 0.0;
  double v1_phi = 0.0;
  double u0_plus_u1_phi = 0.0;
};

/// The constants ledger: one concrete instantiation of every constant the
/// iteration argument needs.
struct IterationConstants {
  double C1 = 0.0;  ///< ball-integral bound constant (empirical supremum)
  double C2 = 0.0;  ///< F1(t) >= C2 eps for t >= 1
  double C3 = 0.0;  ///< F2(t) >= C3 eps
  double C4 = 0.0;  ///< Hoelder-chain constant in the F2 frame
  LogValue D1, Q1;
  double B0 = 0.0;  ///< beta_j <= B0 (pq)^{j/2}
  double B1 = 0.0;  ///< b_j    <= B1 (pq)^{j/2}
  double M = 0.0;   ///< uniform lower bound for 1/ell_j^{b_{j-1}p+1}, in (0, 1]
  LogValue E0, E1, E2, E3;
  std::optional<LogValue> E4;  ///< present iff T1 > 0 (inside the blow-up region)
  std::optional<LogValue> E5;  ///< present only when T2 > 0
  int j0 = 0;
  int j1 = 0;
  double L = 0.0;  ///< limit of the slicing partial products, > 1
  double T1 = 0.0;
  double T2 = 0.0;
  double eps0 = 0.0;  ///< admissible data-size threshold realized by E4 (and E5); 0 when E4 absent
  DataIntegrals data;
};

/// Slicing factor ell_k = 1 + (4/(3+sqrt 5)) (pq)^{-(k-1)/2}; decreasing to 1.
double ell(int k, double p, double q);

struct SlicingProduct {
  std::vector<double> partial;  ///< L_1 .. L_j_max
  double limit = 0.0;           ///< L, tail extended until relative increment < 1e-14
  int converged_at = 0;         ///< first index with ell_k - 1 < 1e-14
};
SlicingProduct slicing_product(int j_max, double p, double q);

/// Builds the full ledger from the empirical C1 and the data integrals.
/// Signals degenerate data when either velocity integral is below 1e-12, and
/// any nonpositive derived constant. The divergence constants E4/E5 and eps0
/// exist only inside the blow-up region (T1 > 0); the sequence constants are
/// well-defined for every p, q > 1.
IterationConstants constants_ledger(const ProblemParams& params, double c1,
                                    const DataIntegrals& data);

/// j = 1 row: alpha_1 = (n-1)(p-1)/2, a_1 = (n+1)(q-1)/2, beta_1 = 1, b_1 = 0,
/// together with the ledger's D1, Q1 and L_1.
IterationState first_terms(const ProblemParams& params, const IterationConstants& c);

/// One induction step j -> j+1 of the coupled recursion.
IterationState recursion_step(const IterationState& s, const ProblemParams& params,
                              const IterationConstants& c);

/// Exponent closed forms.
struct ClosedFormExponents {
  double alpha = 0.0, a = 0.0, beta = 0.0, b = 0.0;
};

/// Odd-j closed forms for all four exponent sequences. Rejects even j.
ClosedFormExponents closed_form_exponents(int j, const ProblemParams& params);

/// (beta_j, b_j) closed forms valid for either parity.
std::pair<double, double> closed_form_beta_b(int j, const ProblemParams& params);

/// (alpha_j, a_j) for either parity; even j is reached by one exact recursion
/// application to the odd-j closed form.
std::pair<double, double> closed_form_alpha_a(int j, const ProblemParams& params);

/// Full state at odd j: exponents in closed form, D_j/Q_j/L_j by running the
/// recursion (no closed form exists for the multiplicative constants).
IterationState closed_form(int j, const ProblemParams& params, const IterationConstants& c);

/// Lower-bound envelopes (for F1, for F2) at time t using the odd-j state.
/// Requires t > L_j.
std::pair<LogValue, LogValue> envelope(double t, int j, const ProblemParams& params,
                                       const IterationConstants& c);

/// max{R, 2L, E4 eps^{-1/T1}}: beyond this time the j -> infinity envelope
/// diverges. Requires the blow-up condition and eps <= eps0.
double predicted_blowup_time(const ProblemParams& params, const IterationConstants& c);

}  // namespace nakao::iteration
