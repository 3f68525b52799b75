#pragma once

#include <optional>
#include <utility>

namespace nakao {

/// Parameters of the coupled damped-wave / wave system
///   u_tt - Δu + u_t = |v_t|^p,   v_tt - Δv = |u_t|^q,
///   (u, u_t, v, v_t)(0, x) = eps * (u0, u1, v0, v1)(x),
/// with nonnegative data supported in the ball of radius R.
struct ProblemParams {
  double p;
  double q;
  int n;
  double R = 1.0;
  double eps = 1.0;

  double pq() const { return p * q; }

  /// Throws std::invalid_argument unless p,q > 1, n >= 1, R > 0, eps > 0.
  void validate() const;
};

/// A value on the extended real half-line: either finite or +infinity.
/// Infinity is a distinct state, not a sentinel double; comparisons follow
/// the extended-real order.
class ExtendedReal {
 public:
  constexpr ExtendedReal(double v) : value_(v), infinite_(false) {}
  static constexpr ExtendedReal infinity() { return ExtendedReal(true); }

  constexpr bool is_infinite() const { return infinite_; }
  /// Finite value; throws std::logic_error when infinite.
  double value() const;

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend constexpr bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
  friend constexpr bool operator<=(const ExtendedReal& a, const ExtendedReal& b) { return !(b < a); }
  friend constexpr bool operator>=(const ExtendedReal& a, const ExtendedReal& b) { return !(a < b); }

 private:
  constexpr explicit ExtendedReal(bool) : value_(0.0), infinite_(true) {}
  double value_;
  bool infinite_;
};

/// Where a point (p, q, n) sits relative to the known critical curves.
struct RegionReport {
  ExtendedReal glassey = 0.0;     ///< p_Gla(n); infinite when n = 1
  bool wakasugi_holds = false;    ///< power-nonlinearity test-function condition vs n/2
  double nakao_alpha = 0.0;       ///< iteration-method curve for the power system
  double wave_alpha = 0.0;        ///< (max{p,q}+1)/(pq-1), coupled wave system
  double shrift_alpha = 0.0;      ///< q/(pq-1), curve shift magnitude
  bool blowup_condition_holds = false;  ///< pq < p_Gla(n) (strict; always true for n = 1)
  std::optional<double> lifespan_exponent;  ///< present iff blowup_condition_holds
  double t1 = 0.0;
  double t2 = 0.0;
  bool on_boundary = false;  ///< |pq - p_Gla(n)| <= boundary_eps (n >= 2 only)
};

namespace exponents {

/// p_Gla(n): infinity for n = 1, (n+1)/(n-1) for n >= 2. Rejects n < 1.
ExtendedReal glassey_exponent(int n);

/// True iff pq lies strictly below the Glassey exponent (always true for n = 1).
bool blowup_condition(const ProblemParams& params);

/// θ = 2(pq-1)/((n+1)-(n-1)pq), the power in T(eps) <= C eps^{-θ}.
/// Throws std::domain_error when (n+1)-(n-1)pq <= 0 (outside the blow-up region).
double lifespan_exponent(const ProblemParams& params);

/// (T1, T2) with T1 = ((n+1)-(n-1)pq)/(2(pq-1)),
/// T2 = ((n+1)+2p-(n+1)pq)/(2(pq-1)). Always T1 - T2 = p(q-1)/(pq-1) > 0.
std::pair<double, double> t1_t2(const ProblemParams& params);

/// Evaluates every curve at (p, q, n). Membership is strict; boundary_eps only
/// controls the on_boundary flag, never membership.
RegionReport curve_values(const ProblemParams& params, double boundary_eps = 0.0);

}  // namespace exponents
}  // namespace nakao
