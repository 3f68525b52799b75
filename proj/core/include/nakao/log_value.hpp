#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace nakao {

// Signed value stored as (sign, log of magnitude). The eigenfunction grows
// like e^{|x|} and the iteration constants like exp((pq)^{j/2}), both far past
// double range, so everything multiplicative stays in the log domain and is
// exponentiated only for final reporting.
class LogValue {
 public:
  LogValue() : log_mag_(-std::numeric_limits<double>::infinity()), sign_(0) {}

  static LogValue zero() { return LogValue(); }
  static LogValue one() { return from_log(0.0, +1); }

  static LogValue from_linear(double x) {
    if (x == 0.0) return LogValue();
    if (std::isnan(x)) throw std::invalid_argument("LogValue from NaN");
    return from_log(std::log(std::abs(x)), x > 0.0 ? +1 : -1);
  }

  static LogValue from_log(double log_magnitude, int sign = +1) {
    if (sign == 0) return LogValue();
    LogValue v;
    v.log_mag_ = log_magnitude;
    v.sign_ = sign > 0 ? +1 : -1;
    return v;
  }

  double log_magnitude() const { return log_mag_; }
  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }

  /// Round trip to linear scale; underflows to 0 and overflows to ±inf.
  double to_double() const {
    if (sign_ == 0) return 0.0;
    return sign_ * std::exp(log_mag_);
  }

  LogValue operator*(const LogValue& o) const {
    if (sign_ == 0 || o.sign_ == 0) return LogValue();
    return from_log(log_mag_ + o.log_mag_, sign_ * o.sign_);
  }

  LogValue operator/(const LogValue& o) const {
    if (o.sign_ == 0) throw std::domain_error("LogValue division by zero");
    if (sign_ == 0) return LogValue();
    return from_log(log_mag_ - o.log_mag_, sign_ * o.sign_);
  }

  /// Real power; defined for nonnegative values (0^e = 0 for e > 0, 1 for e = 0).
  LogValue pow(double e) const {
    if (sign_ < 0) throw std::domain_error("LogValue::pow of a negative value");
    if (sign_ == 0) {
      if (e > 0.0) return LogValue();
      if (e == 0.0) return one();
      throw std::domain_error("LogValue::pow of zero with nonpositive exponent");
    }
    return from_log(log_mag_ * e, +1);
  }

  LogValue operator-() const {
    if (sign_ == 0) return LogValue();
    return from_log(log_mag_, -sign_);
  }

  LogValue operator+(const LogValue& o) const {
    if (sign_ == 0) return o;
    if (o.sign_ == 0) return *this;
    const double hi = std::max(log_mag_, o.log_mag_);
    const double lo = std::min(log_mag_, o.log_mag_);
    if (sign_ == o.sign_)
      return from_log(hi + std::log1p(std::exp(lo - hi)), sign_);
    if (log_mag_ == o.log_mag_) return LogValue();
    const int dominant = log_mag_ > o.log_mag_ ? sign_ : o.sign_;
    return from_log(hi + std::log1p(-std::exp(lo - hi)), dominant);
  }

  LogValue operator-(const LogValue& o) const { return *this + (-o); }

  friend bool operator==(const LogValue& a, const LogValue& b) {
    if (a.sign_ != b.sign_) return false;
    return a.sign_ == 0 || a.log_mag_ == b.log_mag_;
  }
  friend bool operator<(const LogValue& a, const LogValue& b) {
    if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
    if (a.sign_ == 0) return false;
    return a.sign_ > 0 ? a.log_mag_ < b.log_mag_ : a.log_mag_ > b.log_mag_;
  }
  friend bool operator>(const LogValue& a, const LogValue& b) { return b < a; }
  friend bool operator<=(const LogValue& a, const LogValue& b) { return !(b < a); }
  friend bool operator>=(const LogValue& a, const LogValue& b) { return !(a < b); }

  /// Stable log-sum-exp of positive terms given by their logs.
  static double log_sum(std::span<const double> logs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double l : logs) hi = std::max(hi, l);
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - hi);
    return hi + std::log(acc);
  }

 private:
  double log_mag_;
  int sign_;
};

}  // namespace nakao
