#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nakao/exponents.hpp"

namespace nakao::solver {

/// full: the coupled system as posed. linear_free: both equations without
/// damping and sources (pure waves, for scheme verification). linear_damped:
/// damping on u kept, sources off.
enum class Mode { full, linear_free, linear_damped };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct SimConfig {
  ProblemParams params;
  int nx = 2048;          ///< grid points per axis, >= 256
  double cfl = 0.4;       ///< dt = cfl * dx; wave speed is 1
  double t_max = 50.0;
  double blowup_threshold = 1e8;
  int track_every = 4;    ///< step stride between functional samples
  Mode mode = Mode::full;
  double robustness_factor = 100.0;  ///< second detection threshold = threshold * factor

  /// Domain is [-(R + t_max + 2), R + t_max + 2] (or [0, ...] radially), so
  /// the support cone |x| <= R + t never reaches the boundary.
  double domain_half_width() const { return params.R + t_max + 2.0; }
  void validate() const;
};

/// n = 1: the full line, x_i = -X + i dx. n >= 2: radial grid r_i = i dx with
/// the regularity stencil at r = 0.
struct Grid {
  int n = 1;
  int nx = 0;
  double dx = 0.0;
  double x0 = 0.0;

  static Grid make(const SimConfig& cfg);
  double coord(int i) const { return x0 + i * dx; }
  double radius(int i) const { return n == 1 ? std::abs(coord(i)) : coord(i); }
  /// Volume quadrature weight (trapezoid; |S^{n-1}| r^{n-1} dx radially).
  double weight(int i) const;
};

struct FieldState {
  std::vector<double> u, ut, v, vt;
  double t = 0.0;
};

struct Sample {
  double t = 0.0;
  double F1 = 0.0;   ///< cumulative ∫_0^t ∫ u_t Ψ dx ds (trapezoid in time)
  double F2 = 0.0;   ///< ∫ v_t(t) Ψ(t) dx
  double sup_ut = 0.0;
  double sup_vt = 0.0;
  double support_radius = 0.0;  ///< outermost grid point with max(|u|,|v|) > 1e-12
  double N1 = 0.0;      ///< ∫ |v_t|^p Ψ dx at this time
  double cum_N1 = 0.0;  ///< ∫_0^t ∫ |v_t|^p Ψ
  double N2 = 0.0;      ///< ∫ |u_t|^q Ψ dx
  double cum_N2 = 0.0;
  double u_psi = 0.0;   ///< ∫ u Ψ dx
  double v_psi = 0.0;   ///< ∫ v Ψ dx
  double e_u = 0.0;  ///< discrete energy of (u, u_t)
  double e_v = 0.0;
};

struct Blowup {
  double T_num = 0.0;
  std::string trigger;  ///< "sup_ut", "sup_vt" or "nonfinite"
};

struct FunctionalTrace {
  std::vector<Sample> samples;
  std::optional<Blowup> blowup;
  double data_term_u = 0.0;  ///< ∫ (u + u_t)(0) Φ dx on the grid
  double data_term_v = 0.0;  ///< ∫ (v + v_t)(0) Φ dx
  double threshold = 0.0;
  double robustness_factor = 0.0;
  bool finite_end = true;
  double t_end = 0.0;
  long steps = 0;
};

/// u0 = u1 = v0 = v1 = eps * (1 - |x/R|^2)^4 inside B_R, zero outside.
FieldState init_bump(const SimConfig& cfg);

/// RK4 stepping of the first-order system
///   u' = u_t,  u_t' = Δu - u_t + |v_t|^p,  v' = v_t,  v_t' = Δv + |u_t|^q,
/// with the second-order central Laplacian (radial form for n >= 2).
class Stepper {
 public:
  explicit Stepper(const SimConfig& cfg);
  const Grid& grid() const { return grid_; }
  double base_dt() const { return base_dt_; }
  /// CFL step capped by 0.1 / max(sup|u_t|^{q-1}, sup|v_t|^{p-1}) near blow-up.
  double stable_dt(double sup_ut, double sup_vt) const;
  void advance(FieldState& state, double dt);
  void rhs(const FieldState& y, FieldState& out) const;

 private:
  SimConfig cfg_;
  Grid grid_;
  bool damping_ = true;
  bool sources_ = true;
  double base_dt_ = 0.0;
  std::vector<double> rmid_pow_;      ///< (r_{i+1/2})^{n-1}, radial runs
  std::vector<double> inv_node_pow_;  ///< 1/(r_i^{n-1} dx^2), radial runs
  FieldState k1_, k2_, k3_, k4_, tmp_;
};

/// One step at the run's step-size rule; convenience wrapper over Stepper.
FieldState step(const FieldState& state, const SimConfig& cfg);

/// Integrates to t_max or blow-up, sampling the functionals every
/// track_every steps (plus forced samples at threshold crossings and the
/// final step). Blow-up is reported as data, not failure.
FunctionalTrace run(const SimConfig& cfg);

/// First sampled time at which sup|u_t| or sup|v_t| exceeds the threshold or
/// any field stops being finite.
std::optional<Blowup> detect_blowup(const FunctionalTrace& trace, double threshold);

struct IdentityReport {
  double f1_residual = 0.0;  ///< max rel. residual of F1'' + 3F1' + F1 = data + ∫∫|v_t|^pΨ + ∫|v_t|^pΨ
  double f2_residual = 0.0;  ///< max rel. residual of F2' + 2F2 = data + ∫∫|u_t|^qΨ + ∫|u_t|^qΨ
  int samples_used = 0;
  double window_t_lo = 0.0;
  double window_t_hi = 0.0;
};

/// Reconstructs F1', F1'', F2' by centered differences of the sampled
/// functionals and checks the differential identities of the mode actually
/// simulated, over the pre-blow-up window where sups stay below
/// window_sup_cap (fields still grid-resolved there). In linear modes the
/// nonlinear source terms drop out; without damping the u-side identity
/// becomes F1'' + F1' = ∫ u Ψ. Requires at least 5 usable samples.
IdentityReport verify_identities(const FunctionalTrace& trace, const SimConfig& cfg,
                                 double window_sup_cap = 100.0);

/// Discrete energy 1/2 ∫ (w_t^2 + |∇w|^2) on the grid.
double field_energy(const Grid& grid, const std::vector<double>& w,
                    const std::vector<double>& wt);

}  // namespace nakao::solver
