#include "nakao/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nakao/testfn.hpp"

namespace nakao::solver {

namespace {

constexpr double kSupportThreshold = 1e-12;

double pow_abs(double x, double e) {
  if (e == 2.0) return x * x;
  if (e == 3.0) {
    const double a = std::abs(x);
    return a * a * a;
  }
  return std::pow(std::abs(x), e);
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::full: return "full";
    case Mode::linear_free: return "linear_free";
    case Mode::linear_damped: return "linear_damped";
  }
  return "full";
}

Mode mode_from_string(const std::string& s) {
  if (s == "full") return Mode::full;
  if (s == "linear_free") return Mode::linear_free;
  if (s == "linear_damped") return Mode::linear_damped;
  throw std::invalid_argument("unknown mode: " + s);
}

void SimConfig::validate() const {
  params.validate();
  if (nx < 256) throw std::invalid_argument("nx must be >= 256");
  if (!(cfl > 0.0 && cfl <= 0.5)) throw std::invalid_argument("cfl must lie in (0, 0.5]");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("blowup_threshold must be positive");
  if (track_every < 1) throw std::invalid_argument("track_every must be >= 1");
  if (!(robustness_factor >= 1.0))
    throw std::invalid_argument("robustness_factor must be >= 1");
}

Grid Grid::make(const SimConfig& cfg) {
  // All n share the radial half-line [0, X]: the data are radial, so the n=1
  // solution is even in x and its half-line representation doubles the
  // resolution a given nx buys.
  Grid g;
  g.n = cfg.params.n;
  g.nx = cfg.nx;
  g.x0 = 0.0;
  g.dx = cfg.domain_half_width() / (cfg.nx - 1);
  return g;
}

double Grid::weight(int i) const {
  const double edge = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
  if (n == 1) return 2.0 * edge * dx;  // both half-lines
  const double r = coord(i);
  return edge * testfn::sphere_area(n) * std::pow(r, n - 1) * dx;
}

FieldState init_bump(const SimConfig& cfg) {
  cfg.validate();
  const Grid g = Grid::make(cfg);
  FieldState s;
  s.u.assign(g.nx, 0.0);
  s.ut.assign(g.nx, 0.0);
  s.v.assign(g.nx, 0.0);
  s.vt.assign(g.nx, 0.0);
  for (int i = 0; i < g.nx; ++i) {
    const double b = cfg.params.eps * testfn::bump_profile(g.radius(i), cfg.params.R);
    s.u[i] = s.ut[i] = s.v[i] = s.vt[i] = b;
  }
  return s;
}

Stepper::Stepper(const SimConfig& cfg) : cfg_(cfg), grid_(Grid::make(cfg)) {
  cfg.validate();
  damping_ = cfg.mode != Mode::linear_free;
  sources_ = cfg.mode == Mode::full;
  base_dt_ = cfg.cfl * grid_.dx;
  if (grid_.n >= 2) {
    // Conservative radial Laplacian r^{1-n} d/dr (r^{n-1} d/dr): midpoint
    // r^{n-1} factors and the inverse node factors, fixed for the run.
    rmid_pow_.resize(grid_.nx);
    inv_node_pow_.resize(grid_.nx);
    const double inv_dx2 = 1.0 / (grid_.dx * grid_.dx);
    for (int i = 0; i < grid_.nx; ++i) {
      rmid_pow_[i] = std::pow(grid_.coord(i) + 0.5 * grid_.dx, grid_.n - 1);
      inv_node_pow_[i] = i == 0 ? 0.0 : inv_dx2 / std::pow(grid_.coord(i), grid_.n - 1);
    }
  }
  const auto blank = [&](FieldState& f) {
    f.u.assign(grid_.nx, 0.0);
    f.ut.assign(grid_.nx, 0.0);
    f.v.assign(grid_.nx, 0.0);
    f.vt.assign(grid_.nx, 0.0);
  };
  blank(k1_);
  blank(k2_);
  blank(k3_);
  blank(k4_);
  blank(tmp_);
}

double Stepper::stable_dt(double sup_ut, double sup_vt) const {
  double dt = base_dt_;
  if (sources_) {
    const double stiff =
        std::max(pow_abs(sup_ut, cfg_.params.q - 1.0), pow_abs(sup_vt, cfg_.params.p - 1.0));
    if (stiff > 0.0) dt = std::min(dt, 0.1 / stiff);
  }
  return dt;
}

void Stepper::rhs(const FieldState& y, FieldState& out) const {
  const int nx = grid_.nx;
  const double inv_dx2 = 1.0 / (grid_.dx * grid_.dx);
  const double p = cfg_.params.p, q = cfg_.params.q;
  const int n = grid_.n;

  // Boundary nodes are pinned (fields vanish there by finite propagation speed).
  out.u[0] = out.ut[0] = out.v[0] = out.vt[0] = 0.0;
  out.u[nx - 1] = out.ut[nx - 1] = out.v[nx - 1] = out.vt[nx - 1] = 0.0;

  // r = 0 regularity: Δw(0) = 2n (w_1 - w_0)/dx^2 for even radial functions
  // (n = 1 this is the plain even-reflection stencil).
  {
    const double lap_u0 = 2.0 * n * (y.u[1] - y.u[0]) * inv_dx2;
    const double lap_v0 = 2.0 * n * (y.v[1] - y.v[0]) * inv_dx2;
    out.u[0] = y.ut[0];
    out.ut[0] = lap_u0 - (damping_ ? y.ut[0] : 0.0) + (sources_ ? pow_abs(y.vt[0], p) : 0.0);
    out.v[0] = y.vt[0];
    out.vt[0] = lap_v0 + (sources_ ? pow_abs(y.ut[0], q) : 0.0);
  }

  for (int i = 1; i < nx - 1; ++i) {
    double lap_u, lap_v;
    if (n == 1) {
      lap_u = (y.u[i - 1] - 2.0 * y.u[i] + y.u[i + 1]) * inv_dx2;
      lap_v = (y.v[i - 1] - 2.0 * y.v[i] + y.v[i + 1]) * inv_dx2;
    } else {
      const double cl = rmid_pow_[i - 1], cr = rmid_pow_[i];
      lap_u = (cr * (y.u[i + 1] - y.u[i]) - cl * (y.u[i] - y.u[i - 1])) * inv_node_pow_[i];
      lap_v = (cr * (y.v[i + 1] - y.v[i]) - cl * (y.v[i] - y.v[i - 1])) * inv_node_pow_[i];
    }
    out.u[i] = y.ut[i];
    out.ut[i] = lap_u - (damping_ ? y.ut[i] : 0.0) + (sources_ ? pow_abs(y.vt[i], p) : 0.0);
    out.v[i] = y.vt[i];
    out.vt[i] = lap_v + (sources_ ? pow_abs(y.ut[i], q) : 0.0);
  }
}

namespace {

void add_scaled(FieldState& out, const FieldState& base, const FieldState& k, double c) {
  const std::size_t nx = base.u.size();
  for (std::size_t i = 0; i < nx; ++i) {
    out.u[i] = base.u[i] + c * k.u[i];
    out.ut[i] = base.ut[i] + c * k.ut[i];
    out.v[i] = base.v[i] + c * k.v[i];
    out.vt[i] = base.vt[i] + c * k.vt[i];
  }
}

}  // namespace

void Stepper::advance(FieldState& state, double dt) {
  rhs(state, k1_);
  add_scaled(tmp_, state, k1_, 0.5 * dt);
  rhs(tmp_, k2_);
  add_scaled(tmp_, state, k2_, 0.5 * dt);
  rhs(tmp_, k3_);
  add_scaled(tmp_, state, k3_, dt);
  rhs(tmp_, k4_);
  const double c = dt / 6.0;
  const std::size_t nx = state.u.size();
  for (std::size_t i = 0; i < nx; ++i) {
    state.u[i] += c * (k1_.u[i] + 2.0 * k2_.u[i] + 2.0 * k3_.u[i] + k4_.u[i]);
    state.ut[i] += c * (k1_.ut[i] + 2.0 * k2_.ut[i] + 2.0 * k3_.ut[i] + k4_.ut[i]);
    state.v[i] += c * (k1_.v[i] + 2.0 * k2_.v[i] + 2.0 * k3_.v[i] + k4_.v[i]);
    state.vt[i] += c * (k1_.vt[i] + 2.0 * k2_.vt[i] + 2.0 * k3_.vt[i] + k4_.vt[i]);
  }
  state.t += dt;
}

FieldState step(const FieldState& state, const SimConfig& cfg) {
  Stepper st(cfg);
  double sup_ut = 0.0, sup_vt = 0.0;
  for (double x : state.ut) sup_ut = std::max(sup_ut, std::abs(x));
  for (double x : state.vt) sup_vt = std::max(sup_vt, std::abs(x));
  FieldState next = state;
  st.advance(next, st.stable_dt(sup_ut, sup_vt));
  return next;
}

double field_energy(const Grid& grid, const std::vector<double>& w,
                    const std::vector<double>& wt) {
  // Staggered gradient form: with Dirichlet ends and n = 1 this is the
  // quantity the semidiscrete flow conserves exactly, so any drift measures
  // the time integrator alone.
  double e = 0.0;
  for (int i = 0; i < grid.nx; ++i) e += grid.weight(i) * 0.5 * wt[i] * wt[i];
  for (int i = 0; i + 1 < grid.nx; ++i) {
    const double grad = (w[i + 1] - w[i]) / grid.dx;
    double vol = grid.dx;
    if (grid.n == 1) {
      vol *= 2.0;  // both half-lines
    } else {
      const double rm = 0.5 * (grid.coord(i) + grid.coord(i + 1));
      vol *= testfn::sphere_area(grid.n) * std::pow(rm, grid.n - 1);
    }
    e += 0.5 * vol * grad * grad;
  }
  return e;
}

namespace {

struct Sups {
  double ut = 0.0, vt = 0.0;
  bool finite = true;
};

Sups scan_sups(const FieldState& s) {
  Sups out;
  for (double x : s.ut) {
    if (!std::isfinite(x)) out.finite = false;
    out.ut = std::max(out.ut, std::abs(x));
  }
  for (double x : s.vt) {
    if (!std::isfinite(x)) out.finite = false;
    out.vt = std::max(out.vt, std::abs(x));
  }
  for (double x : s.u)
    if (!std::isfinite(x)) out.finite = false;
  for (double x : s.v)
    if (!std::isfinite(x)) out.finite = false;
  return out;
}

class FunctionalTracker {
 public:
  FunctionalTracker(const SimConfig& cfg, const Grid& grid) : cfg_(cfg), grid_(grid) {
    log_phi_.resize(grid.nx);
    weight_.resize(grid.nx);
    for (int i = 0; i < grid.nx; ++i) {
      log_phi_[i] = testfn::phi(grid.n, grid.radius(i)).log_magnitude();
      weight_[i] = grid.weight(i);
    }
  }

  double data_term(const std::vector<double>& w0, const std::vector<double>& w1) const {
    // ∫ (w0 + w1) Φ dx; the data vanish outside B_R, where Φ is moderate.
    double acc = 0.0;
    for (int i = 0; i < grid_.nx; ++i) {
      if (grid_.radius(i) > cfg_.params.R) continue;
      acc += (w0[i] + w1[i]) * std::exp(log_phi_[i]) * weight_[i];
    }
    return acc;
  }

  Sample sample(const FieldState& s, const Sups& sups) {
    Sample row;
    row.t = s.t;
    row.sup_ut = sups.finite ? sups.ut : std::numeric_limits<double>::infinity();
    row.sup_vt = sups.finite ? sups.vt : std::numeric_limits<double>::infinity();

    // The cutoff sits a fixed margin past the support cone: far enough out
    // that the discrete front's amplitude there is below ~1e-40 (so nodes
    // crossing the cutoff cannot put a sawtooth into the functionals), close
    // enough in that Psi = e^{-t}Phi stays bounded by e^{R + margin}.
    const double cone = cfg_.params.R + s.t + 48.0 * grid_.dx;
    const double p = cfg_.params.p, q = cfg_.params.q;
    double f2 = 0.0, i_ut = 0.0, n1 = 0.0, n2 = 0.0, u_psi = 0.0, v_psi = 0.0;
    for (int i = 0; i < grid_.nx; ++i) {
      const double r = grid_.radius(i);
      if (r > cone) continue;
      const double wpsi = weight_[i] * std::exp(log_phi_[i] - s.t);
      f2 += s.vt[i] * wpsi;
      i_ut += s.ut[i] * wpsi;
      n1 += pow_abs(s.vt[i], p) * wpsi;
      n2 += pow_abs(s.ut[i], q) * wpsi;
      u_psi += s.u[i] * wpsi;
      v_psi += s.v[i] * wpsi;
    }
    row.F2 = f2;
    row.N1 = n1;
    row.N2 = n2;
    row.u_psi = u_psi;
    row.v_psi = v_psi;
    if (has_prev_) {
      const double h = s.t - prev_t_;
      cum_f1_ += 0.5 * (prev_i_ut_ + i_ut) * h;
      cum_n1_ += 0.5 * (prev_n1_ + n1) * h;
      cum_n2_ += 0.5 * (prev_n2_ + n2) * h;
    }
    row.F1 = cum_f1_;
    row.cum_N1 = cum_n1_;
    row.cum_N2 = cum_n2_;
    prev_t_ = s.t;
    prev_i_ut_ = i_ut;
    prev_n1_ = n1;
    prev_n2_ = n2;
    has_prev_ = true;

    double support = 0.0;
    for (int i = 0; i < grid_.nx; ++i)
      if (std::max(std::abs(s.u[i]), std::abs(s.v[i])) > kSupportThreshold)
        support = std::max(support, grid_.radius(i));
    row.support_radius = support;

    row.e_u = field_energy(grid_, s.u, s.ut);
    row.e_v = field_energy(grid_, s.v, s.vt);
    return row;
  }

 private:
  const SimConfig& cfg_;
  const Grid& grid_;
  std::vector<double> log_phi_;
  std::vector<double> weight_;
  bool has_prev_ = false;
  double prev_t_ = 0.0, prev_i_ut_ = 0.0, prev_n1_ = 0.0, prev_n2_ = 0.0;
  double cum_f1_ = 0.0, cum_n1_ = 0.0, cum_n2_ = 0.0;
};

}  // namespace

FunctionalTrace run(const SimConfig& cfg) {
  cfg.validate();
  Stepper stepper(cfg);
  const Grid& grid = stepper.grid();
  FieldState state = init_bump(cfg);
  FunctionalTracker tracker(cfg, grid);

  FunctionalTrace trace;
  trace.threshold = cfg.blowup_threshold;
  trace.robustness_factor = cfg.robustness_factor;
  trace.data_term_u = tracker.data_term(state.u, state.ut);
  trace.data_term_v = tracker.data_term(state.v, state.vt);

  const double thr_hi = cfg.blowup_threshold * cfg.robustness_factor;
  bool crossed_lo = false, crossed_hi = false;

  Sups sups = scan_sups(state);
  trace.samples.push_back(tracker.sample(state, sups));

  long steps = 0;
  while (state.t < cfg.t_max) {
    const double dt =
        std::min(stepper.stable_dt(sups.ut, sups.vt), cfg.t_max - state.t);
    if (!(dt > 0.0) || !std::isfinite(dt)) break;
    stepper.advance(state, dt);
    ++steps;
    sups = scan_sups(state);

    const double sup = std::max(sups.ut, sups.vt);
    bool force = false;
    if (!sups.finite) force = true;
    if (!crossed_lo && sup > cfg.blowup_threshold) {
      crossed_lo = true;
      force = true;
    }
    if (!crossed_hi && sup > thr_hi) {
      crossed_hi = true;
      force = true;
    }
    const bool last = !sups.finite || crossed_hi || state.t >= cfg.t_max;
    if (force || last || steps % cfg.track_every == 0)
      trace.samples.push_back(tracker.sample(state, sups));
    if (last) break;
  }

  trace.finite_end = sups.finite;
  trace.t_end = state.t;
  trace.steps = steps;
  trace.blowup = detect_blowup(trace, cfg.blowup_threshold);
  return trace;
}

std::optional<Blowup> detect_blowup(const FunctionalTrace& trace, double threshold) {
  for (const Sample& s : trace.samples) {
    if (!std::isfinite(s.sup_ut) || !std::isfinite(s.sup_vt))
      return Blowup{s.t, "nonfinite"};
    if (s.sup_ut > threshold || s.sup_vt > threshold)
      return Blowup{s.t, s.sup_ut >= s.sup_vt ? "sup_ut" : "sup_vt"};
  }
  return std::nullopt;
}

IdentityReport verify_identities(const FunctionalTrace& trace, const SimConfig& cfg,
                                 double window_sup_cap) {
  std::vector<const Sample*> win;
  for (const Sample& s : trace.samples) {
    if (!std::isfinite(s.sup_ut) || !std::isfinite(s.sup_vt)) break;
    if (std::max(s.sup_ut, s.sup_vt) > window_sup_cap) break;
    win.push_back(&s);
  }
  if (win.size() < 5)
    throw std::invalid_argument("verify_identities needs at least 5 pre-blow-up samples");

  IdentityReport rep;
  rep.samples_used = static_cast<int>(win.size());
  rep.window_t_lo = win.front()->t;
  rep.window_t_hi = win.back()->t;

  const bool sources = cfg.mode == Mode::full;
  const bool damped = cfg.mode != Mode::linear_free;

  for (std::size_t i = 1; i + 1 < win.size(); ++i) {
    const Sample& s0 = *win[i - 1];
    const Sample& s1 = *win[i];
    const Sample& s2 = *win[i + 1];
    const double h01 = s1.t - s0.t, h12 = s2.t - s1.t, h02 = s2.t - s0.t;

    // Nonuniform three-point first and second derivatives at the middle node.
    const auto d1 = [&](double f0, double f1, double f2) {
      return -f0 * h12 / (h01 * h02) + f1 * (h12 - h01) / (h01 * h12) + f2 * h01 / (h12 * h02);
    };
    const auto d2 = [&](double f0, double f1, double f2) {
      return 2.0 * (f0 / (h01 * h02) - f1 / (h01 * h12) + f2 / (h12 * h02));
    };

    const double f1p = d1(s0.F1, s1.F1, s2.F1);
    const double f1pp = d2(s0.F1, s1.F1, s2.F1);
    double lhs1, rhs1;
    if (damped) {
      lhs1 = f1pp + 3.0 * f1p + s1.F1;
      rhs1 = trace.data_term_u + (sources ? s1.cum_N1 + s1.N1 : 0.0);
    } else {
      // Undamped u: multiplying u_tt = Δu by Ψ gives F1'' + F1' = ∫ u Ψ.
      lhs1 = f1pp + f1p;
      rhs1 = s1.u_psi;
    }
    rep.f1_residual = std::max(
        rep.f1_residual, std::abs(lhs1 - rhs1) / std::max({std::abs(lhs1), std::abs(rhs1), 1e-300}));

    const double f2p = d1(s0.F2, s1.F2, s2.F2);
    const double lhs2 = f2p + 2.0 * s1.F2;
    const double rhs2 = trace.data_term_v + (sources ? s1.cum_N2 + s1.N2 : 0.0);
    rep.f2_residual = std::max(
        rep.f2_residual, std::abs(lhs2 - rhs2) / std::max({std::abs(lhs2), std::abs(rhs2), 1e-300}));
  }
  return rep;
}

}  // namespace nakao::solver
