#pragma once

#include <span>

#include "nakao/log_value.hpp"
#include "nakao/quadrature.hpp"

namespace nakao::testfn {

using quadrature::QuadratureSpec;

/// Surface area |S^{n-1}| of the unit sphere in R^n.
double sphere_area(int n);

/// The Laplace eigenfunction with ΔΦ = Φ:
///   Φ(x) = e^x + e^{-x}               (n = 1, written radially in r = |x|),
///   Φ(x) = ∫_{S^{n-1}} e^{x·ω} dσ_ω   (n >= 2),
/// reduced by rotational invariance to the one-dimensional form
///   |S^{n-2}| ∫_0^π e^{r cos θ} sin^{n-2}θ dθ,
/// and evaluated in the log domain (Φ grows like e^r). Increasing in r and
/// bounded below by |S^{n-1}|.
LogValue phi(int n, double r);
LogValue phi(int n, double r, const QuadratureSpec& spec);

/// Ψ(t, x) = e^{-t} Φ(x); satisfies ∂_t Ψ = -Ψ by construction.
LogValue psi(int n, double t, double r);

/// ∫_{B_radius} Φ(x) dx as the |S^{n-1}|-weighted radial integral
/// ∫_0^radius Φ(r) r^{n-1} dr, refined until successive node doublings agree
/// to spec.refinement_tol.
LogValue phi_ball_integral(int n, double radius, const QuadratureSpec& spec = {});

/// Empirical constant in ∫_{B_{R+t}} Ψ(t,x) dx <= C1 (R+t)^{(n-1)/2}, taken as
/// the supremum of the ratio over a uniform time grid.
struct C1Estimate {
  double c1 = 0.0;          ///< sup of the ratio over the grid
  double t_max = 0.0;       ///< grid extent
  double dt_grid = 0.0;     ///< grid spacing
  double last_decade_variation = 0.0;  ///< (max-min)/max of the ratio over [t_max-10, t_max]
};
C1Estimate c1_estimate(int n, double R, double t_max, double dt_grid = 0.25);

/// Max over sample_radii of |ΔΦ - Φ|/Φ with the radial Laplacian
/// Φ'' + (n-1)/r Φ' formed by central differences of step h.
/// Requires h in [1e-4, 1e-2] and radii in (0, 20].
double verify_laplacian_eigen(int n, std::span<const double> sample_radii, double h);

/// Convergence measure for log Φ(r) - (r - (n-1)/2 log r): the largest
/// successive variation over the upper half of [r_lo, r_hi].
double asymptotic_flatness(int n, double r_lo = 20.0, double r_hi = 60.0, double dr = 2.0);

/// Radial bump profile (1 - (r/R)^2)^4 on [0, R), zero outside; C^3 at |x| = R.
double bump_profile(double r, double R);

/// ∫_{B_R} bump(|x|) Φ(x) dx, linear scale (magnitudes stay moderate for the
/// support radii in use).
double bump_phi_integral(int n, double R);

}  // namespace nakao::testfn
