// Proximal point method, Moreau envelope, and the contraction checks for the
// optimization-side theorems (gradient-domination contraction of the f-gap,
// 1/(1+alpha*eta)-contraction of the prox map, Hamilton-Jacobi residual of
// the envelope).
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "proxsamp/errors.hpp"
#include "proxsamp/potential.hpp"
#include "proxsamp/rgo.hpp"
#include "proxsamp/vec.hpp"

namespace proxsamp {

// prox_{eta f}(y) = argmin f + |.-y|^2/(2 eta). Analytic when the potential
// provides it; otherwise the strongly convex composite is minimized
// numerically. For non-convex potentials the composite must be certifiably
// strongly convex (1/eta must beat the negative curvature), else the argmin
// may be multivalued and we refuse rather than pick a branch.
inline std::vector<double> prox(const Potential& f, double eta,
                                std::span<const double> y,
                                double tol = 1e-10) {
  if (eta <= 0.0) throw ValidationError("prox: eta must be > 0");
  if (f.has_analytic_prox()) return f.analytic_prox(eta, y);

  const Potential ft = composite(f, y, eta, 1.0);
  const auto& reg = ft.regularity();
  if (!reg.alpha_strong_convexity || *reg.alpha_strong_convexity <= 0.0)
    throw ValidationError(
        "prox: composite is not certifiably strongly convex at eta = " +
        std::to_string(eta) + "; the minimizer may be non-unique");
  return inner_minimize(ft, y, tol).minimizer;
}

// Stationarity residual of z as a prox point of y. Uses the gradient where
// available; 1-D M-Lipschitz potentials fall back to the subgradient-interval
// distance so the kink at the soft-threshold point reports zero.
inline double prox_residual(const Potential& f, double eta,
                            std::span<const double> y,
                            std::span<const double> z) {
  if (f.dim() == 1 && f.regularity().lipschitz_m && !f.regularity().beta_smoothness) {
    const double m = *f.regularity().lipschitz_m;
    const double pull = (z[0] - y[0]) / eta;
    if (std::abs(z[0]) < 1e-14) return std::max(0.0, std::abs(pull) - m);
  }
  if (!f.has_grad()) return 0.0;
  std::vector<double> g = f.grad(z);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += (z[i] - y[i]) / eta;
  return norm2(g);
}

struct ProxTrajectory {
  std::vector<std::vector<double>> iterates;  // x_0 .. x_K
  std::vector<double> values;                 // f at each iterate
  std::vector<double> residuals;              // 0 at x_0 by convention
};

inline ProxTrajectory prox_point_run(const Potential& f, double eta,
                                     std::span<const double> x0,
                                     std::uint64_t steps,
                                     double tol = 1e-10) {
  ProxTrajectory traj;
  traj.iterates.emplace_back(x0.begin(), x0.end());
  traj.values.push_back(f(x0));
  traj.residuals.push_back(0.0);
  for (std::uint64_t k = 0; k < steps; ++k) {
    const std::vector<double>& prev = traj.iterates.back();
    std::vector<double> next = prox(f, eta, prev, tol);
    traj.residuals.push_back(prox_residual(f, eta, prev, next));
    traj.values.push_back(f(next));
    traj.iterates.push_back(std::move(next));
  }
  return traj;
}

// Moreau envelope value f(x_t) + |x_t - x|^2 / (2t) with x_t = prox_{tf}(x).
inline double moreau_envelope(const Potential& f, double t,
                              std::span<const double> x, double tol = 1e-10) {
  if (t <= 0.0) throw ValidationError("moreau_envelope: t must be > 0");
  const std::vector<double> xt = prox(f, t, x, tol);
  double q = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) q += sq(xt[i] - x[i]);
  return f(xt) + q / (2.0 * t);
}

// Ratio (f(x') - f*) / (f(x) - f*) after one prox step; under alpha-PL the
// theorem bound is 1/(1+alpha*eta)^2, with equality for the quadratic.
inline double pl_contraction_check(const Potential& f, double eta,
                                   std::span<const double> x,
                                   double tol = 1e-10) {
  if (!f.regularity().f_star)
    throw ValidationError("pl_contraction_check: potential must declare f_star");
  const double fstar = *f.regularity().f_star;
  const double gap = f(x) - fstar;
  if (gap <= 0.0)
    throw ValidationError(
        "pl_contraction_check: f(x) equals the minimum; ratio undefined");
  const std::vector<double> xp = prox(f, eta, x, tol);
  return (f(xp) - fstar) / gap;
}

// |prox(x) - prox(y)| / |x - y|.
inline double prox_contraction_check(const Potential& f, double eta,
                                     std::span<const double> x,
                                     std::span<const double> y,
                                     double tol = 1e-10) {
  const double denom = dist2(x, y);
  if (denom == 0.0)
    throw ValidationError("prox_contraction_check: x == y; ratio undefined");
  const std::vector<double> px = prox(f, eta, x, tol);
  const std::vector<double> py = prox(f, eta, y, tol);
  return dist2(px, py) / denom;
}

// Max over the t grid of |d/dt envelope + |x_t - x|^2 / (2 t^2)|, the
// Hamilton-Jacobi residual of the Moreau envelope (central differences).
inline double hamilton_jacobi_check(const Potential& f,
                                    std::span<const double> x,
                                    std::span<const double> t_grid,
                                    double fd_step = 1e-4) {
  double worst = 0.0;
  for (double t : t_grid) {
    if (t <= fd_step)
      throw ValidationError("hamilton_jacobi_check: t grid too close to 0");
    const double ep = moreau_envelope(f, t + fd_step, x, 1e-12);
    const double em = moreau_envelope(f, t - fd_step, x, 1e-12);
    const double dEdt = (ep - em) / (2.0 * fd_step);
    const std::vector<double> xt = prox(f, t, x, 1e-12);
    double q = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) q += sq(xt[i] - x[i]);
    worst = std::max(worst, std::abs(dEdt + q / (2.0 * t * t)));
  }
  return worst;
}

}  // namespace proxsamp
