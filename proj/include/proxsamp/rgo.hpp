// Restricted Gaussian oracle: exact sampling from
//   pi(x | y) ∝ exp(-(f(x) + |x-y|^2/(2 eta)) / eps)
// by minimizing the composite potential and rejection-sampling against the
// Gaussian proposal N(x*, alpha_tilde^{-1} I). Each proposal is accepted with
// probability exp(-ft(Z) + ft(x*) + (alpha_tilde/2) |Z - x*|^2), which stays
// in [0,1] whenever ft is alpha_tilde-strongly convex and x* is its minimizer.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "proxsamp/errors.hpp"
#include "proxsamp/potential.hpp"
#include "proxsamp/rng.hpp"
#include "proxsamp/vec.hpp"

namespace proxsamp {

struct RgoStats {
  std::uint64_t calls = 0;
  std::uint64_t total_trials = 0;
  std::uint64_t total_inner_iterations = 0;
  std::uint64_t max_trials_single_call = 0;

  void note_call(std::uint64_t trials, std::uint64_t inner_iterations) {
    ++calls;
    total_trials += trials;
    total_inner_iterations += inner_iterations;
    if (trials > max_trials_single_call) max_trials_single_call = trials;
  }
  double mean_trials() const {
    return calls == 0 ? 0.0
                      : static_cast<double>(total_trials) /
                            static_cast<double>(calls);
  }
};

struct MinimizeResult {
  std::vector<double> minimizer;
  std::uint64_t iterations = 0;
  double residual = 0.0;
};

// Minimize a strongly convex composite potential. Non-smooth bases with an
// analytic prox short-circuit to the exact minimizer (iterations = 0);
// otherwise gradient descent with backtracking line search runs until the
// gradient norm drops below tol.
inline MinimizeResult inner_minimize(const Potential& ft,
                                     std::span<const double> x_init,
                                     double tol,
                                     std::uint64_t budget = 10000) {
  if (tol <= 0.0) throw ValidationError("inner_minimize: tol must be > 0");

  if (ft.is_composite() && ft.composite_base().has_analytic_prox()) {
    MinimizeResult r;
    r.minimizer = ft.composite_base().analytic_prox(ft.composite_eta(),
                                                    ft.composite_center());
    return r;  // exact; eps rescales the objective but not the argmin
  }

  if (!ft.has_grad())
    throw CapabilityError(
        "inner_minimize: potential has neither gradient nor analytic prox");
  const auto& reg = ft.regularity();
  if (!reg.alpha_strong_convexity || *reg.alpha_strong_convexity <= 0.0)
    throw ValidationError(
        "inner_minimize: composite must declare positive strong convexity");

  std::vector<double> x(x_init.begin(), x_init.end());
  std::vector<double> g(x.size()), trial(x.size()), gtrial(x.size());
  double step = reg.beta_smoothness ? 1.0 / *reg.beta_smoothness : 1.0;
  double fx = ft(x);
  ft.grad_into(x, g);
  double gnorm = norm2(g);

  for (std::uint64_t it = 0; it < budget; ++it) {
    if (gnorm <= tol) {
      return MinimizeResult{std::move(x), it, gnorm};
    }
    // Armijo backtracking while the promised decrease is representable in
    // f; once f reaches its floating-point floor, |g| is the only usable
    // descent signal and acceptance switches to strict gradient decrease.
    const double f_ulp = 4e-16 * (1.0 + std::abs(fx));
    bool moved = false;
    for (int bt = 0; bt < 80 && !moved; ++bt) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step * g[i];
      const double ftrial = ft(trial);
      if (0.5 * step * gnorm * gnorm >= f_ulp) {
        if (ftrial <= fx - 0.5 * step * gnorm * gnorm) {
          x.swap(trial);
          fx = ftrial;
          ft.grad_into(x, g);
          gnorm = norm2(g);
          moved = true;
          step *= 1.5;
        } else {
          step *= 0.5;
        }
      } else {
        ft.grad_into(trial, gtrial);
        if (ftrial <= fx + f_ulp && norm2(gtrial) < gnorm) {
          x.swap(trial);
          fx = ftrial;
          g.swap(gtrial);
          gnorm = norm2(g);
          moved = true;
          step *= 1.5;
        } else {
          step *= 0.5;
        }
      }
    }
    if (!moved) {
      throw ConvergenceError(
          "inner_minimize: line search stalled at residual " +
              std::to_string(gnorm),
          x, gnorm);
    }
  }
  throw ConvergenceError("inner_minimize: budget " + std::to_string(budget) +
                             " exhausted at residual " + std::to_string(gnorm),
                         x, gnorm);
}

struct RejectionResult {
  std::vector<double> sample;
  std::uint64_t trials = 0;
};

inline RejectionResult rejection_sample(const Potential& ft,
                                        std::span<const double> x_star,
                                        double alpha_tilde, Rng& rng,
                                        std::uint64_t trial_cap = 1000000) {
  if (alpha_tilde <= 0.0)
    throw ValidationError("rejection_sample: alpha_tilde must be > 0");
  const std::size_t d = x_star.size();
  const double sd = 1.0 / std::sqrt(alpha_tilde);
  const double ft_star = ft(x_star);

  std::vector<double> z(d);
  for (std::uint64_t trial = 1; trial <= trial_cap; ++trial) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = rng.normal();
      z[i] = x_star[i] + sd * xi;
      r2 += sq(z[i] - x_star[i]);
    }
    const double log_accept = -ft(z) + ft_star + 0.5 * alpha_tilde * r2;
    if (log_accept > 1e-9)
      throw ContractViolationError(
          "rejection_sample: acceptance probability exceeds 1 "
          "(log-excess " +
          std::to_string(log_accept) +
          "); alpha_tilde or the minimizer is wrong");
    // Clamp absorbs minimizer inexactness below the contract threshold.
    const double p = std::exp(std::min(log_accept, 0.0));
    if (rng.uniform() < p) return RejectionResult{std::move(z), trial};
  }
  throw RunawayRejectionError("rejection_sample: no acceptance within " +
                              std::to_string(trial_cap) + " trials");
}

struct RgoOptions {
  double inner_tol = 1e-10;
  std::uint64_t inner_budget = 10000;
  std::uint64_t trial_cap = 1000000;
};

// One exact draw from the eps-regularized conditional given y.
inline std::vector<double> rgo_sample(const Potential& f,
                                      std::span<const double> y, double eta,
                                      double eps, Rng& rng, RgoStats& stats,
                                      const RgoOptions& opt = {}) {
  const Potential ft = composite(f, y, eta, eps);
  const auto& reg = ft.regularity();
  if (!reg.alpha_strong_convexity || *reg.alpha_strong_convexity <= 0.0)
    throw ValidationError(
        "rgo_sample: composite potential is not certifiably strongly convex");
  const double alpha_tilde = *reg.alpha_strong_convexity;

  MinimizeResult inner =
      inner_minimize(ft, y, opt.inner_tol, opt.inner_budget);
  RejectionResult rej =
      rejection_sample(ft, inner.minimizer, alpha_tilde, rng, opt.trial_cap);
  stats.note_call(rej.trials, inner.iterations);
  return std::move(rej.sample);
}

}  // namespace proxsamp
