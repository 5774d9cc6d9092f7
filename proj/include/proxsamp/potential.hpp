// Target potentials f for densities pi ∝ exp(-f): evaluation, gradients,
// optional analytic proximal maps, and declared regularity metadata. The
// built-in catalogue spans the assumption regimes exercised by the sampler:
// strongly convex quadratics, the non-smooth |x|, weakly convex quartics and
// a non-convex gradient-dominated sine perturbation.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxsamp/errors.hpp"
#include "proxsamp/vec.hpp"

namespace proxsamp {

enum class InequalityClass { SLC, LC, LSI, PI, LOI, None };

struct RegularityInfo {
  std::optional<double> alpha_strong_convexity;  // f is alpha-strongly convex
  std::optional<double> beta_smoothness;         // grad f is beta-Lipschitz
  std::optional<double> lipschitz_m;             // f is M-Lipschitz
  std::optional<double> pl_alpha;                // gradient domination constant
  // Lower bound on the Hessian spectrum; negative for non-convex potentials.
  // Lets composite() certify strong convexity of f + |.-y|^2/(2 eta) even
  // when f itself is not convex.
  std::optional<double> hessian_lower_bound;
  std::optional<double> f_star;  // known minimum value, when analytic
  InequalityClass inequality_class = InequalityClass::None;
  double inequality_alpha = 0.0;
  double loi_r = 2.0;  // order r in [1,2], meaningful for LOI only
};

class Potential {
 public:
  using EvalFn = std::function<double(std::span<const double>)>;
  using GradFn =
      std::function<void(std::span<const double>, std::span<double>)>;
  using ProxFn =
      std::function<std::vector<double>(double, std::span<const double>)>;

  struct Spec {
    std::string name;
    int dim = 1;
    EvalFn eval;
    GradFn grad;           // may be empty
    ProxFn analytic_prox;  // may be empty
    RegularityInfo regularity;
  };

  Potential() = default;

  static Potential make(Spec spec) {
    if (spec.dim < 1) throw ValidationError("potential: dim must be positive");
    if (!spec.eval) throw ValidationError("potential: eval is required");
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(spec.name);
    impl->dim = spec.dim;
    impl->eval = std::move(spec.eval);
    impl->grad = std::move(spec.grad);
    impl->analytic_prox = std::move(spec.analytic_prox);
    impl->regularity = spec.regularity;
    return Potential(std::move(impl));
  }

  bool valid() const { return impl_ != nullptr; }
  int dim() const { return impl_->dim; }
  const std::string& name() const { return impl_->name; }
  const RegularityInfo& regularity() const { return impl_->regularity; }

  double operator()(std::span<const double> x) const {
    check_dim(x.size());
    return impl_->eval(x);
  }
  double operator()(double x) const {
    return (*this)(std::span<const double>(&x, 1));
  }

  bool has_grad() const { return static_cast<bool>(impl_->grad); }
  void grad_into(std::span<const double> x, std::span<double> g) const {
    if (!has_grad())
      throw CapabilityError("potential '" + name() + "' has no gradient");
    check_dim(x.size());
    impl_->grad(x, g);
  }
  std::vector<double> grad(std::span<const double> x) const {
    std::vector<double> g(x.size());
    grad_into(x, g);
    return g;
  }
  double grad1(double x) const {
    double g = 0.0;
    grad_into(std::span<const double>(&x, 1), std::span<double>(&g, 1));
    return g;
  }

  bool has_analytic_prox() const {
    return static_cast<bool>(impl_->analytic_prox);
  }
  std::vector<double> analytic_prox(double eta,
                                    std::span<const double> y) const {
    if (!has_analytic_prox())
      throw CapabilityError("potential '" + name() + "' has no analytic prox");
    if (eta <= 0.0) throw ValidationError("analytic_prox: eta must be > 0");
    check_dim(y.size());
    return impl_->analytic_prox(eta, y);
  }

  // Copy with replaced metadata (e.g. a numerically certified PL constant).
  Potential with_regularity(RegularityInfo reg) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->regularity = reg;
    return Potential(std::move(impl));
  }

  // Composite structure, set by composite(); lets the inner minimizer route
  // through the base potential's analytic prox.
  bool is_composite() const { return impl_->base != nullptr; }
  Potential composite_base() const { return Potential(impl_->base); }
  std::span<const double> composite_center() const { return impl_->center; }
  double composite_eta() const { return impl_->comp_eta; }
  double composite_eps() const { return impl_->comp_eps; }

 private:
  struct Impl {
    std::string name;
    int dim = 0;
    EvalFn eval;
    GradFn grad;
    ProxFn analytic_prox;
    RegularityInfo regularity;
    std::shared_ptr<const Impl> base;  // composite structure
    std::vector<double> center;
    double comp_eta = 0.0;
    double comp_eps = 1.0;
  };

  explicit Potential(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}

  void check_dim(std::size_t n) const {
    if (static_cast<int>(n) != impl_->dim)
      throw ValidationError("potential '" + name() + "': expected dimension " +
                            std::to_string(impl_->dim) + ", got " +
                            std::to_string(n));
  }

  std::shared_ptr<const Impl> impl_;

  friend Potential composite(const Potential&, std::span<const double>, double,
                             double);
};

namespace detail {

inline Potential make_quadratic(std::span<const double> spectrum) {
  if (spectrum.empty())
    throw ValidationError("quadratic: needs at least one curvature value");
  for (double l : spectrum)
    if (!(l > 0.0))
      throw ValidationError("quadratic: curvature must be positive");
  std::vector<double> lam(spectrum.begin(), spectrum.end());
  const double lmin = *std::min_element(lam.begin(), lam.end());
  const double lmax = *std::max_element(lam.begin(), lam.end());

  RegularityInfo reg;
  reg.alpha_strong_convexity = lmin;
  reg.beta_smoothness = lmax;
  reg.hessian_lower_bound = lmin;
  reg.f_star = 0.0;
  reg.inequality_class = InequalityClass::SLC;
  reg.inequality_alpha = lmin;

  Potential::Spec spec;
  spec.name = "quadratic";
  spec.dim = static_cast<int>(lam.size());
  spec.eval = [lam](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) s += lam[i] * x[i] * x[i];
    return 0.5 * s;
  };
  spec.grad = [lam](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < lam.size(); ++i) g[i] = lam[i] * x[i];
  };
  spec.analytic_prox = [lam](double eta, std::span<const double> y) {
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < lam.size(); ++i)
      z[i] = y[i] / (1.0 + eta * lam[i]);
    return z;
  };
  spec.regularity = reg;
  return Potential::make(std::move(spec));
}

inline Potential make_abs_1d() {
  RegularityInfo reg;
  reg.alpha_strong_convexity = 0.0;
  reg.lipschitz_m = 1.0;
  reg.hessian_lower_bound = 0.0;
  reg.f_star = 0.0;
  reg.inequality_class = InequalityClass::LC;

  Potential::Spec spec;
  spec.name = "abs_1d";
  spec.dim = 1;
  spec.eval = [](std::span<const double> x) { return std::abs(x[0]); };
  // Subgradient selection: 0 at the kink (the minimal-norm element).
  spec.grad = [](std::span<const double> x, std::span<double> g) {
    g[0] = x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0);
  };
  spec.analytic_prox = [](double eta, std::span<const double> y) {
    const double v = y[0];
    const double z = (v > eta) ? v - eta : (v < -eta ? v + eta : 0.0);
    return std::vector<double>{z};
  };
  spec.regularity = reg;
  return Potential::make(std::move(spec));
}

inline Potential make_quartic_1d() {
  RegularityInfo reg;
  reg.alpha_strong_convexity = 0.0;
  reg.hessian_lower_bound = 0.0;
  reg.f_star = 0.0;
  reg.inequality_class = InequalityClass::LC;

  Potential::Spec spec;
  spec.name = "quartic_1d";
  spec.dim = 1;
  spec.eval = [](std::span<const double> x) {
    return 0.25 * x[0] * x[0] * x[0] * x[0];
  };
  spec.grad = [](std::span<const double> x, std::span<double> g) {
    g[0] = x[0] * x[0] * x[0];
  };
  spec.regularity = reg;
  return Potential::make(std::move(spec));
}

// f(x) = x^2 + 3 sin^2(x): non-convex (f'' = 2 + 6 cos 2x >= -4) but
// gradient-dominated; the PL constant is certified numerically on a box
// rather than claimed analytically.
inline Potential make_pl_sine_1d() {
  RegularityInfo reg;
  reg.hessian_lower_bound = -4.0;
  reg.f_star = 0.0;
  reg.inequality_class = InequalityClass::None;

  Potential::Spec spec;
  spec.name = "pl_sine_1d";
  spec.dim = 1;
  spec.eval = [](std::span<const double> x) {
    const double s = std::sin(x[0]);
    return x[0] * x[0] + 3.0 * s * s;
  };
  spec.grad = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0 * x[0] + 3.0 * std::sin(2.0 * x[0]);
  };
  spec.regularity = reg;
  return Potential::make(std::move(spec));
}

// Separable f(x) = sum_i (x_i^2/2 + x_i^4/4). 1-strongly convex; the declared
// smoothness 4 is the curvature bound 1 + 3 x^2 on |x| <= 1, which covers the
// bulk of the target (its variance is below 1) and drives step-size presets.
inline Potential make_quartic_plus_quadratic(std::span<const double> params) {
  if (params.size() != 1 || params[0] < 1.0 ||
      params[0] != std::floor(params[0]))
    throw ValidationError(
        "quartic_plus_quadratic_d: params must be [dimension]");
  const int d = static_cast<int>(params[0]);

  RegularityInfo reg;
  reg.alpha_strong_convexity = 1.0;
  reg.beta_smoothness = 4.0;
  reg.hessian_lower_bound = 1.0;
  reg.f_star = 0.0;
  reg.inequality_class = InequalityClass::SLC;
  reg.inequality_alpha = 1.0;

  Potential::Spec spec;
  spec.name = "quartic_plus_quadratic_d";
  spec.dim = d;
  spec.eval = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += 0.5 * v * v + 0.25 * v * v * v * v;
    return s;
  };
  spec.grad = [](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i)
      g[i] = x[i] + x[i] * x[i] * x[i];
  };
  spec.regularity = reg;
  return Potential::make(std::move(spec));
}

}  // namespace detail

// Built-in catalogue, addressable by name from CLI configs.
inline Potential builtin(const std::string& name,
                         std::span<const double> params = {}) {
  const auto no_params = [&] {
    if (!params.empty())
      throw ValidationError("potential '" + name + "' takes no parameters");
  };
  if (name == "quadratic") return detail::make_quadratic(params);
  if (name == "abs_1d") return no_params(), detail::make_abs_1d();
  if (name == "quartic_1d") return no_params(), detail::make_quartic_1d();
  if (name == "pl_sine_1d") return no_params(), detail::make_pl_sine_1d();
  if (name == "quartic_plus_quadratic_d")
    return detail::make_quartic_plus_quadratic(params);
  throw ConfigurationError("unknown potential '" + name + "'");
}

// f_tilde(x) = (f(x) + |x - y|^2 / (2 eta)) / eps, the target of the
// restricted Gaussian oracle. Regularity constants shift accordingly:
// curvature gains 1/eta and everything rescales by 1/eps.
inline Potential composite(const Potential& f, std::span<const double> y,
                           double eta, double eps = 1.0) {
  if (eta <= 0.0) throw ValidationError("composite: eta must be > 0");
  if (eps <= 0.0) throw ValidationError("composite: eps must be > 0");
  if (static_cast<int>(y.size()) != f.dim())
    throw ValidationError("composite: center dimension " +
                          std::to_string(y.size()) + " != potential dimension " +
                          std::to_string(f.dim()));

  auto impl = std::make_shared<Potential::Impl>();
  impl->name = f.name() + "+quadratic";
  impl->dim = f.dim();
  impl->base = f.impl_;
  impl->center.assign(y.begin(), y.end());
  impl->comp_eta = eta;
  impl->comp_eps = eps;

  const Potential base = f;
  const std::vector<double> c(y.begin(), y.end());
  impl->eval = [base, c, eta, eps](std::span<const double> x) {
    double q = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) q += sq(x[i] - c[i]);
    return (base(x) + q / (2.0 * eta)) / eps;
  };
  if (base.has_grad()) {
    impl->grad = [base, c, eta, eps](std::span<const double> x,
                                     std::span<double> g) {
      base.grad_into(x, g);
      for (std::size_t i = 0; i < c.size(); ++i)
        g[i] = (g[i] + (x[i] - c[i]) / eta) / eps;
    };
  }

  const RegularityInfo& rf = f.regularity();
  RegularityInfo reg;
  if (rf.alpha_strong_convexity)
    reg.alpha_strong_convexity = (*rf.alpha_strong_convexity + 1.0 / eta) / eps;
  if (rf.hessian_lower_bound) {
    const double lb = (*rf.hessian_lower_bound + 1.0 / eta) / eps;
    reg.hessian_lower_bound = lb;
    if (!reg.alpha_strong_convexity && lb > 0.0)
      reg.alpha_strong_convexity = lb;
  }
  if (rf.beta_smoothness)
    reg.beta_smoothness = (*rf.beta_smoothness + 1.0 / eta) / eps;
  impl->regularity = reg;

  return Potential(std::move(impl));
}

// Max over points of |grad f - central difference| / (1 + |grad f|).
inline double grad_check(const Potential& f,
                         std::span<const std::vector<double>> points,
                         double h = 1e-5) {
  double worst = 0.0;
  std::vector<double> xp, xm, g;
  for (const auto& x : points) {
    g = f.grad(x);
    double err2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xp = x;
      xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (f(xp) - f(xm)) / (2.0 * h);
      err2 += sq(g[i] - fd);
    }
    const double rel = std::sqrt(err2) / (1.0 + norm2(g));
    if (!std::isfinite(rel)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, rel);
  }
  return worst;
}

// Grid infimum of |f'|^2 / (2 (f - f*)) over [lo, hi], excluding points at
// the minimum value. Certifies a PL constant on the box.
inline double certify_pl_alpha(const Potential& f, double lo, double hi,
                               std::size_t n_points = 100001) {
  if (f.dim() != 1)
    throw ValidationError("certify_pl_alpha: only 1-D potentials supported");
  if (!f.regularity().f_star)
    throw ValidationError("certify_pl_alpha: potential must declare f_star");
  const double fstar = *f.regularity().f_star;
  const double h = (hi - lo) / static_cast<double>(n_points - 1);
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double gap = f(x) - fstar;
    if (gap < 1e-12) continue;
    const double g = f.grad1(x);
    inf = std::min(inf, g * g / (2.0 * gap));
  }
  if (!std::isfinite(inf) || inf <= 0.0)
    throw NumericError("certify_pl_alpha: no positive constant found");
  return inf;
}

}  // namespace proxsamp
