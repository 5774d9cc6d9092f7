// Deterministic 1-D density evolution on a uniform grid: the forward step is
// trapezoid convolution with the heat kernel, the backward step mixes the
// exactly normalized conditional densities of the restricted Gaussian oracle
// against the y-marginal. All divergences are trapezoid quadratures on the
// shared grid, so the whole pipeline is a noise-free oracle for the sampler's
// convergence theorems. Exactness is preferred over speed throughout; the
// backward step is the full O(n^2) mixture.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "proxsamp/errors.hpp"
#include "proxsamp/potential.hpp"

namespace proxsamp {

struct GridDensity {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double step() const {
    return (hi - lo) / static_cast<double>(values.size() - 1);
  }
  double node(std::size_t i) const {
    return lo + step() * static_cast<double>(i);
  }
};

namespace detail {
inline void check_grid(const GridDensity& g) {
  if (!(g.lo < g.hi)) throw ValidationError("grid: lo must be < hi");
  if (g.size() < 3) throw ValidationError("grid: need at least 3 nodes");
  for (double v : g.values)
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("grid: values must be finite and nonnegative");
}
inline void check_shared_grid(const GridDensity& a, const GridDensity& b) {
  if (a.size() != b.size() || a.lo != b.lo || a.hi != b.hi)
    throw ValidationError("grids do not share the same nodes");
}
}  // namespace detail

inline double trapz(const GridDensity& g) {
  double s = 0.0;
  for (double v : g.values) s += v;
  s -= 0.5 * (g.values.front() + g.values.back());
  return s * g.step();
}

inline void normalize(GridDensity& g) {
  const double mass = trapz(g);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw NumericError("grid normalization: mass is not positive");
  for (double& v : g.values) v /= mass;
}

// Normalized grid of exp(-f / eps). The density must be numerically
// negligible at both endpoints, otherwise the truncated tail mass corrupts
// every divergence downstream.
inline GridDensity grid_from_potential(const Potential& f, double lo,
                                       double hi, std::size_t n,
                                       double eps = 1.0) {
  if (f.dim() != 1)
    throw ValidationError("grid_from_potential: potential must be 1-D");
  if (eps <= 0.0)
    throw ValidationError("grid_from_potential: eps must be > 0");
  GridDensity g;
  g.lo = lo;
  g.hi = hi;
  g.values.resize(n);
  detail::check_grid(g);

  std::vector<double> fv(n);
  double fmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    fv[i] = f(g.node(i)) / eps;
    if (!std::isfinite(fv[i]))
      throw NumericError("grid_from_potential: non-finite potential value");
    fmin = std::min(fmin, fv[i]);
  }
  double vmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g.values[i] = std::exp(-(fv[i] - fmin));
    vmax = std::max(vmax, g.values[i]);
  }
  if (g.values.front() > 1e-14 * vmax || g.values.back() > 1e-14 * vmax)
    throw DomainTooSmallError(
        "grid_from_potential: exp(-f) is not negligible at the boundary of [" +
        std::to_string(lo) + ", " + std::to_string(hi) + "]");
  normalize(g);
  return g;
}

// Normalized Gaussian density grid, used to seed the density pipeline.
inline GridDensity gaussian_grid(double mean, double variance, double lo,
                                 double hi, std::size_t n) {
  if (variance <= 0.0)
    throw ValidationError("gaussian_grid: variance must be > 0");
  GridDensity g;
  g.lo = lo;
  g.hi = hi;
  g.values.resize(n);
  detail::check_grid(g);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = g.node(i) - mean;
    g.values[i] = std::exp(-0.5 * z * z / variance);
  }
  normalize(g);
  return g;
}

// Trapezoid convolution with the N(0, t) kernel. Mass that diffuses past the
// grid boundary is detected by the pre-renormalization mass deficit.
inline GridDensity heat_convolve(const GridDensity& rho, double t) {
  detail::check_grid(rho);
  if (t < 0.0) throw ValidationError("heat_convolve: t must be >= 0");
  if (t == 0.0) return rho;

  const std::size_t n = rho.size();
  const double h = rho.step();
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * t);

  std::vector<double> kernel(n, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    const double e = sq(static_cast<double>(d) * h) / (2.0 * t);
    if (e > 745.0) break;  // below the smallest positive double
    kernel[d] = std::exp(-e) * norm;
  }

  const double in_mass = trapz(rho);
  GridDensity out;
  out.lo = rho.lo;
  out.hi = rho.hi;
  out.values.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double wj =
        (j == 0 || j == n - 1) ? 0.5 * h * rho.values[j] : h * rho.values[j];
    if (wj == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = i > j ? i - j : j - i;
      out.values[i] += wj * kernel[d];
    }
  }
  const double out_mass = trapz(out);
  if (in_mass - out_mass > 1e-10 * in_mass)
    throw DomainTooSmallError(
        "heat_convolve: kernel mass leaked past the grid boundary");
  normalize(out);
  return out;
}

// Backward step of the density pipeline:
//   rho_{k+1}(x) = int pi_eps(x | y) rho_Y(y) dy,
//   pi_eps(x | y) ∝ exp(-(f(x) + (x-y)^2/(2 eta)) / eps),
// with each conditional normalized by quadrature before mixing. Columns are
// stabilized by their own maximum, so the normalizer cannot underflow for
// any y node with mass.
inline GridDensity rgo_density_step(const GridDensity& rho_y,
                                    const Potential& f, double eta,
                                    double eps = 1.0) {
  detail::check_grid(rho_y);
  if (f.dim() != 1)
    throw ValidationError("rgo_density_step: potential must be 1-D");
  if (eta <= 0.0) throw ValidationError("rgo_density_step: eta must be > 0");
  if (eps <= 0.0) throw ValidationError("rgo_density_step: eps must be > 0");

  const std::size_t n = rho_y.size();
  const double h = rho_y.step();

  std::vector<double> lf(n);  // f(x_i) / eps
  for (std::size_t i = 0; i < n; ++i) lf[i] = f(rho_y.node(i)) / eps;
  std::vector<double> lk(n);  // (x_i - y_j)^2 / (2 eta eps) by offset
  for (std::size_t d = 0; d < n; ++d)
    lk[d] = sq(static_cast<double>(d) * h) / (2.0 * eta * eps);

  GridDensity out;
  out.lo = rho_y.lo;
  out.hi = rho_y.hi;
  out.values.assign(n, 0.0);
  std::vector<double> col(n);

  for (std::size_t j = 0; j < n; ++j) {
    const double wj =
        (j == 0 || j == n - 1) ? 0.5 * h * rho_y.values[j] : h * rho_y.values[j];
    if (wj == 0.0) continue;

    double colmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = i > j ? i - j : j - i;
      const double e = -lf[i] - lk[d];
      col[i] = e;
      if (e > colmax) colmax = e;
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = col[i] - colmax;
      const double w = e > -745.0 ? std::exp(e) : 0.0;
      col[i] = w;
      z += (i == 0 || i == n - 1) ? 0.5 * w : w;
    }
    z *= h;
    if (!(z > 0.0) || !std::isfinite(z))
      throw NumericError(
          "rgo_density_step: conditional normalizer underflow at y node " +
          std::to_string(j) + " (y = " + std::to_string(rho_y.node(j)) + ")");
    const double scale = wj / z;
    for (std::size_t i = 0; i < n; ++i) out.values[i] += scale * col[i];
  }
  normalize(out);
  return out;
}

enum class GridDivergence { KL, CHI2, RENYI };

// Trapezoid quadrature of the divergence integrand on the shared grid.
inline double divergence_grid(GridDivergence kind, const GridDensity& rho,
                              const GridDensity& pi, double q = 2.0) {
  detail::check_shared_grid(rho, pi);
  constexpr double kFloor = 1e-300;
  const std::size_t n = rho.size();
  const double h = rho.step();

  if (kind == GridDivergence::RENYI && q == 1.0) kind = GridDivergence::KL;
  if (kind == GridDivergence::RENYI && q < 1.0)
    throw ValidationError("divergence_grid: Renyi order must be >= 1");

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rho.values[i];
    if (r <= kFloor) continue;
    const double p = pi.values[i];
    if (p <= kFloor)
      throw SupportError(
          "divergence_grid: rho has mass where pi vanishes (node " +
          std::to_string(i) + ")");
    double term = 0.0;
    switch (kind) {
      case GridDivergence::KL:
        term = r * (std::log(r) - std::log(p));
        break;
      case GridDivergence::CHI2:
        term = r * r / p;
        break;
      case GridDivergence::RENYI:
        term = std::exp(q * std::log(r) - (q - 1.0) * std::log(p));
        break;
    }
    acc += (i == 0 || i == n - 1) ? 0.5 * term : term;
  }
  acc *= h;

  switch (kind) {
    case GridDivergence::KL:
      return std::max(acc, 0.0);
    case GridDivergence::CHI2:
      return std::max(acc - 1.0, 0.0);
    case GridDivergence::RENYI:
      return std::max(std::log(acc) / (q - 1.0), 0.0);
  }
  return 0.0;
}

// W2 via the 1-D quantile formula: sqrt(int_0^1 (F_rho^{-1} - F_pi^{-1})^2),
// midpoint rule on 10^4 quantile nodes with inverse interpolation of the
// cumulative trapezoid CDF.
inline double w2_grid_1d(const GridDensity& rho, const GridDensity& pi,
                         std::size_t quantile_nodes = 10000) {
  detail::check_shared_grid(rho, pi);
  const std::size_t n = rho.size();
  const double h = rho.step();

  auto cdf = [&](const GridDensity& g) {
    std::vector<double> F(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
      F[i] = F[i - 1] + 0.5 * h * (g.values[i - 1] + g.values[i]);
    const double total = F.back();
    if (!(total > 0.0)) throw NumericError("w2_grid_1d: zero total mass");
    for (double& v : F) v /= total;
    return F;
  };
  const std::vector<double> fa = cdf(rho);
  const std::vector<double> fb = cdf(pi);

  auto quantile = [&](const std::vector<double>& F, std::size_t& idx,
                      double u) {
    while (idx + 2 < n && F[idx + 1] < u) ++idx;
    const double df = F[idx + 1] - F[idx];
    if (df <= 0.0) return rho.node(idx + 1);
    const double frac = std::clamp((u - F[idx]) / df, 0.0, 1.0);
    return rho.node(idx) + frac * h;
  };

  double acc = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k < quantile_nodes; ++k) {
    const double u =
        (static_cast<double>(k) + 0.5) / static_cast<double>(quantile_nodes);
    const double qa = quantile(fa, ia, u);
    const double qb = quantile(fb, ib, u);
    acc += sq(qa - qb);
  }
  return std::sqrt(acc / static_cast<double>(quantile_nodes));
}

inline double grid_mean(const GridDensity& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.node(i) * g.values[i];
    s += (i == 0 || i == g.size() - 1) ? 0.5 * t : t;
  }
  return s * g.step() / trapz(g);
}

inline double grid_variance(const GridDensity& g) {
  const double m = grid_mean(g);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = sq(g.node(i) - m) * g.values[i];
    s += (i == 0 || i == g.size() - 1) ? 0.5 * t : t;
  }
  return s * g.step() / trapz(g);
}

// Spectral gap of the diffusion generator with invariant density pi,
// estimated as the smallest nonzero eigenvalue of the discretized weighted
// Sturm-Liouville problem
//   sum c_i (psi_{i+1}-psi_i)^2  /  sum m_i psi_i^2,
// c from midpoint pi masses, m the lumped trapezoid masses. The constant mode
// is an exact null vector of the stiffness matrix; Sturm-sequence bisection
// returns the second-smallest eigenvalue of the symmetrized tridiagonal.
inline double poincare_estimate(const GridDensity& pi) {
  detail::check_grid(pi);
  const std::size_t n = pi.size();
  const double h = pi.step();
  for (double v : pi.values)
    if (!(v > 0.0))
      throw NumericError("poincare_estimate: pi must be strictly positive");

  std::vector<double> c(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    c[i] = 0.5 * (pi.values[i] + pi.values[i + 1]) / h;
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i)
    m[i] = (i == 0 || i == n - 1 ? 0.5 * h : h) * pi.values[i];

  // Symmetrized tridiagonal T = M^{-1/2} A M^{-1/2}.
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? c[i - 1] : 0.0;
    const double right = i + 1 < n ? c[i] : 0.0;
    diag[i] = (left + right) / m[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    off[i] = -c[i] / std::sqrt(m[i] * m[i + 1]);

  // Number of eigenvalues of T strictly below x (Sturm sequence / LDL^T).
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double d = diag[0] - x;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
      if (d == 0.0) d = 1e-300;
      d = diag[i] - x - off[i - 1] * off[i - 1] / d;
      if (d < 0.0) ++count;
    }
    return count;
  };

  double hi = 0.0;  // Gerschgorin upper bound
  for (std::size_t i = 0; i < n; ++i) {
    double r = diag[i];
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    hi = std::max(hi, r);
  }
  double lo = 0.0;
  if (count_below(hi) < 2)
    throw NumericError("poincare_estimate: eigenvalue bracketing failed");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(hi, 1.0); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 2)
      hi = mid;
    else
      lo = mid;
  }
  const double gap = 0.5 * (lo + hi);
  if (!(gap > 0.0))
    throw NumericError("poincare_estimate: nonpositive spectral gap");
  return gap;
}

// Two-column CSV (x, value).
inline void write_density_csv(const GridDensity& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open density output '" + path + "'");
  out << "x,value\n";
  char bx[32], bv[32];
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::snprintf(bx, sizeof(bx), "%.17g", g.node(i));
    std::snprintf(bv, sizeof(bv), "%.17g", g.values[i]);
    out << bx << ',' << bv << '\n';
  }
  if (!out) throw IoError("failed writing density to '" + path + "'");
}

}  // namespace proxsamp
