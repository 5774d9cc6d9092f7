// Every convergence-rate bound as an explicit function of the iteration
// count, so measured divergences can be plotted against certified curves.
//
//   SLC      W2_k  <= W2_0 / (1+a*eta)^k
//   LC       KL_k  <= W2_0^2 / (k*eta), refined to
//            KL_0 / (1 + k*eta*KL_0/W2_0^2) when KL_0 is known
//   LSI      KL_k  <= KL_0 / (1+a*eta)^{2k},  R_q scaled by 2k/q
//   PI       chi2_k <= chi2_0 / (1+a*eta)^{2k}; Renyi piecewise linear-log
//            then geometric after k0 = ceil(q (R_0 - 1) / (2 log(1+a*eta)))
//   LOI      piecewise with waiting time c0 = C q (R_0^{2/r-1} - 1) /
//            ((2/r-1) log(1+a*eta)); the stated constant is C = 68, the
//            proof's conservative variant C = 136 stays reachable
//   EPS      same formula as LSI KL; the rate is independent of the entropy
//            regularization level
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "proxsamp/errors.hpp"

namespace proxsamp {

inline double bound_slc(double w2_0, double alpha, double eta,
                        std::uint64_t k) {
  if (w2_0 < 0.0) throw ValidationError("bound_slc: W2_0 must be >= 0");
  if (alpha < 0.0) throw ValidationError("bound_slc: alpha must be >= 0");
  if (eta <= 0.0) throw ValidationError("bound_slc: eta must be > 0");
  return w2_0 / std::pow(1.0 + alpha * eta, static_cast<double>(k));
}

inline double bound_lc(double w2_0, std::optional<double> h_0, double eta,
                       std::uint64_t k) {
  if (w2_0 < 0.0) throw ValidationError("bound_lc: W2_0 must be >= 0");
  if (eta <= 0.0) throw ValidationError("bound_lc: eta must be > 0");
  if (h_0) {
    // Refined form; dominated by the simple one for every k >= 1.
    return *h_0 /
           (1.0 + static_cast<double>(k) * eta * *h_0 / (w2_0 * w2_0));
  }
  if (k == 0)
    throw ValidationError("bound_lc: undefined at k = 0 without H_0");
  return w2_0 * w2_0 / (static_cast<double>(k) * eta);
}

enum class LsiBoundKind { KL, RENYI };

inline double bound_lsi(LsiBoundKind kind, double d_0, double alpha,
                        double eta, double q, std::uint64_t k) {
  if (d_0 < 0.0) throw ValidationError("bound_lsi: D_0 must be >= 0");
  if (alpha < 0.0) throw ValidationError("bound_lsi: alpha must be >= 0");
  if (eta <= 0.0) throw ValidationError("bound_lsi: eta must be > 0");
  if (kind == LsiBoundKind::KL) q = 1.0;
  if (q < 1.0) throw ValidationError("bound_lsi: q must be >= 1");
  const double expo = 2.0 * static_cast<double>(k) / q;
  return d_0 / std::pow(1.0 + alpha * eta, expo);
}

enum class PiBoundKind { CHI2, RENYI };

inline double bound_pi(PiBoundKind kind, double d_0, double alpha, double eta,
                       double q, std::uint64_t k) {
  if (d_0 < 0.0) throw ValidationError("bound_pi: D_0 must be >= 0");
  if (alpha <= 0.0) throw ValidationError("bound_pi: alpha must be > 0");
  if (eta <= 0.0) throw ValidationError("bound_pi: eta must be > 0");
  const double rate = std::log1p(alpha * eta);

  if (kind == PiBoundKind::CHI2)
    return d_0 / std::pow(1.0 + alpha * eta, 2.0 * static_cast<double>(k));

  if (q < 2.0)
    throw ValidationError("bound_pi: Renyi branch requires q >= 2");
  const double kd = static_cast<double>(k);
  const double threshold = q * (d_0 - 1.0) / (2.0 * rate);
  if (kd <= threshold) return d_0 - 2.0 * kd * rate / q;
  const double k0 = std::ceil(threshold);
  return std::exp(-2.0 * (kd - k0) * rate / q);
}

inline double bound_loi(double r_0, double alpha, double eta, double q,
                        double r, std::uint64_t k,
                        double loi_constant = 68.0) {
  if (r_0 < 0.0) throw ValidationError("bound_loi: R_0 must be >= 0");
  if (alpha <= 0.0) throw ValidationError("bound_loi: alpha must be > 0");
  if (eta <= 0.0) throw ValidationError("bound_loi: eta must be > 0");
  if (q < 2.0) throw ValidationError("bound_loi: q must be >= 2");
  if (r == 2.0)
    throw ValidationError(
        "bound_loi: r = 2 is the log-Sobolev case; use bound_lsi");
  if (r < 1.0 || r > 2.0)
    throw ValidationError("bound_loi: r must lie in [1, 2)");
  if (loi_constant <= 0.0)
    throw ValidationError("bound_loi: constant must be > 0");

  const double rate = std::log1p(alpha * eta);
  const double p = 2.0 / r - 1.0;
  const double c0 = loi_constant * q * (std::pow(r_0, p) - 1.0) / (p * rate);
  const double kd = static_cast<double>(k);
  if (kd <= c0) {
    const double base =
        std::pow(r_0, p) - p * kd * rate / (loi_constant * q);
    return std::pow(base, r / (2.0 - r));
  }
  const double c0_ceil = std::ceil(c0);
  return std::exp(-(kd - c0_ceil) * rate / (loi_constant * q));
}

inline double bound_eps_generalized(double h_0, double alpha, double eta,
                                    std::uint64_t k) {
  // Same contraction as the log-Sobolev KL bound; the entropy level does not
  // enter.
  return bound_lsi(LsiBoundKind::KL, h_0, alpha, eta, 1.0, k);
}

enum class StepSizeRegime { SmoothBeta, LipschitzM };

// Smooth regime: eta = c/(beta d) with c < 1 so beta*eta < 1 and the
// rejection condition number stays finite. Lipschitz regime: the non-smooth
// threshold 1/(16 M^2 d) under which expected trials stay below 2.
inline double suggest_step_size(StepSizeRegime regime, double constant, int dim,
                                double smooth_prefactor = 0.5) {
  if (constant <= 0.0)
    throw ValidationError("suggest_step_size: constant must be > 0");
  if (dim < 1) throw ValidationError("suggest_step_size: dim must be >= 1");
  switch (regime) {
    case StepSizeRegime::SmoothBeta:
      if (smooth_prefactor <= 0.0 || smooth_prefactor >= 1.0)
        throw ValidationError(
            "suggest_step_size: smooth prefactor must lie in (0, 1)");
      return smooth_prefactor / (constant * static_cast<double>(dim));
    case StepSizeRegime::LipschitzM:
      return 1.0 / (16.0 * constant * constant * static_cast<double>(dim));
  }
  throw ValidationError("suggest_step_size: unknown regime");
}

// Condition number of the rejection-sampling composite for a beta-smooth
// potential at step size eta; expected trials are bounded by its d/2 power.
inline double rejection_condition_number(double beta, double eta) {
  if (beta <= 0.0 || eta <= 0.0)
    throw ValidationError("rejection_condition_number: beta, eta must be > 0");
  if (beta * eta >= 1.0)
    throw ValidationError(
        "rejection_condition_number: requires beta*eta < 1");
  return (1.0 + beta * eta) / (1.0 - beta * eta);
}

enum class BoundKind {
  SLC,
  LC,
  LSI_KL,
  LSI_RENYI,
  PI_CHI2,
  PI_RENYI,
  LOI,
  EPS_GENERALIZED
};

inline std::string bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::SLC: return "SLC";
    case BoundKind::LC: return "LC";
    case BoundKind::LSI_KL: return "LSI_KL";
    case BoundKind::LSI_RENYI: return "LSI_RENYI";
    case BoundKind::PI_CHI2: return "PI_CHI2";
    case BoundKind::PI_RENYI: return "PI_RENYI";
    case BoundKind::LOI: return "LOI";
    case BoundKind::EPS_GENERALIZED: return "EPS_GENERALIZED";
  }
  return "?";
}

inline std::optional<BoundKind> bound_kind_from_name(const std::string& s) {
  for (BoundKind k :
       {BoundKind::SLC, BoundKind::LC, BoundKind::LSI_KL, BoundKind::LSI_RENYI,
        BoundKind::PI_CHI2, BoundKind::PI_RENYI, BoundKind::LOI,
        BoundKind::EPS_GENERALIZED})
    if (bound_kind_name(k) == s) return k;
  return std::nullopt;
}

// A theorem identifier plus its parameters, evaluable at any iteration.
struct RateBound {
  BoundKind kind = BoundKind::LSI_KL;
  double initial = 0.0;  // D_0 (W2_0 for SLC/LC)
  double alpha = 0.0;
  double eta = 1.0;
  double q = 2.0;
  double r = 1.0;
  double loi_constant = 68.0;
  std::optional<double> h_0;  // refined LC numerator

  double evaluate(std::uint64_t k) const {
    switch (kind) {
      case BoundKind::SLC:
        return bound_slc(initial, alpha, eta, k);
      case BoundKind::LC:
        return bound_lc(initial, h_0, eta, k);
      case BoundKind::LSI_KL:
        return bound_lsi(LsiBoundKind::KL, initial, alpha, eta, 1.0, k);
      case BoundKind::LSI_RENYI:
        return bound_lsi(LsiBoundKind::RENYI, initial, alpha, eta, q, k);
      case BoundKind::PI_CHI2:
        return bound_pi(PiBoundKind::CHI2, initial, alpha, eta, q, k);
      case BoundKind::PI_RENYI:
        return bound_pi(PiBoundKind::RENYI, initial, alpha, eta, q, k);
      case BoundKind::LOI:
        return bound_loi(initial, alpha, eta, q, r, k, loi_constant);
      case BoundKind::EPS_GENERALIZED:
        return bound_eps_generalized(initial, alpha, eta, k);
    }
    throw ValidationError("RateBound: unknown theorem identifier");
  }
};

}  // namespace proxsamp
