// The proximal sampler's Gibbs loop on particle ensembles:
//   forward   y_k | x_k ~ N(x_k, eps*eta I)
//   backward  x_{k+1} | y_k ~ exp(-(f + |.-y_k|^2/(2 eta))/eps)   (RGO)
// eps = 0 is an explicit deterministic-limit flag: the forward step is the
// identity and the backward step is prox_{eta f}, i.e. the proximal point
// method run on every chain in parallel.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "proxsamp/errors.hpp"
#include "proxsamp/potential.hpp"
#include "proxsamp/proxopt.hpp"
#include "proxsamp/rgo.hpp"
#include "proxsamp/rng.hpp"
#include "proxsamp/vec.hpp"

namespace proxsamp {

struct SamplerConfig {
  double eta = 1.0;
  double eps = 1.0;  // entropy level; 0 selects the deterministic prox limit
  std::uint64_t iterations = 0;
  std::uint64_t chains = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (eta <= 0.0) throw ValidationError("sampler: eta must be > 0");
    if (eps < 0.0) throw ValidationError("sampler: eps must be >= 0");
    if (chains < 1) throw ValidationError("sampler: chains must be >= 1");
  }
  bool deterministic_limit() const { return eps == 0.0; }
};

struct ChainEnsemble {
  int dim = 1;
  std::uint64_t iteration = 0;
  std::vector<double> positions;  // chains x dim, row-major
  RgoStats rgo_stats;

  std::size_t chains() const {
    return positions.size() / static_cast<std::size_t>(dim);
  }
  std::span<const double> chain(std::size_t c) const {
    return std::span<const double>(positions)
        .subspan(c * static_cast<std::size_t>(dim),
                 static_cast<std::size_t>(dim));
  }
};

struct YEnsemble {
  int dim = 1;
  std::uint64_t iteration = 0;
  std::vector<double> positions;
};

inline ChainEnsemble dirac_ensemble(std::span<const double> point,
                                    std::size_t chains) {
  ChainEnsemble e;
  e.dim = static_cast<int>(point.size());
  e.positions.reserve(chains * point.size());
  for (std::size_t c = 0; c < chains; ++c)
    e.positions.insert(e.positions.end(), point.begin(), point.end());
  return e;
}

// Independent Gaussian initialization with diagonal covariance.
inline ChainEnsemble gaussian_ensemble(std::span<const double> mean,
                                       std::span<const double> var_diag,
                                       std::size_t chains, Rng& rng) {
  if (mean.size() != var_diag.size())
    throw ValidationError("gaussian_ensemble: mean/variance size mismatch");
  ChainEnsemble e;
  e.dim = static_cast<int>(mean.size());
  e.positions.resize(chains * mean.size());
  for (std::size_t c = 0; c < chains; ++c)
    for (std::size_t i = 0; i < mean.size(); ++i)
      e.positions[c * mean.size() + i] =
          mean[i] + std::sqrt(var_diag[i]) * rng.normal();
  return e;
}

inline YEnsemble forward_step(const ChainEnsemble& ens,
                              const SamplerConfig& cfg, ChainRngPool& pool) {
  cfg.validate();
  YEnsemble y;
  y.dim = ens.dim;
  y.iteration = ens.iteration;
  y.positions = ens.positions;
  if (cfg.deterministic_limit()) return y;  // y_k = x_k exactly
  const double sd = std::sqrt(cfg.eps * cfg.eta);
  const std::size_t d = static_cast<std::size_t>(ens.dim);
  for (std::size_t c = 0; c < ens.chains(); ++c) {
    Rng& rng = pool.stream(c);
    for (std::size_t i = 0; i < d; ++i)
      y.positions[c * d + i] += sd * rng.normal();
  }
  return y;
}

inline ChainEnsemble backward_step(const YEnsemble& y, const Potential& f,
                                   const SamplerConfig& cfg,
                                   ChainRngPool& pool,
                                   const RgoStats& carry = {}) {
  cfg.validate();
  if (f.dim() != y.dim)
    throw ValidationError("backward_step: potential/ensemble dimension mismatch");
  ChainEnsemble out;
  out.dim = y.dim;
  out.iteration = y.iteration + 1;
  out.rgo_stats = carry;
  const std::size_t d = static_cast<std::size_t>(y.dim);
  const std::size_t n = y.positions.size() / d;
  out.positions.resize(y.positions.size());
  for (std::size_t c = 0; c < n; ++c) {
    const std::span<const double> yc =
        std::span<const double>(y.positions).subspan(c * d, d);
    try {
      std::vector<double> x;
      if (cfg.deterministic_limit()) {
        x = prox(f, cfg.eta, yc);
      } else {
        x = rgo_sample(f, yc, cfg.eta, cfg.eps, pool.stream(c),
                       out.rgo_stats);
      }
      std::copy(x.begin(), x.end(), out.positions.begin() + c * d);
    } catch (const Error& e) {
      throw WrappedError(e.exit_code(), "chain " + std::to_string(c) + ": " +
                                            e.what());
    }
  }
  if (!all_finite(out.positions))
    throw NumericError("backward_step: non-finite chain position");
  return out;
}

// K forward/backward pairs; a snapshot is recorded after every backward
// step, so the trajectory has K+1 entries including the initial state.
// Bit-reproducible per (config, init): every chain owns the stream derived
// from (seed, chain index).
inline std::vector<ChainEnsemble> run(const Potential& f,
                                      const ChainEnsemble& init,
                                      const SamplerConfig& cfg) {
  cfg.validate();
  if (f.dim() != init.dim)
    throw ValidationError("run: potential/ensemble dimension mismatch");
  if (init.chains() != cfg.chains)
    throw ValidationError("run: ensemble chain count differs from config");
  const double entries = static_cast<double>(cfg.iterations + 1) *
                         static_cast<double>(cfg.chains) *
                         static_cast<double>(f.dim());
  if (entries > 1e8)
    throw ValidationError(
        "run: snapshot storage exceeds the 1e8-entry desk-scale guard");

  ChainRngPool pool(cfg.seed, cfg.chains);
  std::vector<ChainEnsemble> trajectory;
  trajectory.reserve(cfg.iterations + 1);
  trajectory.push_back(init);
  for (std::uint64_t k = 0; k < cfg.iterations; ++k) {
    const YEnsemble y = forward_step(trajectory.back(), cfg, pool);
    trajectory.push_back(
        backward_step(y, f, cfg, pool, trajectory.back().rgo_stats));
  }
  return trajectory;
}

inline std::vector<double> ensemble_coordinate(const ChainEnsemble& e,
                                               std::size_t coord) {
  const std::size_t d = static_cast<std::size_t>(e.dim);
  std::vector<double> out(e.chains());
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = e.positions[c * d + coord];
  return out;
}

inline double ensemble_mean(const ChainEnsemble& e, std::size_t coord) {
  return sample_mean(ensemble_coordinate(e, coord));
}

inline double ensemble_variance(const ChainEnsemble& e, std::size_t coord) {
  return sample_variance(ensemble_coordinate(e, coord));
}

// CSV columns: iteration, chain, coordinate index, value.
inline void write_trajectory_csv(std::span<const ChainEnsemble> trajectory,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open trajectory output '" + path + "'");
  out << "iteration,chain,coordinate,value\n";
  char buf[32];
  for (const ChainEnsemble& e : trajectory) {
    const std::size_t d = static_cast<std::size_t>(e.dim);
    for (std::size_t c = 0; c < e.chains(); ++c)
      for (std::size_t i = 0; i < d; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.positions[c * d + i]);
        out << e.iteration << ',' << c << ',' << i << ',' << buf << '\n';
      }
  }
  if (!out) throw IoError("failed writing trajectory to '" + path + "'");
}

}  // namespace proxsamp
