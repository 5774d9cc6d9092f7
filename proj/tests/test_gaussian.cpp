#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "proxsamp/density1d.hpp"
#include "proxsamp/gaussian.hpp"
#include "proxsamp/rng.hpp"

using namespace proxsamp;

namespace {

// Quadrature oracle: divergences between 1-D Gaussians via grid integration,
// independent of the closed forms under test.
double quad_divergence(GridDivergence kind, double ma, double va, double mb,
                       double vb, double q = 2.0) {
  const GridDensity rho = gaussian_grid(ma, va, -16.0, 16.0, 16001);
  const GridDensity pi = gaussian_grid(mb, vb, -16.0, 16.0, 16001);
  return divergence_grid(kind, rho, pi, q);
}

}  // namespace

TEST_CASE("gaussian state validation", "[gaussian]") {
  CHECK_NOTHROW(gaussian_1d(0.0, 1.0));
  CHECK_THROWS_AS(gaussian_1d(0.0, -1.0), ValidationError);
  SymMatrix bad(2);
  bad(0, 0) = 1.0;
  bad(1, 1) = 1.0;
  bad(0, 1) = 0.5;
  bad(1, 0) = 0.1;  // asymmetric
  CHECK_THROWS_AS(GaussianState({0.0, 0.0}, bad), ValidationError);
}

TEST_CASE("gaussian forward step", "[gaussian]") {
  const GaussianState s = gaussian_1d(1.0, 5.0);
  const GaussianState f = gaussian_forward(s, 1.0, 1.0);
  CHECK(f.mean[0] == 1.0);
  CHECK(f.cov(0, 0) == Approx(6.0));

  const GaussianState id = gaussian_forward(s, 1.0, 0.0);
  CHECK(id.cov(0, 0) == 5.0);

  GaussianState s2({0.0, 0.0},
                   SymMatrix::diagonal(std::vector<double>{1.0, 2.0}));
  const GaussianState f2 = gaussian_forward(s2, 0.5, 1.0);
  CHECK(f2.cov(0, 0) == Approx(1.5));
  CHECK(f2.cov(1, 1) == Approx(2.5));
}

TEST_CASE("gaussian step recursion", "[gaussian]") {
  const SymMatrix target = SymMatrix::scalar(1.0);
  const GaussianState s0 = gaussian_1d(1.0, 5.0);
  const GaussianState s1 = gaussian_step(s0, target, 1.0);
  CHECK(s1.mean[0] == Approx(0.5));
  CHECK(s1.cov(0, 0) == Approx(2.0));

  // Stationarity of the target.
  GaussianState fixed({0.0, 0.0},
                      SymMatrix::diagonal(std::vector<double>{0.7, 2.3}));
  const GaussianState next = gaussian_step(
      fixed, SymMatrix::diagonal(std::vector<double>{0.7, 2.3}), 0.8);
  CHECK(next.mean[0] == Approx(0.0).margin(1e-15));
  CHECK(next.cov(0, 0) == Approx(0.7).margin(1e-12));
  CHECK(next.cov(1, 1) == Approx(2.3).margin(1e-12));

  // Variance-gap contraction |sigma_k^2 - 1| = |sigma_0^2 - 1| / 4^k.
  GaussianState s = s0;
  for (int k = 1; k <= 20; ++k) {
    s = gaussian_step(s, target, 1.0);
    const double expected = 4.0 * std::pow(4.0, -k);
    CHECK(std::abs(std::abs(s.cov(0, 0) - 1.0) - expected) < 1e-12);
  }

  SymMatrix notspd(1);
  notspd(0, 0) = -1.0;
  CHECK_THROWS_AS(gaussian_step(s0, notspd, 1.0), ValidationError);
}

TEST_CASE("step mean follows the proximal point map", "[gaussian]") {
  CHECK(gaussian_mean_is_prox_check(gaussian_1d(2.0, 1.0),
                                    SymMatrix::scalar(1.0), 1.0));
  // Sigma = diag(1,4), m = (1,1): prox = (0.5, 0.8).
  GaussianState s({1.0, 1.0}, SymMatrix::identity(2));
  const SymMatrix sigma = SymMatrix::diagonal(std::vector<double>{1.0, 4.0});
  const GaussianState next = gaussian_step(s, sigma, 1.0);
  CHECK(next.mean[0] == Approx(0.5).margin(1e-12));
  CHECK(next.mean[1] == Approx(0.8).margin(1e-12));
  CHECK(gaussian_mean_is_prox_check(s, sigma, 1.0));

  GaussianState zero({0.0, 0.0}, SymMatrix::identity(2));
  CHECK(gaussian_mean_is_prox_check(zero, sigma, 0.7));
}

TEST_CASE("gaussian KL closed form", "[gaussian]") {
  const GaussianState std1 = gaussian_1d(0.0, 1.0);
  CHECK(kl_gauss(std1, std1) == 0.0);
  CHECK(kl_gauss(gaussian_1d(1.0, 1.0), std1) == Approx(0.5));

  const double e = std::exp(1.0);
  const double kl = kl_gauss(gaussian_1d(0.0, e), std1);
  CHECK(kl == Approx((e - 2.0) / 2.0).margin(1e-12));
  CHECK(kl == Approx(quad_divergence(GridDivergence::KL, 0.0, e, 0.0, 1.0))
                  .margin(1e-6));
}

TEST_CASE("gaussian W2 closed form", "[gaussian]") {
  const GaussianState std1 = gaussian_1d(0.0, 1.0);
  CHECK(w2_gauss(std1, std1) == Approx(0.0).margin(1e-12));
  CHECK(w2_gauss(gaussian_1d(1.0, 1.0), std1) == Approx(1.0).margin(1e-12));
  CHECK(w2_gauss(gaussian_1d(0.0, 4.0), std1) == Approx(1.0).margin(1e-9));
}

TEST_CASE("gaussian chi-squared closed form", "[gaussian]") {
  const GaussianState std1 = gaussian_1d(0.0, 1.0);
  CHECK(chi2_gauss(std1, std1) == Approx(0.0).margin(1e-12));

  const double c = chi2_gauss(gaussian_1d(0.0, 0.5), std1);
  CHECK(c == Approx(1.0 / std::sqrt(0.75) - 1.0).margin(1e-12));
  CHECK(c == Approx(quad_divergence(GridDivergence::CHI2, 0.0, 0.5, 0.0, 1.0))
                 .margin(1e-6));

  // Integrability boundary at sigma^2 = 2.
  CHECK(std::isinf(chi2_gauss(gaussian_1d(0.0, 2.5), std1)));
  CHECK(std::isinf(chi2_gauss(gaussian_1d(0.0, 2.0), std1)));
  CHECK(std::isfinite(chi2_gauss(gaussian_1d(0.0, 1.9), std1)));
}

TEST_CASE("gaussian Renyi divergence", "[gaussian]") {
  const GaussianState std1 = gaussian_1d(0.0, 1.0);
  CHECK(renyi_gauss(1.5, std1, std1) == Approx(0.0).margin(1e-12));

  // R_2 = log(1 + chi^2) across a spread of pairs.
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const GaussianState a =
        gaussian_1d(2.0 * rng.uniform() - 1.0, 0.4 + rng.uniform());
    const double c = chi2_gauss(a, std1);
    const double r2 = renyi_gauss(2.0, a, std1);
    if (std::isinf(c)) {
      CHECK(std::isinf(r2));
    } else {
      CHECK(r2 == Approx(std::log1p(c)).margin(1e-12));
    }
  }

  // Monotone in the order.
  const GaussianState a = gaussian_1d(0.3, 1.2);
  CHECK(renyi_gauss(1.5, a, std1) <= renyi_gauss(3.0, a, std1));
  CHECK(renyi_gauss(1.5, a, std1) ==
        Approx(quad_divergence(GridDivergence::RENYI, 0.3, 1.2, 0.0, 1.0, 1.5))
            .margin(1e-6));

  for (int i = 0; i < 100; ++i) {
    const GaussianState x =
        gaussian_1d(rng.uniform() - 0.5, 0.6 + 0.8 * rng.uniform());
    double prev = renyi_gauss(1.0, x, std1);
    for (double q : {1.3, 1.7, 2.0, 2.4, 2.9}) {
      const double cur = renyi_gauss(q, x, std1);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }

  // q -> 1 recovers KL.
  CHECK(renyi_gauss(1.0 + 1e-9, a, std1) ==
        Approx(kl_gauss(a, std1)).margin(1e-6));
}

TEST_CASE("correlated covariances exercise the spectral path", "[gaussian]") {
  SymMatrix ca(2), cb(2);
  ca(0, 0) = 1.2; ca(1, 1) = 0.8; ca(0, 1) = ca(1, 0) = 0.3;
  cb(0, 0) = 1.0; cb(1, 1) = 1.5; cb(0, 1) = cb(1, 0) = -0.2;
  const GaussianState a({0.4, -0.1}, ca);
  const GaussianState b({0.0, 0.0}, cb);

  CHECK(kl_gauss(a, a) == Approx(0.0).margin(1e-12));
  CHECK(w2_gauss(a, b) == Approx(w2_gauss(b, a)).margin(1e-12));
  const double c = chi2_gauss(a, b);
  REQUIRE(std::isfinite(c));
  CHECK(renyi_gauss(2.0, a, b) == Approx(std::log1p(c)).margin(1e-12));

  // Prox check against the linear-solve route with a correlated target.
  CHECK(gaussian_mean_is_prox_check(a, cb, 0.6));
}

TEST_CASE("mean-shift KL contracts at exactly (1+alpha*eta)^{-2k}",
          "[gaussian]") {
  const SymMatrix target = SymMatrix::scalar(1.0);
  const GaussianState pi = gaussian_1d(0.0, 1.0);
  GaussianState s = gaussian_1d(3.0, 1.0);
  const double kl0 = kl_gauss(s, pi);
  for (int k = 1; k <= 20; ++k) {
    s = gaussian_step(s, target, 1.0);
    CHECK(std::abs(kl_gauss(s, pi) - kl0 * std::pow(4.0, -k)) < 1e-12);
  }
}

TEST_CASE("variance-shift KL is strictly dominated by the LSI bound",
          "[gaussian]") {
  const GaussianState pi = gaussian_1d(0.0, 1.0);
  const SymMatrix target = SymMatrix::scalar(1.0);
  GaussianState s = gaussian_1d(0.0, 5.0);
  const double kl0 = kl_gauss(s, pi);
  for (int k = 1; k <= 10; ++k) {
    s = gaussian_step(s, target, 1.0);
    CHECK(kl_gauss(s, pi) < kl0 * std::pow(4.0, -k));
  }
}

TEST_CASE("W2 rate dominates the exact sequence", "[gaussian]") {
  const SymMatrix sigma = SymMatrix::diagonal(std::vector<double>{1.0, 4.0});
  const double alpha = 0.25;  // min eigenvalue of sigma^{-1}
  const double eta = 1.0;
  const GaussianState target({0.0, 0.0}, sigma);
  GaussianState s({3.0, -2.0},
                  SymMatrix::diagonal(std::vector<double>{2.0, 1.0}));
  const double w0 = w2_gauss(s, target);
  for (int k = 1; k <= 20; ++k) {
    s = gaussian_step(s, sigma, eta);
    CHECK(w2_gauss(s, target) <= w0 / std::pow(1.0 + alpha * eta, k) + 1e-10);
  }

  // Pure mean shift: equality.
  GaussianState m({2.0}, SymMatrix::scalar(1.0));
  const GaussianState pi = gaussian_1d(0.0, 1.0);
  const double m0 = w2_gauss(m, pi);
  for (int k = 1; k <= 20; ++k) {
    m = gaussian_step(m, SymMatrix::scalar(1.0), 1.0);
    CHECK(std::abs(w2_gauss(m, pi) - m0 / std::pow(2.0, k)) < 1e-10);
  }
}
