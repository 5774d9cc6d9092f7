#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "proxsamp/gaussian.hpp"
#include "proxsamp/potential.hpp"
#include "proxsamp/rates.hpp"
#include "proxsamp/rgo.hpp"
#include "proxsamp/rng.hpp"

using namespace proxsamp;

namespace {

double normal_cdf(double x, double mean, double var) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * var));
}

// Two-sided Kolmogorov-Smirnov statistic against a Gaussian CDF.
double ks_statistic(std::vector<double> samples, double mean, double var) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i], mean, var);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

// Trapezoid quadrature of g over [lo, hi].
template <typename Fn>
double quad(Fn&& g, double lo, double hi, std::size_t n) {
  const double h = (hi - lo) / static_cast<double>(n - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = g(lo + h * static_cast<double>(i));
    s += (i == 0 || i == n - 1) ? 0.5 * v : v;
  }
  return s * h;
}

}  // namespace

TEST_CASE("inner minimizer on composites", "[rgo]") {
  const Potential q = builtin("quadratic", std::vector<double>{1.0});
  const std::vector<double> y2{2.0};
  const auto r1 = inner_minimize(composite(q, y2, 1.0), std::vector<double>{0.0}, 1e-10);
  CHECK(r1.minimizer[0] == Approx(1.0).margin(1e-9));

  const Potential abs = builtin("abs_1d");
  const std::vector<double> y3{3.0};
  const auto r2 = inner_minimize(composite(abs, y3, 1.0), std::vector<double>{-7.0}, 1e-10);
  CHECK(r2.minimizer[0] == Approx(2.0));
  CHECK(r2.iterations == 0);

  // Quartic composite: minimizer solves x^3 + x - 1 = 0; bisection oracle.
  const Potential quartic = builtin("quartic_1d");
  const std::vector<double> y1{1.0};
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((mid * mid * mid + mid - 1.0 < 0.0) ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  const auto r3 = inner_minimize(composite(quartic, y1, 1.0), y1, 1e-12);
  CHECK(r3.minimizer[0] == Approx(root).margin(1e-8));
  CHECK(r3.minimizer[0] == Approx(0.682328).margin(1e-6));
  CHECK(r3.iterations > 0);
}

TEST_CASE("inner minimizer error paths", "[rgo]") {
  const Potential quartic = builtin("quartic_1d");
  const std::vector<double> y{1.0};
  const Potential ft = composite(quartic, y, 1.0);
  try {
    inner_minimize(ft, y, 1e-15, 3);  // budget too small for that tolerance
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_iterate().size() == 1);
    CHECK(e.residual() > 0.0);
  }

  // No gradient and no analytic prox on the base.
  Potential::Spec spec;
  spec.name = "eval_only";
  spec.dim = 1;
  spec.eval = [](std::span<const double> x) { return std::abs(x[0]); };
  spec.regularity.hessian_lower_bound = 0.0;
  const Potential eval_only = Potential::make(std::move(spec));
  CHECK_THROWS_AS(inner_minimize(composite(eval_only, y, 1.0), y, 1e-10),
                  CapabilityError);
}

TEST_CASE("rejection sampling accepts every proposal for a pure quadratic",
          "[rgo]") {
  const Potential ft = builtin("quadratic", std::vector<double>{2.5});
  Rng rng(1);
  const std::vector<double> x_star{0.0};
  for (int i = 0; i < 50; ++i) {
    const auto r = rejection_sample(ft, x_star, 2.5, rng);
    CHECK(r.trials == 1);
  }
}

TEST_CASE("rejection trial count matches the quadrature acceptance rate",
          "[rgo]") {
  // ft(x) = x^2/2 + x^4/4 with proposal N(0, 1): per-trial acceptance
  // probability is E[exp(-Z^4/4)].
  const Potential ft =
      builtin("quartic_plus_quadratic_d", std::vector<double>{1.0});
  const double p = quad(
      [](double z) {
        return std::exp(-0.5 * z * z - 0.25 * z * z * z * z) /
               std::sqrt(2.0 * M_PI);
      },
      -10.0, 10.0, 40001);

  Rng rng(2024);
  const std::vector<double> x_star{0.0};
  const int calls = 10000;
  double total = 0.0, total_sq = 0.0;
  for (int i = 0; i < calls; ++i) {
    const auto r = rejection_sample(ft, x_star, 1.0, rng);
    total += static_cast<double>(r.trials);
    total_sq += static_cast<double>(r.trials) * static_cast<double>(r.trials);
  }
  const double mean = total / calls;
  const double var = total_sq / calls - mean * mean;
  const double se = std::sqrt(var / calls);
  CHECK(std::abs(mean - 1.0 / p) <= 3.0 * se);
}

TEST_CASE("rejection sampling contract violations", "[rgo]") {
  // Claiming more curvature than the target has pushes the acceptance
  // probability above 1.
  const Potential ft = builtin("quadratic", std::vector<double>{1.0});
  Rng rng(3);
  const std::vector<double> x_star{0.0};
  CHECK_THROWS_AS(rejection_sample(ft, x_star, 2.0, rng),
                  ContractViolationError);

  // A catastrophically loose proposal exhausts the trial cap.
  Rng rng2(4);
  CHECK_THROWS_AS(rejection_sample(ft, x_star, 1e-8, rng2, 200),
                  RunawayRejectionError);
}

TEST_CASE("rgo_sample matches the conditional Gaussian law", "[rgo]") {
  const Potential f = builtin("quadratic", std::vector<double>{1.0});
  const std::vector<double> y{2.0};
  RgoStats stats;
  Rng rng(42);
  const int n = 100000;
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i) samples[i] = rgo_sample(f, y, 1.0, 1.0, rng, stats)[0];

  CHECK(stats.calls == static_cast<std::uint64_t>(n));
  CHECK(stats.total_trials == stats.calls);  // acceptance is exactly 1
  CHECK(stats.max_trials_single_call == 1);

  const double mean = sample_mean(samples);
  const double var = sample_variance(samples);
  CHECK(std::abs(mean - 1.0) <= 3.0 * std::sqrt(0.5 / n));
  CHECK(std::abs(var - 0.5) <= 3.0 * 0.5 * std::sqrt(2.0 / (n - 1.0)));
}

TEST_CASE("rgo_sample exactness via Kolmogorov-Smirnov", "[rgo]") {
  const Potential f = builtin("quadratic", std::vector<double>{1.0});
  const std::vector<double> y{2.0};
  const int n = 100000;
  const double threshold = 1.9495 / std::sqrt(static_cast<double>(n));

  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    RgoStats stats;
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i)
      samples[i] = rgo_sample(f, y, 1.0, 1.0, rng, stats)[0];
    if (ks_statistic(std::move(samples), 1.0, 0.5) > threshold) ++rejections;
  }
  CHECK(rejections <= 1);  // < 5% of seeded runs at the 1e-3 level
}

TEST_CASE("non-smooth RGO stays below two expected trials", "[rgo]") {
  // f = |x|, eta = 1/(16 M^2 d) = 1/16; y drawn from pi^Y.
  const Potential f = builtin("abs_1d");
  const double eta = 1.0 / 16.0;
  Rng rng(7);
  RgoStats stats;
  const int calls = 10000;
  std::vector<double> trials(calls);
  for (int i = 0; i < calls; ++i) {
    // Laplace sample by inversion, then heat noise.
    const double u = rng.uniform();
    const double x = u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
    const std::vector<double> y{x + std::sqrt(eta) * rng.normal()};
    RgoStats one;
    rgo_sample(f, y, eta, 1.0, rng, one);
    trials[i] = static_cast<double>(one.total_trials);
    stats.note_call(one.total_trials, one.total_inner_iterations);
  }
  const double mean = sample_mean(trials);
  const double se = std::sqrt(sample_variance(trials) / calls);
  CHECK(mean <= 2.0 + 3.0 * se);
  CHECK(stats.total_inner_iterations == 0);  // analytic prox path
}

TEST_CASE("tiny eps concentrates at the prox point", "[rgo]") {
  const Potential f = builtin("quadratic", std::vector<double>{1.0});
  const std::vector<double> y{2.0};
  const double eps = 1e-6;
  Rng rng(12);
  RgoStats stats;
  const int n = 10000;
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i)
    samples[i] = rgo_sample(f, y, 1.0, eps, rng, stats)[0];
  const double sd_expected = std::sqrt(eps / 2.0);
  CHECK(std::abs(sample_mean(samples) - 1.0) <=
        3.0 * sd_expected / std::sqrt(static_cast<double>(n)));
  const double sd = std::sqrt(sample_variance(samples));
  CHECK(std::abs(sd - sd_expected) <=
        3.0 * sd_expected / std::sqrt(2.0 * static_cast<double>(n)));
}

TEST_CASE("one Gibbs sweep preserves the target moments", "[rgo]") {
  const Potential f = builtin("quadratic", std::vector<double>{1.0});
  Rng rng(99);
  RgoStats stats;
  const int n = 100000;
  const double eta = 1.0;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();  // exact target sample
    const std::vector<double> y{x + std::sqrt(eta) * rng.normal()};
    out[i] = rgo_sample(f, y, eta, 1.0, rng, stats)[0];
  }
  CHECK(std::abs(sample_mean(out)) <= 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sample_variance(out) - 1.0) <=
        3.0 * std::sqrt(2.0 / (n - 1.0)));
}

TEST_CASE("smooth rejection cost stays below the condition-number bound",
          "[rgo]") {
  const Potential f =
      builtin("quartic_plus_quadratic_d", std::vector<double>{2.0});
  const double beta = *f.regularity().beta_smoothness;
  const double eta = suggest_step_size(StepSizeRegime::SmoothBeta, beta, 2);
  const double kappa = rejection_condition_number(beta, eta);

  Rng rng(55);
  RgoStats stats;
  const int calls = 2000;
  for (int i = 0; i < calls; ++i) {
    const std::vector<double> y{rng.normal(), rng.normal()};
    rgo_sample(f, y, eta, 1.0, rng, stats);
  }
  CHECK(stats.mean_trials() <= std::pow(kappa, 1.0));  // kappa^{d/2}, d = 2
}
