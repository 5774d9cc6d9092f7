#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "proxsamp/potential.hpp"
#include "proxsamp/proxopt.hpp"
#include "proxsamp/rgo.hpp"
#include "proxsamp/rng.hpp"

using namespace proxsamp;

namespace {

// Quadratic without its analytic prox, so the numeric minimizer path can be
// compared against the closed form.
Potential quadratic_no_prox(std::vector<double> lam) {
  Potential::Spec spec;
  spec.name = "quadratic_noprox";
  spec.dim = static_cast<int>(lam.size());
  spec.eval = [lam](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) s += lam[i] * x[i] * x[i];
    return 0.5 * s;
  };
  spec.grad = [lam](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < lam.size(); ++i) g[i] = lam[i] * x[i];
  };
  spec.regularity.alpha_strong_convexity =
      *std::min_element(lam.begin(), lam.end());
  spec.regularity.beta_smoothness = *std::max_element(lam.begin(), lam.end());
  spec.regularity.hessian_lower_bound = spec.regularity.alpha_strong_convexity;
  spec.regularity.f_star = 0.0;
  return Potential::make(std::move(spec));
}

}  // namespace

TEST_CASE("builtin quadratic values and metadata", "[potential]") {
  const Potential f = builtin("quadratic", std::vector<double>{1.0});
  CHECK(f.dim() == 1);
  CHECK(f(2.0) == Approx(2.0));
  CHECK(f.grad1(2.0) == Approx(2.0));
  CHECK(*f.regularity().alpha_strong_convexity == Approx(1.0));
  CHECK(*f.regularity().beta_smoothness == Approx(1.0));

  const Potential g = builtin("quadratic", std::vector<double>{1.0, 4.0});
  CHECK(g.dim() == 2);
  CHECK(*g.regularity().alpha_strong_convexity == Approx(1.0));
  CHECK(*g.regularity().beta_smoothness == Approx(4.0));
}

TEST_CASE("builtin abs_1d soft threshold", "[potential]") {
  const Potential f = builtin("abs_1d");
  CHECK(*f.regularity().lipschitz_m == Approx(1.0));
  const std::vector<double> y{3.0};
  CHECK(f.analytic_prox(1.0, y)[0] == Approx(2.0));
  const std::vector<double> y2{0.4};
  CHECK(f.analytic_prox(1.0, y2)[0] == Approx(0.0));
  const std::vector<double> y3{-3.0};
  CHECK(f.analytic_prox(1.0, y3)[0] == Approx(-2.0));
  CHECK(f.grad1(0.0) == 0.0);  // minimal-norm subgradient selection
}

TEST_CASE("builtin errors", "[potential]") {
  CHECK_THROWS_AS(builtin("does_not_exist"), ConfigurationError);
  CHECK_THROWS_AS(builtin("quadratic", std::vector<double>{1.0, -2.0}),
                  ValidationError);
  CHECK_THROWS_AS(builtin("quadratic", std::vector<double>{0.0}),
                  ValidationError);
  CHECK_THROWS_AS(builtin("abs_1d", std::vector<double>{1.0}),
                  ValidationError);
}

TEST_CASE("certified PL constant of pl_sine_1d", "[potential]") {
  const Potential f = builtin("pl_sine_1d");
  const double a = certify_pl_alpha(f, -10.0, 10.0, 100001);
  CHECK(a > 0.0);
  CHECK(a <= 2.0);
  // Stable under refinement.
  const double a2 = certify_pl_alpha(f, -10.0, 10.0, 200001);
  CHECK(a == Approx(a2).margin(1e-3));

  // The certified constant satisfies the PL inequality on sampled points.
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = -10.0 + 20.0 * rng.uniform();
    const double g = f.grad1(x);
    CHECK(g * g >= 2.0 * a * (f(x) - 0.0) - 1e-8);
  }
}

TEST_CASE("composite potential algebra", "[potential]") {
  const Potential q = builtin("quadratic", std::vector<double>{1.0});

  const std::vector<double> y0{0.0};
  const Potential c1 = composite(q, y0, 1.0, 1.0);
  CHECK(c1(1.0) == Approx(1.0));  // 1/2 + 1/2

  const std::vector<double> y3{3.0};
  const Potential abs = builtin("abs_1d");
  const Potential c2 = composite(abs, y3, 1.0, 1.0);
  const auto min2 = inner_minimize(c2, y3, 1e-10);
  CHECK(min2.minimizer[0] == Approx(2.0));
  CHECK(min2.iterations == 0);

  const std::vector<double> y2{2.0};
  const Potential c3 = composite(q, y2, 1.0, 0.5);
  CHECK(*c3.regularity().alpha_strong_convexity == Approx(4.0));
  CHECK(*c3.regularity().beta_smoothness == Approx(4.0));

  CHECK_THROWS_AS(composite(q, std::vector<double>{1.0, 2.0}, 1.0, 1.0),
                  ValidationError);
  CHECK_THROWS_AS(composite(q, y0, -1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(composite(q, y0, 1.0, 0.0), ValidationError);
}

TEST_CASE("composite strong convexity dominates 1/eta", "[potential]") {
  Rng rng(11);
  for (const char* name : {"quadratic", "abs_1d", "quartic_1d"}) {
    const Potential f = std::string(name) == "quadratic"
                            ? builtin(name, std::vector<double>{2.0})
                            : builtin(name);
    for (int i = 0; i < 20; ++i) {
      const double eta = 0.05 + 2.0 * rng.uniform();
      const std::vector<double> y{4.0 * rng.uniform() - 2.0};
      const Potential c = composite(f, y, eta, 1.0);
      REQUIRE(c.regularity().alpha_strong_convexity.has_value());
      CHECK(*c.regularity().alpha_strong_convexity >= 1.0 / eta - 1e-12);
    }
  }
}

TEST_CASE("gradient check oracle", "[potential]") {
  const Potential q = builtin("quadratic", std::vector<double>{1.0});
  std::vector<std::vector<double>> pts{{0.0}, {1.0}, {-2.0}};
  CHECK(grad_check(q, pts) < 1e-7);

  const Potential pl = builtin("pl_sine_1d");
  std::vector<std::vector<double>> pl_pts;
  for (int i = 0; i < 100; ++i)
    pl_pts.push_back({-5.0 + 10.0 * static_cast<double>(i) / 99.0});
  CHECK(grad_check(pl, pl_pts) < 1e-5);

  const Potential quartic = builtin("quartic_1d");
  std::vector<std::vector<double>> far{{10.0}};
  CHECK(grad_check(quartic, far) < 1e-4);

  const Potential qq =
      builtin("quartic_plus_quadratic_d", std::vector<double>{3.0});
  std::vector<std::vector<double>> pts3{{0.3, -1.2, 2.0}, {0.0, 0.0, 0.0}};
  CHECK(grad_check(qq, pts3) < 1e-6);
}

TEST_CASE("strong convexity inequality on random pairs", "[potential]") {
  Rng rng(23);
  const std::vector<Potential> convex{
      builtin("quadratic", std::vector<double>{1.0}),
      builtin("quadratic", std::vector<double>{0.5, 3.0}),
      builtin("quartic_plus_quadratic_d", std::vector<double>{2.0})};
  for (const Potential& f : convex) {
    const double a = *f.regularity().alpha_strong_convexity;
    REQUIRE(a > 0.0);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> x(f.dim()), y(f.dim());
      for (int i = 0; i < f.dim(); ++i) {
        x[i] = 4.0 * rng.uniform() - 2.0;
        y[i] = 4.0 * rng.uniform() - 2.0;
      }
      const std::vector<double> g = f.grad(x);
      double inner = 0.0, d2 = 0.0;
      for (int i = 0; i < f.dim(); ++i) {
        inner += g[i] * (y[i] - x[i]);
        d2 += sq(y[i] - x[i]);
      }
      CHECK(f(y) >= f(x) + inner + 0.5 * a * d2 - 1e-8);
    }
  }
}

TEST_CASE("analytic prox agrees with the numeric path", "[potential]") {
  // Smooth case: gradient-descent minimizer of the composite vs closed form.
  const Potential q = builtin("quadratic", std::vector<double>{1.0, 4.0});
  const Potential q_numeric = quadratic_no_prox({1.0, 4.0});
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const double eta = 0.1 + 2.0 * rng.uniform();
    const std::vector<double> y{6.0 * rng.uniform() - 3.0,
                                6.0 * rng.uniform() - 3.0};
    const std::vector<double> a = prox(q, eta, y);
    const std::vector<double> b = prox(q_numeric, eta, y, 1e-12);
    CHECK(dist2(a, b) < 1e-6);
  }

  // Non-smooth 1-D case: prox objective vs a brute-force grid minimum.
  const Potential abs = builtin("abs_1d");
  for (int i = 0; i < 100; ++i) {
    const double eta = 0.1 + 2.0 * rng.uniform();
    const double y = 6.0 * rng.uniform() - 3.0;
    const std::vector<double> yv{y};
    const double z = prox(abs, eta, yv)[0];
    const double obj_z = std::abs(z) + sq(z - y) / (2.0 * eta);
    double best = obj_z;
    for (int j = 0; j <= 60000; ++j) {
      const double t = -3.0 + 6.0 * static_cast<double>(j) / 60000.0;
      best = std::min(best, std::abs(t) + sq(t - y) / (2.0 * eta));
    }
    CHECK(obj_z <= best + 1e-10);
  }
}

TEST_CASE("quartic_plus_quadratic matches its 1-D formula", "[potential]") {
  const Potential f =
      builtin("quartic_plus_quadratic_d", std::vector<double>{1.0});
  CHECK(f(1.5) == Approx(0.5 * 2.25 + 0.25 * 5.0625));
  CHECK(f.grad1(1.5) == Approx(1.5 + 3.375));
  CHECK_THROWS_AS(
      builtin("quartic_plus_quadratic_d", std::vector<double>{2.5}),
      ValidationError);
}
