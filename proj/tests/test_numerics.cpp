#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "specshare/numerics.hpp"

using namespace specshare;

namespace {

// Independent slow oracle for the rate kernel: fixed-step trapezoid under the
// substitution s = x^{1/alpha}, integrating
//   alpha s^{alpha-1+2*moment} e^{-lam s^2} / (1 + s^alpha) ds,
// kept deliberately different from the production integrator (different
// variable, fixed step).
double kernel_trapezoid(double lam, double alpha, int moment = 0) {
  const double s_max = std::sqrt(50.0 / lam);
  const int n = 400000;
  const double h = s_max / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = i * h;
    double v = 0.0;
    if (s > 0.0)
      v = alpha * std::pow(s, alpha - 1.0 + 2.0 * moment) *
          std::exp(-lam * s * s) / (1.0 + std::pow(s, alpha));
    sum += (i == 0 || i == n) ? 0.5 * v : v;
  }
  return sum * h;
}

// Literal x-space oracle for one spot value: trapezoid on
// e^{-L x^{2/alpha}} / (1+x), truncated where the exponent falls below -40.
double kernel_literal(double lam, double alpha) {
  const double x_max = std::pow(40.0 / lam, 0.5 * alpha);
  const double h = 1e-4;
  const long n = static_cast<long>(x_max / h);
  double sum = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double x = i * h;
    const double v = std::exp(-lam * std::pow(x, 2.0 / alpha)) / (1.0 + x);
    sum += (i == 0 || i == n) ? 0.5 * v : v;
  }
  return sum * h;
}

double lam_star_residual(double lam, double alpha) {
  const double x = std::pow(lam, 0.5 * alpha);
  return (1.0 + x) * std::log1p(1.0 / x) - 0.5 * alpha;
}

}  // namespace

TEST_CASE("lambda_star: frozen values and residuals") {
  struct Row {
    double alpha, lam;
  };
  const Row rows[] = {{2.1, 8.681471177968}, {2.25, 3.184105603252},
                      {2.5, 1.523597759559}, {3.0, 0.800207539905},
                      {3.5, 0.595022106855}, {4.0, 0.504976212228},
                      {4.5, 0.457043047860}, {5.0, 0.428605605335},
                      {6.0, 0.398509177351}, {8.0, 0.377129764328}};
  for (const Row& r : rows) {
    const double lam = num::solve_lambda_star(r.alpha);
    CHECK(lam == doctest::Approx(r.lam).epsilon(1e-9));
    CHECK(std::fabs(lam_star_residual(lam, r.alpha)) <= 1e-10);
  }
}

TEST_CASE("lambda_star: residual over the fine alpha grid") {
  for (double alpha = 2.1; alpha <= 8.0 + 1e-12; alpha += 0.1) {
    const double lam = num::solve_lambda_star(alpha);
    CHECK(std::fabs(lam_star_residual(lam, alpha)) <= 1e-10);
  }
}

TEST_CASE("lambda_star: sign-change scan oracle at alpha=4") {
  // the residual changes sign across the returned root on a 1e-6 scan step
  const double lam = num::solve_lambda_star(4.0);
  CHECK(lam_star_residual(lam - 1e-6, 4.0) *
            lam_star_residual(lam + 1e-6, 4.0) <
        0.0);
  CHECK_THROWS_AS(num::solve_lambda_star(2.0), std::invalid_argument);
}

TEST_CASE("beta_star: both branches and the proof bound") {
  // N above Lambda*(4): closed form Lambda*^{-alpha/2}
  CHECK(num::solve_beta_star(10.0, 4.0) ==
        doctest::Approx(3.9215536346).epsilon(1e-9));
  CHECK(num::solve_beta_star(10.0, 4.0) ==
        doctest::Approx(std::pow(num::solve_lambda_star(4.0), -2.0)));
  // N below: transcendental branch; the root is bounded by N^{-alpha/2}
  const double b = num::solve_beta_star(0.3, 4.0);
  CHECK(b == doctest::Approx(7.5347061771).epsilon(1e-9));
  CHECK(b < std::pow(0.3, -2.0));
  // residual of the defining equation
  CHECK(4.0 / (2.0 * 0.3 * std::sqrt(b)) ==
        doctest::Approx((1.0 + 1.0 / b) * std::log1p(b)).epsilon(1e-10));
  // boundary N = Lambda*(alpha): branches agree
  const double ls = num::solve_lambda_star(4.0);
  CHECK(num::solve_beta_star(ls, 4.0) ==
        doctest::Approx(std::pow(ls, -2.0)).epsilon(1e-8));
}

TEST_CASE("vr_kernel: frozen values") {
  CHECK(num::vr_kernel(1.0, 4.0) ==
        doctest::Approx(0.686755923113).epsilon(1e-9));
  CHECK(num::vr_kernel(1.0, 3.0) ==
        doctest::Approx(0.629652539814).epsilon(1e-9));
  CHECK(num::vr_kernel(0.1, 2.5) ==
        doctest::Approx(2.42884298877).epsilon(1e-9));
  CHECK(num::vr_kernel(100.0, 6.0) ==
        doctest::Approx(5.99964012084e-6).epsilon(1e-8));
  CHECK_THROWS_AS(num::vr_kernel(0.0, 4.0), std::domain_error);
  CHECK_THROWS_AS(num::vr_kernel(-1.0, 4.0), std::domain_error);
}

TEST_CASE("vr_kernel: literal x-space trapezoid oracle at (1, 4)") {
  CHECK(num::vr_kernel(1.0, 4.0) ==
        doctest::Approx(kernel_literal(1.0, 4.0)).epsilon(1e-6));
}

TEST_CASE("vr_kernel: trapezoid cross-check grid") {
  for (double lam : {0.1, 1.0, 10.0, 100.0})
    for (double alpha : {2.5, 3.0, 4.0, 5.0, 6.0})
      CHECK(num::vr_kernel(lam, alpha) ==
            doctest::Approx(kernel_trapezoid(lam, alpha)).epsilon(1e-6));
}

TEST_CASE("vr_kernel: large-density Gamma asymptote") {
  // Gamma(alpha/2 + 1) / lam^{alpha/2}
  CHECK(num::vr_kernel(50.0, 4.0) ==
        doctest::Approx(std::tgamma(3.0) / 2500.0).epsilon(0.05));
  for (double alpha : {2.5, 3.0, 4.0, 5.0}) {
    const double lam = 1e4;
    const double asym = std::tgamma(0.5 * alpha + 1.0) /
                        std::pow(lam, 0.5 * alpha);
    CHECK(std::fabs(num::vr_kernel(lam, alpha) / asym - 1.0) <= 0.02);
  }
}

TEST_CASE("f_ratio: oracle value and limits") {
  CHECK(num::f_ratio(1.0, 2.0, 5.0) ==
        doctest::Approx(1.5932501445).epsilon(1e-9));
  CHECK(num::f_ratio(1.0, 2.0, 5.0) ==
        doctest::Approx(kernel_trapezoid(3.0, 5.0, 0) /
                        kernel_trapezoid(3.0, 5.0, 1))
            .epsilon(1e-6));
  // s_self -> infinity: f -> 2/alpha
  CHECK(num::f_ratio(1000.0, 1.0, 4.0) == doctest::Approx(0.5).epsilon(2e-3));
  CHECK_THROWS_AS(num::f_ratio(0.0, 1.0, 4.0), std::invalid_argument);
}

TEST_CASE("monotonicity: f(s,s) strictly decreasing in s") {
  for (double alpha : {2.5, 3.0, 4.0, 5.0, 6.0, 8.0}) {
    double prev = num::f_ratio(0.01, 0.01, alpha);
    for (int k = 1; k <= 14; ++k) {
      const double s = 0.01 * std::pow(2.0, k);
      const double cur = num::f_ratio(s, s, alpha);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("monotonicity: f(s1, s2) strictly increasing in s2") {
  for (double alpha : {2.5, 3.0, 4.0, 5.0, 6.0, 8.0}) {
    for (double s1 : {0.05, 0.5, 2.0}) {
      double prev = num::f_ratio(s1, 0.01, alpha);
      for (int k = 1; k <= 14; ++k) {
        const double s2 = 0.01 * std::pow(2.0, k);
        const double cur = num::f_ratio(s1, s2, alpha);
        CHECK(cur > prev);
        prev = cur;
      }
    }
  }
}

TEST_CASE("lambda_prime: frozen values, residual, golden-section oracle") {
  struct Row {
    double alpha, lam;
  };
  const Row rows[] = {{2.5, 2.7284426897}, {3.0, 1.3361391812},
                      {3.5, 0.9442794748}, {4.0, 0.7704862297},
                      {4.5, 0.6756835406}, {5.0, 0.6173827518}};
  for (const Row& r : rows) {
    const double lam = num::solve_lambda_prime(r.alpha);
    CHECK(lam == doctest::Approx(r.lam).epsilon(1e-8));
    // defining integral: K0(L) - L K1(L) = 0
    CHECK(std::fabs(num::vr_kernel(lam, r.alpha) -
                    lam * num::vr_kernel_moment(lam, r.alpha)) <= 1e-8);
    CHECK(num::f_ratio(lam, 0.0, r.alpha) == doctest::Approx(1.0).epsilon(1e-8));
  }
  // independent golden-section maximization of L * K0(L)
  for (double alpha : {3.0, 4.0}) {
    double a = 1e-3, b = 8.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto obj = [&](double l) { return l * num::vr_kernel(l, alpha); };
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 80; ++it) {
      if (obj(c) > obj(d))
        b = d;
      else
        a = c;
      c = b - gr * (b - a);
      d = a + gr * (b - a);
    }
    CHECK(num::solve_lambda_prime(alpha) ==
          doctest::Approx(0.5 * (a + b)).epsilon(1e-6));
  }
}

TEST_CASE("lambda_double_prime: defined exactly for alpha > 4") {
  for (int k = 21; k <= 80; ++k) {
    const double alpha = k / 10.0;  // exact tenths; the value diverges as
                                    // alpha -> 4 from above
    const auto v = num::solve_lambda_double_prime(alpha);
    CHECK(v.has_value() == (alpha > 4.0));
  }
  struct Row {
    double alpha, lam;
  };
  const Row rows[] = {{4.5, 2.8107504066},
                      {5.0, 1.8369635632},
                      {6.0, 1.2374050263},
                      {8.0, 0.9059961872}};
  for (const Row& r : rows) {
    const auto lam = num::solve_lambda_double_prime(r.alpha);
    REQUIRE(lam.has_value());
    CHECK(*lam == doctest::Approx(r.lam).epsilon(1e-8));
    CHECK(num::f_ratio(*lam, *lam, r.alpha) ==
          doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("root finder contracts") {
  auto cube = [](double x) { return x * x * x - 2.0; };
  CHECK(num::find_root(cube, {0.0, 2.0}) ==
        doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(num::find_root(cube, {3.0, 4.0}), std::invalid_argument);
  CHECK_THROWS_AS(num::find_root(cube, {2.0, 1.0}), std::invalid_argument);
  auto affine = [](double x) { return x - 3000.0; };
  const auto br = num::expand_bracket(affine);
  CHECK(br.lo < 3000.0);
  CHECK(br.hi > 3000.0);
  auto positive = [](double) { return 1.0; };
  CHECK_THROWS_AS(num::expand_bracket(positive), std::runtime_error);
}

TEST_CASE("optimal_sir_threshold: defining residual across densities") {
  for (double s : {0.05, 0.3, 1.0, 5.0, 40.0}) {
    for (double alpha : {2.5, 4.0, 6.0}) {
      const double b = num::optimal_sir_threshold(s, alpha);
      const double lhs = alpha / (2.0 * s * std::pow(b, 2.0 / alpha));
      const double rhs = (1.0 + 1.0 / b) * std::log1p(b);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(num::optimal_sir_threshold(0.0, 4.0), std::invalid_argument);
}
