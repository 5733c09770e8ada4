#include <doctest.h>

#include "oracles.hpp"
#include "polymg/io.hpp"
#include "polymg/poly.hpp"

#include <cmath>
#include <random>

using namespace polymg;

TEST_CASE("Chebyshev polynomials against trigonometric and hyperbolic forms")
{
  for (int k = 0; k <= 40; ++k)
  {
    for (double t : {-1.0, -0.73, 0.0, 0.31, 0.999, 1.0})
    {
      CHECK(cheb_T(k, t) == doctest::Approx(std::cos(k * std::acos(t))).epsilon(1e-10).scale(1.0));
      if (std::abs(t) < 1.0)
        CHECK(cheb_U(k, t) == doctest::Approx(std::sin((k + 1) * std::acos(t)) / std::sin(std::acos(t)))
                                  .epsilon(1e-9)
                                  .scale(1.0));
    }
    for (double t : {1.0001, 1.3, 7.0})
      CHECK(cheb_T(k, t) == doctest::Approx(std::cosh(k * std::acosh(t))).epsilon(1e-12));
  }
  CHECK(cheb_U(-1, 0.4) == 0.0);
  CHECK_THROWS_AS(cheb_T(-1, 0.5), std::invalid_argument);
}

TEST_CASE("q and e are consistent for every family")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto fam : {SmootherFamily::Chebyshev, SmootherFamily::SA, SmootherFamily::BA1x})
    for (int deg = 0; deg <= 12; ++deg)
    {
      SmootherSpec s{fam, deg, 0.1 + 0.2 * u(rng), 2.0};
      for (int i = 0; i < 20; ++i)
      {
        double x = 2.0 * u(rng);
        CHECK(std::abs(1.0 - x * q_value(s, x) - error_poly(s, x)) < 1e-10);
      }
      CHECK(error_poly(s, 0.0) == doctest::Approx(1.0));
    }
}

TEST_CASE("Chebyshev error polynomial equioscillates with the classical bound")
{
  for (int nu = 0; nu <= 10; ++nu)
  {
    SmootherSpec s{SmootherFamily::Chebyshev, nu, 0.2, 2.0};
    double bound = 1.0 / cheb_T(nu + 1, 2.2 / 1.8);
    CHECK(max_abs_error_poly(s, 0.2, 2.0) == doctest::Approx(bound).epsilon(1e-9));
  }
}

TEST_CASE("SA polynomial: degree zero is the classical damped Jacobi")
{
  SmootherSpec s{SmootherFamily::SA, 0, 0.0, 2.0};
  for (double x : {0.1, 0.5, 1.7})
    CHECK(error_poly(s, x) == doctest::Approx(1.0 - 4.0 * x / 6.0));
  CHECK(sa_sign(0) == -1.0);
  CHECK(sa_sign(1) == 1.0);
  // |e(x)| sqrt(x) is levelled at 1/(2nu+3) sqrt(l1).
  for (int nu = 0; nu < 6; ++nu)
  {
    SmootherSpec t{SmootherFamily::SA, nu, 0.0, 2.0};
    double mx = 0.0;
    for (int i = 1; i <= 4000; ++i)
    {
      double x = 2.0 * i / 4000;
      mx = std::max(mx, std::abs(error_poly(t, x)) * std::sqrt(x));
    }
    CHECK(mx == doctest::Approx(std::sqrt(2.0) / (2 * nu + 3)).epsilon(1e-4));
  }
}

TEST_CASE("BA1x matches an independent Remez exchange")
{
  std::mt19937_64 rng(2014);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 20; ++c)
  {
    double l1 = 1.0 + u(rng);
    double kappa = 2.0 + 98.0 * u(rng);
    int m = 1 + static_cast<int>(10 * u(rng));
    double l0 = l1 / kappa;
    oracle::RemezReciprocal best(m, l0, l1);
    SmootherSpec s{SmootherFamily::BA1x, m, l0, l1};
    double dev = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
      double x = l0 + (l1 - l0) * i / 9999.0;
      dev = std::max(dev, std::abs(best(x) - q_value(s, x)));
    }
    CHECK(dev < 1e-8);
    double sk = std::sqrt(kappa), delta = (sk - 1) / (sk + 1);
    CHECK(best.levelled_error() == doctest::Approx(std::pow(delta, m) * (kappa - 1) / (2 * l1)).epsilon(1e-8));
  }
}

TEST_CASE("closed-form endpoint errors agree with the recurrence")
{
  CHECK(ba1x_endpoint_errors(2, 0.5, 0.5, 2.0).at_lambda1 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 100; ++c)
  {
    int m = 1 + static_cast<int>(40 * u(rng));
    double l1 = 0.5 + 1.5 * u(rng);
    double kappa = 1.5 + 98.5 * u(rng);
    double l0 = l1 / kappa;
    double lam = l0 + (l1 - l0) * 0.5 * u(rng);
    auto e = ba1x_endpoint_errors(m, lam, l0, l1);
    SmootherSpec s{SmootherFamily::BA1x, m, lam, l1};
    CHECK(std::abs(e.at_lambda1 - std::abs(error_poly(s, l1))) < 1e-10);
    CHECK(std::abs(e.at_lambda0 - std::abs(error_poly(s, l0))) < 1e-10 * std::max(1.0, e.at_lambda0));
  }
}

TEST_CASE("optimal lambda0 equalizes the endpoint errors")
{
  for (int m : {2, 6, 17})
  {
    double l0 = 0.05;
    auto o = optimal_lambda0_smoothing(m, l0, 2.0);
    REQUIRE(o.crossed);
    auto e = ba1x_endpoint_errors(m, o.value, l0, 2.0);
    CHECK(e.at_lambda1 == doctest::Approx(e.at_lambda0).epsilon(1e-6));
    CHECK(o.value > l0);
    // The max damping over [l0, l1] is minimal there: nearby shifts do worse.
    auto at = [&](double lam) { return max_abs_error_poly({SmootherFamily::BA1x, m, lam, 2.0}, l0, 2.0); };
    CHECK(at(o.value) <= at(o.value * 1.02) + 1e-12);
    CHECK(at(o.value) <= at(o.value * 0.98) + 1e-12);
  }
}

TEST_CASE("min_degree sufficiency and necessity")
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 200; ++c)
  {
    double rho = 0.01 + 0.5 * u(rng), kappa = 1.5 + 200 * u(rng), l1 = 0.5 + 2.0 * u(rng);
    int m = min_degree(rho, kappa, l1);
    double sk = std::sqrt(kappa), delta = (sk - 1) / (sk + 1);
    auto err = [&](int deg) { return std::pow(delta, deg) * (kappa - 1) / 2; };
    CHECK(err(m) <= rho * (1 + 1e-12));
    CHECK(err(m) <= 1.0 / l1 * (1 + 1e-12));
    if (m > 0)
      CHECK((err(m - 1) > rho || err(m - 1) > 1.0 / l1));
    // The scan agrees with the recurrence's actual endpoint error.
    if (m >= 1)
      CHECK(std::abs(error_poly({SmootherFamily::BA1x, m, l1 / kappa, l1}, l1)) <= rho * (1 + 1e-9));
  }
  // Tight case: rho chosen so that m = 5 is exact.
  double d = 3.0 / 5.0;
  CHECK(min_degree(std::pow(d, 5) * 15.0 / 2.0, 16.0, 0.5) == 5);
}

TEST_CASE("convergent-smoother criterion")
{
  CHECK(is_convergent_smoother({SmootherFamily::Chebyshev, 3, 0.1, 2.0}));
  CHECK(is_convergent_smoother({SmootherFamily::BA1x, 6, 0.146, 2.0}));
  CHECK(is_convergent_smoother({SmootherFamily::SA, 4, 0.0, 2.0}));
  // Too low a degree for the condition number: delta^m (kappa - 1) / 2 > 1.
  CHECK_FALSE(is_convergent_smoother({SmootherFamily::BA1x, 2, 0.01, 2.0}));
  CHECK_FALSE(is_convergent_smoother({SmootherFamily::BA1x, 3, 0.146, 2.0}));
}

TEST_CASE("invalid specs")
{
  CHECK_THROWS_AS((SmootherSpec{SmootherFamily::BA1x, 3, 0.0, 2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((SmootherSpec{SmootherFamily::Chebyshev, 3, 2.0, 2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((SmootherSpec{SmootherFamily::Chebyshev, -1, 0.1, 2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(smoother_family_from_string("gmres"), std::invalid_argument);
  CHECK_THROWS_AS(min_degree(1.5, 10, 2), std::invalid_argument);
}

TEST_CASE("smoother spec JSON round trip")
{
  SmootherSpec s{SmootherFamily::BA1x, 17, 0.0380602337443566, 2.0};
  CHECK(smoother_spec_from_json(Json::parse(to_json(s).dump())) == s);
}
