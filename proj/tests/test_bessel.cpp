#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"

#include "dpp/bessel.hpp"

namespace {

// Ascending series, fine for the moderate arguments used below.
double j0_series(double x) {
  double term = 1.0;
  double sum = 1.0;
  const double q = -x * x / 4.0;
  for (int k = 1; k < 80; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

double bisect_first_zero() {
  double lo = 2.0;
  double hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (j0_series(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("bessel") {
  TEST_CASE("values at the origin") {
    CHECK(dpp::bessel_j(0, 0.0) == 1.0);
    CHECK(dpp::bessel_j(1, 0.0) == 0.0);
    CHECK(dpp::bessel_j(2, 0.0) == 0.0);
    CHECK(dpp::bessel_lambda(0, 0.0) == 1.0);
    CHECK(dpp::bessel_lambda(0.5, 0.0) == 1.0);
    CHECK(dpp::bessel_lambda(1, 0.0) == 1.0);
  }

  TEST_CASE("first zero of J0 against a bisection oracle") {
    const double root = bisect_first_zero();
    CHECK(std::abs(root - 2.404826) < 1e-6);
    CHECK(std::abs(dpp::bessel_zero(0) - root) < 1e-12);
    CHECK(std::abs(dpp::bessel_j(0, root)) < 1e-10);
  }

  TEST_CASE("zeros of the other supported orders") {
    CHECK(dpp::bessel_zero(-0.5) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
    CHECK(dpp::bessel_zero(0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
    for (const double nu : {1.0, 2.0, 1.5}) {
      const double z = dpp::bessel_zero(nu);
      CHECK(std::abs(std::cyl_bessel_j(nu, z)) < 1e-12);
      // no earlier sign change
      for (double x = 0.05; x < z - 1e-6; x += 0.05) CHECK(std::cyl_bessel_j(nu, x) > 0.0);
    }
  }

  TEST_CASE("integer orders agree with the standard library on [0, 60]") {
    for (const int nu : {0, 1, 2, 3, 5}) {
      for (double x = 0.0; x <= 60.0; x += 0.173) {
        CHECK(std::abs(dpp::bessel_j(nu, x) - std::cyl_bessel_j(nu, x)) < 1e-10);
      }
    }
  }

  TEST_CASE("half-integer orders agree with closed forms") {
    for (double x = 0.01; x <= 50.0; x += 0.211) {
      const double s = std::sqrt(2.0 / (std::numbers::pi * x));
      CHECK(std::abs(dpp::bessel_j(0.5, x) - s * std::sin(x)) < 1e-12);
      CHECK(std::abs(dpp::bessel_j(-0.5, x) - s * std::cos(x)) < 1e-12);
      CHECK(std::abs(dpp::bessel_j(1.5, x) - s * (std::sin(x) / x - std::cos(x))) < 1e-12);
    }
  }

  TEST_CASE("normalized form matches its definition away from zero") {
    for (const double nu : {-0.5, 0.0, 0.5, 1.0}) {
      for (double x = 0.3; x < 40.0; x += 0.7) {
        // std::cyl_bessel_j rejects negative orders
        const double j = nu < 0.0 ? std::sqrt(2.0 / (M_PI * x)) * std::cos(x) : std::cyl_bessel_j(nu, x);
        const double expected = std::tgamma(nu + 1.0) * std::pow(2.0 / x, nu) * j;
        CHECK(dpp::bessel_lambda(nu, x) == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("normalized form is continuous through the origin") {
    for (const double nu : {0.0, 0.5, 1.0}) {
      CHECK(dpp::bessel_lambda(nu, 1e-8) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("unsupported orders are rejected") {
    CHECK_THROWS_AS(dpp::bessel_j(0.3, 1.0), std::domain_error);
    CHECK_THROWS_AS(dpp::bessel_j(-1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(dpp::bessel_j(-1.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(dpp::bessel_zero(0.25), std::domain_error);
  }

  TEST_CASE("gamma at half integers") {
    for (int twice = 1; twice <= 12; ++twice) {
      CHECK(dpp::gamma_half(twice) == doctest::Approx(std::tgamma(twice / 2.0)).epsilon(1e-14));
    }
  }
}
