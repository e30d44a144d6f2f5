#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "dpp/countdist.hpp"
#include "dpp/error.hpp"
#include "dpp/kernel.hpp"
#include "dpp/rng.hpp"
#include "dpp/sampler.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

double binomial_oracle(int n, double p, int m) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) +
                  m * std::log(p) + (n - m) * std::log1p(-p));
}

// Law of a sum of Bernoullis by enumerating every outcome.
std::vector<double> enumerate_oracle(const std::vector<double>& p) {
  const std::size_t n = p.size();
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double w = 1.0;
    int k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) {
        w *= p[i];
        ++k;
      } else {
        w *= 1.0 - p[i];
      }
    }
    out[k] += w;
  }
  return out;
}

// F_Z(t) for Z = N + U.
double jittered_cdf(const dpp::CountPmf& pmf, double t) {
  const double fl = std::floor(t);
  return pmf.cdf(static_cast<long long>(fl) - 1) + pmf[static_cast<std::size_t>(fl)] * (t - fl);
}

double bisect_median(const dpp::CountPmf& pmf) {
  double lo = 0.0;
  double hi = static_cast<double>(pmf.max_count()) + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (jittered_cdf(pmf, mid) >= 0.5) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Unit-volume model with every eigenvalue equal, summing to `total`.
dpp::SpectralModel flat_model(double total, int truncation) {
  const dpp::Window w({{0.0, 1.0}, {0.0, 1.0}});
  const std::size_t n = static_cast<std::size_t>(2 * truncation + 1) * (2 * truncation + 1);
  return dpp::SpectralModel(w, truncation, std::vector<double>(n, total / n));
}

}  // namespace

TEST_SUITE("countdist") {
  TEST_CASE("Poisson pmf") {
    const auto p1 = dpp::poisson_pmf(1.0, 40);
    CHECK(p1[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(p1.total() + p1.tail == doctest::Approx(1.0).epsilon(1e-12));

    const auto p200 = dpp::poisson_pmf(200.0, dpp::default_max_count(200.0, 200.0));
    std::size_t mode = 0;
    for (std::size_t m = 1; m <= p200.max_count(); ++m) {
      if (p200[m] > p200[mode]) mode = m;
    }
    CHECK((mode == 199 || mode == 200));
    CHECK(p200[200] * std::sqrt(2.0 * kPi * 200.0) == doctest::Approx(1.0).epsilon(0.005));
    CHECK(std::abs(p200.total() + p200.tail - 1.0) < 1e-12);
    CHECK(p200[p200.max_count()] < 1e-14);
    CHECK_THROWS_AS(dpp::poisson_pmf(0.0, 3), dpp::ConfigError);
  }

  TEST_CASE("Poisson pmf survives large means") {
    const auto p = dpp::poisson_pmf(800.0, dpp::default_max_count(800.0, 800.0));
    CHECK(std::abs(p.total() - 1.0) < 1e-12);
    CHECK(p.mean() == doctest::Approx(800.0).epsilon(1e-12));
    CHECK(p.variance() == doctest::Approx(800.0).epsilon(1e-9));
  }

  TEST_CASE("Poisson-Binomial small cases") {
    const std::vector<double> half{0.5, 0.5};
    const auto pmf = dpp::poisson_binomial_pmf(half, 2);
    CHECK(pmf[0] == 0.25);
    CHECK(pmf[1] == 0.5);
    CHECK(pmf[2] == 0.25);

    const std::vector<double> p{0.1, 0.35, 0.72, 0.05, 0.5, 0.9, 0.01, 0.66, 0.2, 0.44};
    const auto exact = enumerate_oracle(p);
    const auto dp = dpp::poisson_binomial_pmf(p, p.size());
    for (std::size_t m = 0; m <= p.size(); ++m) CHECK(std::abs(dp[m] - exact[m]) < 1e-15);
    CHECK_THROWS_AS(dpp::poisson_binomial_pmf(std::vector<double>{0.2, 1.0}, 2), dpp::ConfigError);
  }

  TEST_CASE("identical probabilities give the binomial law") {
    for (const double p : {0.01, 0.3, 0.77}) {
      const int n = 150;
      const auto pmf = dpp::poisson_binomial_pmf(std::vector<double>(n, p), n);
      for (int m = 0; m <= n; ++m) CHECK(std::abs(pmf[m] - binomial_oracle(n, p, m)) < 1e-12);
    }
  }

  TEST_CASE("truncated support accumulates the tail") {
    const std::vector<double> p(60, 0.5);
    const auto pmf = dpp::poisson_binomial_pmf(p, 35);
    double above = 0.0;
    for (int m = 36; m <= 60; ++m) above += binomial_oracle(60, 0.5, m);
    CHECK(pmf.tail == doctest::Approx(above).epsilon(1e-10));
    CHECK(std::abs(pmf.total() + pmf.tail - 1.0) < 1e-12);
    for (int m = 0; m <= 35; ++m) CHECK(std::abs(pmf[m] - binomial_oracle(60, 0.5, m)) < 1e-12);
  }

  TEST_CASE("moments of random Poisson-Binomial laws") {
    dpp::RngStream rng(2718);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.below(600);
      std::vector<double> p(n);
      double mean = 0.0;
      double var = 0.0;
      for (auto& x : p) {
        x = 0.95 * rng.uniform();
        mean += x;
        var += x * (1.0 - x);
      }
      const auto pmf = dpp::poisson_binomial_pmf(p, dpp::default_max_count(mean, var));
      for (const double q : pmf.probabilities) REQUIRE(q >= 0.0);
      CHECK(std::abs(pmf.total() + pmf.tail - 1.0) < 1e-12);
      CHECK(std::abs(pmf.mean() - mean) < 1e-9);
      CHECK(std::abs(pmf.variance() - var) < 1e-9);
    }
  }

  TEST_CASE("count law of the first planar model") {
    const auto model = dpp::build_spectral_model(dpp::KernelSpec::bessel(2, 50.0, 0.25),
                                                 dpp::Window::centered_cube(2, 1.0), 64);
    double mean = 0.0;
    double var = 0.0;
    for (const double b : model.eigenvalues()) {
      mean += b;
      var += b * (1.0 - b);
    }
    const auto pmf = dpp::poisson_binomial_pmf(model.eigenvalues(),
                                               dpp::default_max_count(mean, var));
    CHECK(mean == doctest::Approx(200.0).epsilon(0.01));
    CHECK(var < mean);
    CHECK(std::abs(pmf.mean() - mean) < 1e-9);
    CHECK(std::abs(pmf.variance() - var) < 1e-9);
  }

  TEST_CASE("omega") {
    CHECK(dpp::omega(7.0, 7.0) == doctest::Approx(-1.0 / 7.0).epsilon(1e-15));
    CHECK(dpp::omega(0.0, 3.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(dpp::omega(110.0, 100.0) == doctest::Approx(-0.001).epsilon(1e-12));
    for (int m = 0; m < 60; ++m) {
      for (const int ell : {1, 4, 17, 50}) {
        const double lhs = ell * ell * dpp::omega(m, ell) + m;
        CHECK(lhs == doctest::Approx((m - ell) * (m - ell)).epsilon(1e-12));
      }
    }
    CHECK_THROWS_AS(dpp::omega(1.0, 0.0), dpp::ConfigError);
  }

  TEST_CASE("approximation constants") {
    const auto zero = dpp::approx_constants(50.0, 0.0);
    CHECK(zero.kappa0 == 0.0);
    CHECK(zero.kappa1 == 0.0);
    const auto tiny = dpp::approx_constants(50.0, 1e-9);
    CHECK(tiny.kappa0 < 1e-10);
    CHECK(tiny.kappa1 < 1e-10);

    for (const double c : {0.5, 2.0, 9.0}) {
      const auto base = dpp::approx_constants(50.0, 3.0);
      const auto scaled = dpp::approx_constants(c * 50.0, c * 3.0);
      CHECK(scaled.kappa0 == doctest::Approx(base.kappa0 / std::sqrt(c)).epsilon(1e-13));
    }

    const auto dpp1 = dpp::approx_constants(50.0, dpp::KernelSpec::bessel(2, 50.0, 0.25).c0());
    CHECK(dpp1.kappa0 > 0.0);
    CHECK(std::isfinite(dpp1.kappa0));
    CHECK(dpp1.kappa1 > 0.0);
    // Frozen from a separate evaluation of the closed forms at the frozen c0 values.
    CHECK(dpp1.kappa0 == doctest::Approx(0.0056140).epsilon(1e-4));
    CHECK(dpp1.kappa1 == doctest::Approx(0.00021442).epsilon(1e-4));
    const auto dpp2 = dpp::approx_constants(50.0, dpp::KernelSpec::bessel(2, 50.0, 0.75).c0());
    CHECK(dpp2.kappa0 == doctest::Approx(0.095676).epsilon(1e-4));
    CHECK(dpp2.kappa1 == doctest::Approx(0.045258).epsilon(1e-4));

    CHECK_THROWS_AS(dpp::approx_constants(50.0, 50.0), dpp::ConfigError);
    CHECK_THROWS_AS(dpp::approx_constants(50.0, 60.0), dpp::ConfigError);
    CHECK_THROWS_AS(dpp::approx_constants(50.0, -1.0), dpp::ConfigError);
  }

  TEST_CASE("condition values of the two planar models") {
    const auto c1 = dpp::check_condition_amed(50.0, dpp::KernelSpec::bessel(2, 50.0, 0.25).c0());
    CHECK(c1.holds);
    CHECK(std::abs(c1.value - 0.057) < 0.005);
    const auto c2 = dpp::check_condition_amed(50.0, dpp::KernelSpec::bessel(2, 50.0, 0.75).c0());
    CHECK(c2.holds);
    CHECK(std::abs(c2.value - 0.021) < 0.005);
  }

  TEST_CASE("condition value in the Poisson limit and monotonicity") {
    for (const double lambda : {1.0, 50.0, 400.0}) {
      const double base = 1.0 / std::sqrt(2.0 * kPi * lambda);
      CHECK(dpp::check_condition_amed(lambda, 0.0).value == doctest::Approx(base).epsilon(1e-14));
      // the second branch lifts the value above the Poisson limit for small C0
      CHECK(dpp::check_condition_amed(lambda, 0.05 * lambda).value > base);
      double previous = dpp::check_condition_amed(lambda, 0.1 * lambda).value;
      for (double c0 = 0.11 * lambda; c0 < lambda; c0 += 0.01 * lambda) {
        const double v = dpp::check_condition_amed(lambda, c0).value;
        CHECK(v < previous);
        previous = v;
      }
      double first = base;
      for (double c0 = 0.01 * lambda; c0 < lambda; c0 += 0.01 * lambda) {
        const double v = base - dpp::approx_constants(lambda, c0).kappa0;
        CHECK(v < first);
        first = v;
      }
    }
  }

  TEST_CASE("first approximation bound on [-1, 1]^2") {
    for (const double f : {0.25, 0.75}) {
      const auto spec = dpp::KernelSpec::bessel(2, 50.0, f);
      const auto model = dpp::build_spectral_model(spec, dpp::Window::centered_cube(2, 1.0), 64);
      const auto r = dpp::d0_d1_check(model, 50.0, spec.c0());
      CHECK(r.volume == 4.0);
      CHECK(r.bound == doctest::Approx(r.kappa0 / 2.0).epsilon(1e-15));
      CHECK(r.sup_d0 <= r.kappa0 / 2.0);
      CHECK(r.bound_ok);
      CHECK(r.tail < 1e-12);
      CHECK(std::isfinite(r.residual));
    }
  }

  TEST_CASE("first approximation bound with doubled area") {
    const auto spec = dpp::KernelSpec::bessel(2, 50.0, 0.25);
    const auto small = dpp::d0_d1_check(
        dpp::build_spectral_model(spec, dpp::Window::centered_cube(2, 1.0), 256), 50.0, spec.c0());
    const auto large = dpp::d0_d1_check(
        dpp::build_spectral_model(spec, dpp::Window::centered_cube(2, std::sqrt(2.0)), 256), 50.0,
        spec.c0());
    CHECK(large.volume == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(large.bound == doctest::Approx(small.bound / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(large.bound_ok);
  }

  TEST_CASE("Le Cam regime gives a vanishing first-order error") {
    const auto model = flat_model(100.0, 50);
    const auto r = dpp::d0_d1_check(model, 100.0, 1.0);
    CHECK(r.sup_d0 < 1e-3);
  }

  TEST_CASE("jittered median") {
    const std::vector<double> half{0.5, 0.5};
    CHECK(dpp::jittered_median(dpp::poisson_binomial_pmf(half, 2)) == 1.5);
    dpp::RngStream rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> p(1 + rng.below(40));
      for (auto& x : p) x = 0.9 * rng.uniform();
      const auto pmf = dpp::poisson_binomial_pmf(p, p.size());
      CHECK(dpp::jittered_median(pmf) == doctest::Approx(bisect_median(pmf)).epsilon(1e-12));
    }
  }

  TEST_CASE("s_n in the Poisson regime") {
    const auto model = flat_model(100.0, 50);
    const double s = dpp::s_n_diagnostic(model, 1.0);
    CHECK(s == doctest::Approx(1.0 / std::sqrt(2.0 * kPi * 100.0)).epsilon(0.02));
    CHECK_THROWS_AS(dpp::s_n_diagnostic(model, 2.0), dpp::ConfigError);
  }

  TEST_CASE("s_n for the first planar model on a single cell") {
    const auto spec = dpp::KernelSpec::bessel(2, 50.0, 0.25);
    const double c_n = 4.0 / 9.0;
    const auto cell = dpp::Window::centered_cube(2, std::sqrt(c_n) / 2.0);
    const double s = dpp::s_n_diagnostic(
        dpp::build_spectral_model(spec, cell, dpp::default_truncation(cell)), c_n);
    const double condition = dpp::check_condition_amed(50.0, spec.c0()).value;
    CHECK(s > 0.0);
    CHECK(s > condition);

    const auto wide = dpp::Window::centered_cube(2, std::sqrt(2.0 * c_n) / 2.0);
    const double s2 = dpp::s_n_diagnostic(
        dpp::build_spectral_model(spec, wide, dpp::default_truncation(wide)), 2.0 * c_n);
    CHECK(s2 == doctest::Approx(s).epsilon(0.2));
  }

  TEST_CASE("Stirling asymptotic") {
    // v = theta + w sqrt(theta); integer by construction.
    for (const double root : {20.0, 30.0}) {
      const double theta = root * root;
      const auto pmf = dpp::poisson_pmf(theta, dpp::default_max_count(theta, theta));
      for (const double w : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const auto v = static_cast<std::size_t>(theta + w * root);
        CHECK(pmf[v] * std::sqrt(2.0 * kPi * theta) == doctest::Approx(std::exp(-0.5 * w * w)).epsilon(0.02));
      }
      const auto near = static_cast<std::size_t>(std::floor(theta + std::pow(theta, 0.25)));
      CHECK(pmf[near] * std::sqrt(2.0 * kPi * theta) == doctest::Approx(1.0).epsilon(0.02));
    }
  }
}
