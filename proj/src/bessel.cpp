#include "dpp/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dpp {

namespace {

constexpr double kPi = std::numbers::pi;

enum class OrderKind { integer, half };

struct Order {
  OrderKind kind;
  int twice;  // 2 * nu
};

Order classify(double nu) {
  const double twice = 2.0 * nu;
  const double rounded = std::round(twice);
  if (std::abs(twice - rounded) > 1e-12) {
    throw std::domain_error("unsupported Bessel order " + std::to_string(nu));
  }
  const int t = static_cast<int>(rounded);
  if (t >= 0 && t % 2 == 0) return {OrderKind::integer, t};
  if (t == -1 || t == 1 || t == 3) return {OrderKind::half, t};
  throw std::domain_error("unsupported Bessel order " + std::to_string(nu));
}

// sum_k (-1)^k (x/2)^(2k) / (k! (nu+1)_k), i.e. the normalized series.
double lambda_series(double nu, double x) {
  const double q = -0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double integer_series(int n, double x) {
  double lead = 1.0;
  for (int k = 1; k <= n; ++k) lead *= 0.5 * x / k;
  return lead * lambda_series(n, x);
}

// Miller backward recurrence normalized with J0 + 2 sum J_2k = 1.
double integer_miller(int n, double x) {
  const int start =
      2 * ((std::max(n, static_cast<int>(x)) + 40 +
            static_cast<int>(10.0 * std::cbrt(x))) / 2);
  double next = 0.0;   // J_{k+1}
  double cur = 1e-30;  // J_k
  double result = 0.0;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = 2.0 * k / x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
    const int idx = k - 1;
    if (idx == n) result = cur;
    if (idx > 0 && idx % 2 == 0) norm += 2.0 * cur;
  }
  norm += cur;
  return result / norm;
}

// Hankel asymptotic expansion, accurate for x >= 25 at the orders used here.
double asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 100; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > last) break;
    last = mag;
    // P = 1 - a2 + a4 - ..., Q = a1 - a3 + a5 - ...
    if (k % 2 == 0) {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      q += (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
    if (mag < 1e-17) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double integer_bessel(int n, double x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x < 8.0) return integer_series(n, x);
  if (x < 25.0 || n > 4) return integer_miller(n, x);
  return asymptotic(n, x);
}

double half_bessel(int twice, double x) {
  if (x == 0.0) {
    return twice == -1 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  const double scale = std::sqrt(2.0 / (kPi * x));
  switch (twice) {
    case -1: return scale * std::cos(x);
    case 1: return scale * std::sin(x);
    default: return scale * (std::sin(x) / x - std::cos(x));
  }
}

}  // namespace

double gamma_half(int twice) {
  if (twice <= 0) throw std::domain_error("gamma_half expects a positive argument");
  if (twice % 2 == 0) {
    double g = 1.0;
    for (int k = 2; k < twice / 2; ++k) g *= k;
    return g;
  }
  // Gamma(1/2) = sqrt(pi), Gamma(z + 1) = z Gamma(z)
  double g = std::sqrt(kPi);
  for (int k = 1; k < twice; k += 2) g *= 0.5 * k;
  return g;
}

double bessel_j(double nu, double x) {
  if (!(x >= 0.0)) throw std::domain_error("bessel_j expects x >= 0");
  const Order order = classify(nu);
  if (order.kind == OrderKind::half) return half_bessel(order.twice, x);
  return integer_bessel(order.twice / 2, x);
}

double bessel_lambda(double nu, double x) {
  const Order order = classify(nu);
  x = std::abs(x);
  if (x < 4.0) return lambda_series(nu, x);
  if (order.kind == OrderKind::half) {
    switch (order.twice) {
      case -1: return std::cos(x);
      case 1: return std::sin(x) / x;
      default: return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
    }
  }
  const int n = order.twice / 2;
  double scale = 1.0;
  for (int k = 1; k <= n; ++k) scale *= 2.0 * k / x;
  return scale * integer_bessel(n, x);
}

double bessel_zero(double nu) {
  const Order order = classify(nu);
  if (order.twice == -1) return 0.5 * kPi;
  if (order.twice == 1) return kPi;
  // Bracket the first sign change on a coarse scan, then bisect.
  const double step = 0.05;
  double lo = step;
  double flo = bessel_j(nu, lo);
  double hi = lo + step;
  while (bessel_j(nu, hi) * flo > 0.0) {
    lo = hi;
    hi += step;
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j(nu, mid) * flo > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dpp
