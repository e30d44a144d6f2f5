#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace dpp {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached rule with n nodes. Thread-safe; the returned reference stays valid
// for the lifetime of the program.
const GaussLegendre& gauss_legendre(std::size_t n);

// Fixed-order rule mapped to [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t n);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // |last - previous|
  std::size_t nodes = 0;
};

// Doubles the node count, starting at n_start, until two successive
// estimates differ by less than tol. Throws NumericError when n_max is
// reached first; the message carries the achieved difference.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    std::size_t n_start = 16,
                                    std::size_t n_max = 8192);

}  // namespace dpp
