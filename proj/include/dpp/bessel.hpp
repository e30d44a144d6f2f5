#pragma once

// Bessel functions of the first kind for the orders needed by the radial
// kernels in dimensions 1 to 3.

namespace dpp {

// J_nu(x) for x >= 0. Supported orders: non-negative integers and
// nu in {-1/2, 1/2, 3/2}. Throws std::domain_error for anything else.
double bessel_j(double nu, double x);

// Normalized form Gamma(nu + 1) (2 / x)^nu J_nu(x). Entire in x with value 1
// at the origin, so it is safe to use inside radial integrals.
double bessel_lambda(double nu, double x);

// First positive zero of J_nu.
double bessel_zero(double nu);

// Gamma(twice / 2) for positive integers `twice`, exact up to rounding.
double gamma_half(int twice);

}  // namespace dpp
