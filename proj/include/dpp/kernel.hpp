#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>

namespace dpp {

// Radial profile r -> value, identically zero beyond the support radius.
class RadialFunction {
 public:
  RadialFunction(std::function<double(double)> rule, double support);

  double operator()(double r) const;
  double support() const { return support_; }

 private:
  std::function<double(double)> rule_;
  double support_;
};

enum class KernelFamily { bessel };

// Stationary DPP kernel C_R = u_R * u_R with
//   u_R(x) = kappa J_nu(2 j_nu |x| / R) / |x|^nu 1{|x| < R/2},  nu = (d-2)/2.
// Supported dimensions are 1, 2 and 3. Derived constants are computed at
// construction; instances are immutable.
class KernelSpec {
 public:
  // R = range_fraction * M(lambda, d).
  static KernelSpec bessel(int dimension, double intensity, double range_fraction);

  int dimension() const { return dimension_; }
  double intensity() const { return intensity_; }
  double range() const { return range_; }
  double max_range() const { return max_range_; }
  double range_fraction() const { return range_ / max_range_; }
  double order() const { return order_; }
  double bessel_zero() const { return zero_; }
  double kappa() const { return kappa_; }
  // Integral of C^2 over R^d, computed through Parseval as the integral of F(C)^2.
  double c0() const { return c0_; }
  KernelFamily family() const { return KernelFamily::bessel; }

  // Radial profiles.
  double u(double r) const;
  double kernel(double r) const;
  double fourier_u(double rho) const;
  double fourier(double rho) const;

  RadialFunction u_profile() const;
  RadialFunction kernel_profile() const;

  // Flat key-value form: family, d, lambda, R_fraction.
  std::map<std::string, std::string> to_config() const;
  static KernelSpec from_config(const std::map<std::string, std::string>& config);

 private:
  KernelSpec(int dimension, double intensity, double range);

  int dimension_;
  double intensity_;
  double range_;
  double max_range_;
  double order_;
  double zero_;
  double kappa_;
  double u_scale_;  // kappa (c/2)^nu / Gamma(nu+1), c = 2 j / R
  double sphere_;   // surface area of the unit sphere in R^d
  double c0_;
};

// M such that M lambda^(1/d) = (2^(d-2) j^2 Gamma(d/2))^(1/d) / sqrt(pi).
double max_range(double intensity, int dimension);

double kernel_value(const KernelSpec& spec, std::span<const double> x);
double fourier_kernel(const KernelSpec& spec, std::span<const double> t);

// 1 - (C(r) / lambda)^2.
double pair_correlation(const KernelSpec& spec, double r);

struct ExistenceReport {
  double sup_fourier = 0.0;
  double min_fourier = 0.0;
  bool strict = false;  // sup < 1
  bool valid = false;   // 0 <= F(C) <= 1
  double c0 = 0.0;         // Parseval route
  double c0_direct = 0.0;  // direct-space integral of C^2
};

// F(C) is radial, so the grid is a radial one on [0, rho_max] with
// `resolution` points; rho_max covers the decay of F(u).
ExistenceReport check_existence(const KernelSpec& spec, int resolution = 2001);

// Integral of C^2 evaluated in direct space (independent of the Parseval path).
double squared_integral_direct(const KernelSpec& spec);

}  // namespace dpp
