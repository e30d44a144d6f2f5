#include "dpp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dpp/bessel.hpp"
#include "dpp/error.hpp"
#include "dpp/quadrature.hpp"

namespace dpp {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area(int dimension) {
  return 2.0 * std::pow(kPi, 0.5 * dimension) / gamma_half(dimension);
}

std::size_t start_nodes(double oscillations) {
  std::size_t n = 16;
  while (static_cast<double>(n) < 8.0 + 4.0 * oscillations) n *= 2;
  return n;
}

double parse_number(const std::map<std::string, std::string>& config,
                    const std::string& key) {
  const auto it = config.find(key);
  if (it == config.end()) throw ConfigError("kernel config is missing '" + key + "'");
  try {
    std::size_t used = 0;
    const double value = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("kernel config: '" + key + "' is not a number: " + it->second);
  }
}

}  // namespace

RadialFunction::RadialFunction(std::function<double(double)> rule, double support)
    : rule_(std::move(rule)), support_(support) {}

double RadialFunction::operator()(double r) const {
  r = std::abs(r);
  return r >= support_ ? 0.0 : rule_(r);
}

double max_range(double intensity, int dimension) {
  if (!(intensity > 0.0)) throw ConfigError("intensity must be positive");
  if (dimension < 1) throw ConfigError("dimension must be positive");
  const double nu = 0.5 * (dimension - 2);
  const double j = dpp::bessel_zero(nu);
  const double base = std::pow(2.0, dimension - 2) * j * j * gamma_half(dimension);
  return std::pow(base, 1.0 / dimension) / std::sqrt(kPi) /
         std::pow(intensity, 1.0 / dimension);
}

KernelSpec KernelSpec::bessel(int dimension, double intensity, double range_fraction) {
  if (!(range_fraction > 0.0) || !std::isfinite(range_fraction)) {
    throw ConfigError("range fraction must be positive");
  }
  return KernelSpec(dimension, intensity, range_fraction * dpp::max_range(intensity, dimension));
}

KernelSpec::KernelSpec(int dimension, double intensity, double range)
    : dimension_(dimension), intensity_(intensity), range_(range) {
  if (dimension < 1 || dimension > 3) {
    throw ConfigError(fmt::format("dimension {} is not supported (1, 2 or 3)", dimension));
  }
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw ConfigError("intensity must be positive");
  }
  if (!(range > 0.0) || !std::isfinite(range)) throw ConfigError("range must be positive");

  max_range_ = dpp::max_range(intensity, dimension);
  order_ = 0.5 * (dimension - 2);
  zero_ = dpp::bessel_zero(order_);
  // J'_nu(j_nu) = -J_{nu+1}(j_nu) at a zero of J_nu.
  const double dj = bessel_j(order_ + 1.0, zero_);
  const double kappa2 = 4.0 * intensity * gamma_half(dimension) /
                        (std::pow(kPi, 0.5 * dimension) * range * range * dj * dj);
  kappa_ = std::sqrt(kappa2);
  const double c = 2.0 * zero_ / range;
  u_scale_ = kappa_ * std::pow(0.5 * c, order_) / gamma_half(dimension);
  sphere_ = sphere_area(dimension);

  // Parseval: int C^2 = int F(C)^2 = int F(u)^4, integrated panel by panel
  // until the decaying tail is negligible.
  const double half_range = 0.5 * range_;
  const double width = 1.0 / half_range;
  const auto integrand = [this](double rho) {
    const double f = fourier_u(rho);
    const double f2 = f * f;
    return sphere_ * f2 * f2 * std::pow(rho, dimension_ - 1);
  };
  // F(C) <= F(C)(0) and int F(C) = C(0) = lambda bound the result.
  const double fu0 = fourier_u(0.0);
  const double scale = intensity_ * fu0 * fu0;
  double total = 0.0;
  for (int panel = 0; panel < 20000; ++panel) {
    const double lo = panel * width;
    const double part = integrate_adaptive(integrand, lo, lo + width, 1e-13 * scale).value;
    total += part;
    if (panel >= 16 && std::abs(part) < 1e-15 * total) break;
  }
  c0_ = total;
}

double KernelSpec::u(double r) const {
  r = std::abs(r);
  if (r >= 0.5 * range_) return 0.0;
  return u_scale_ * bessel_lambda(order_, 2.0 * zero_ / range_ * r);
}

double KernelSpec::fourier_u(double rho) const {
  rho = std::abs(rho);
  const double a = 0.5 * range_;
  const double c = 2.0 * zero_ / range_;
  const double transform_order = 0.5 * dimension_ - 1.0;
  const auto integrand = [&](double r) {
    return u_scale_ * bessel_lambda(order_, c * r) *
           bessel_lambda(transform_order, 2.0 * kPi * rho * r) *
           std::pow(r, dimension_ - 1);
  };
  const auto result = integrate_adaptive(integrand, 0.0, a, 1e-11, start_nodes(rho * a));
  return sphere_ * result.value;
}

double KernelSpec::fourier(double rho) const {
  const double f = fourier_u(rho);
  return f * f;
}

double KernelSpec::kernel(double r) const {
  r = std::abs(r);
  if (r >= range_) return 0.0;
  const double a = 0.5 * range_;
  const double tol = std::min(1e-8, 1e-10 * intensity_);

  if (dimension_ == 1) {
    // Symmetric under y -> r - y, so integrate over [r/2, a] and double.
    const auto f = [&](double y) { return u(y) * u(r - y); };
    return 2.0 * integrate_adaptive(f, 0.5 * r, a, tol).value;
  }

  // The support of u(|y|) u(|x - y|) is the lens between two balls of radius
  // a whose centres are r apart. The integrand is symmetric under
  // y -> x - y, so integrate the half with y1 >= r/2, parametrized by
  // y1 = a cos(theta), cross-section radius h = a sin(theta), theta in
  // [0, acos(r / 2a)]. In these coordinates the integrand is analytic.
  const double theta_max = std::acos(std::clamp(0.5 * r / a, -1.0, 1.0));
  const double cross_area =
      dimension_ == 2 ? 2.0 : sphere_area(dimension_ - 1);
  const auto half_lens = [&](std::size_t n) {
    const GaussLegendre& rule = gauss_legendre(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = 0.5 * theta_max * (1.0 + rule.nodes[i]);
      const double y1 = a * std::cos(theta);
      const double h = a * std::sin(theta);
      double cross = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double s = 0.5 * (1.0 + rule.nodes[k]);
        const double rho = h * s;
        const double rho2 = rho * rho;
        const double f = u(std::sqrt(y1 * y1 + rho2)) *
                         u(std::sqrt((y1 - r) * (y1 - r) + rho2));
        cross += 0.5 * rule.weights[k] * std::pow(s, dimension_ - 2) * f;
      }
      cross *= cross_area * std::pow(h, dimension_ - 1);
      sum += 0.5 * theta_max * rule.weights[i] * a * std::sin(theta) * cross;
    }
    return sum;
  };

  std::size_t n = 16;
  double previous = half_lens(n);
  double diff = 0.0;
  while (n < 1024) {
    n *= 2;
    const double current = half_lens(n);
    diff = std::abs(current - previous);
    previous = current;
    if (diff < 0.5 * tol) return 2.0 * current;
  }
  throw NumericError(fmt::format("kernel quadrature at r = {} reached {:g}", r, 2.0 * diff));
}

RadialFunction KernelSpec::u_profile() const {
  return RadialFunction([spec = *this](double r) { return spec.u(r); }, 0.5 * range_);
}

RadialFunction KernelSpec::kernel_profile() const {
  return RadialFunction([spec = *this](double r) { return spec.kernel(r); }, range_);
}

std::map<std::string, std::string> KernelSpec::to_config() const {
  return {{"family", "bessel"},
          {"d", std::to_string(dimension_)},
          {"lambda", fmt::format("{}", intensity_)},
          {"R_fraction", fmt::format("{}", range_fraction())}};
}

KernelSpec KernelSpec::from_config(const std::map<std::string, std::string>& config) {
  const auto family = config.find("family");
  if (family != config.end() && family->second != "bessel") {
    throw ConfigError("unknown kernel family '" + family->second + "'");
  }
  const double d = parse_number(config, "d");
  if (d != std::floor(d)) throw ConfigError("kernel config: 'd' must be an integer");
  return bessel(static_cast<int>(d), parse_number(config, "lambda"),
                parse_number(config, "R_fraction"));
}

double kernel_value(const KernelSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dimension()) {
    throw ConfigError("kernel_value: point dimension does not match the kernel");
  }
  double norm2 = 0.0;
  for (const double v : x) norm2 += v * v;
  return spec.kernel(std::sqrt(norm2));
}

double fourier_kernel(const KernelSpec& spec, std::span<const double> t) {
  if (static_cast<int>(t.size()) != spec.dimension()) {
    throw ConfigError("fourier_kernel: frequency dimension does not match the kernel");
  }
  double norm2 = 0.0;
  for (const double v : t) norm2 += v * v;
  return spec.fourier(std::sqrt(norm2));
}

double pair_correlation(const KernelSpec& spec, double r) {
  if (std::abs(r) >= spec.range()) return 1.0;
  const double ratio = spec.kernel(r) / spec.intensity();
  return 1.0 - ratio * ratio;
}

double squared_integral_direct(const KernelSpec& spec) {
  const int d = spec.dimension();
  const double sphere = sphere_area(d);
  const auto integrand = [&](double r) {
    const double c = spec.kernel(r);
    return sphere * c * c * std::pow(r, d - 1);
  };
  return integrate_adaptive(integrand, 0.0, spec.range(), 1e-10 * spec.c0(), 16, 2048).value;
}

ExistenceReport check_existence(const KernelSpec& spec, int resolution) {
  constexpr double tol = 1e-10;
  resolution = std::max(resolution, 2);
  ExistenceReport report;
  report.sup_fourier = -1.0;
  report.min_fourier = 2.0;
  const double rho_max = 40.0 / spec.range();
  for (int i = 0; i < resolution; ++i) {
    const double value = spec.fourier(rho_max * i / (resolution - 1));
    report.sup_fourier = std::max(report.sup_fourier, value);
    report.min_fourier = std::min(report.min_fourier, value);
  }
  report.strict = report.min_fourier >= -tol && report.sup_fourier < 1.0 - tol;
  report.valid = report.min_fourier >= -tol && report.sup_fourier <= 1.0 + tol;
  report.c0 = spec.c0();
  report.c0_direct = squared_integral_direct(spec);
  return report;
}

}  // namespace dpp
