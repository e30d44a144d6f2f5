#include "dpp/countdist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dpp/error.hpp"

namespace dpp {

double CountPmf::total() const {
  double s = 0.0;
  for (const double p : probabilities) s += p;
  return s;
}

double CountPmf::mean() const {
  double s = 0.0;
  for (std::size_t m = 0; m < probabilities.size(); ++m) s += m * probabilities[m];
  return s;
}

double CountPmf::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (std::size_t m = 0; m < probabilities.size(); ++m) {
    const double dm = m - mu;
    s += dm * dm * probabilities[m];
  }
  return s;
}

double CountPmf::cdf(long long m) const {
  if (m < 0) return 0.0;
  const std::size_t top = std::min<std::size_t>(m, max_count());
  double s = 0.0;
  for (std::size_t k = 0; k <= top; ++k) s += probabilities[k];
  return s;
}

std::size_t default_max_count(double mean, double variance) {
  return static_cast<std::size_t>(std::ceil(mean + 12.0 * std::sqrt(std::max(variance, 0.0))));
}

CountPmf poisson_pmf(double theta, std::size_t max_count) {
  if (!(theta > 0.0)) throw ConfigError("Poisson mean must be positive");
  CountPmf pmf;
  pmf.probabilities.resize(max_count + 1);
  const double log_theta = std::log(theta);
  double mass = 0.0;
  for (std::size_t m = 0; m <= max_count; ++m) {
    const double lp = m * log_theta - theta - std::lgamma(m + 1.0);
    pmf.probabilities[m] = std::exp(lp);
    mass += pmf.probabilities[m];
  }
  pmf.tail = std::max(0.0, 1.0 - mass);
  return pmf;
}

CountPmf poisson_binomial_pmf(std::span<const double> probs, std::size_t max_count) {
  CountPmf pmf;
  std::vector<double>& q = pmf.probabilities;
  q.assign(max_count + 1, 0.0);
  q[0] = 1.0;
  std::size_t top = 0;  // highest index that can be non-zero
  for (const double p : probs) {
    if (!(p >= 0.0 && p < 1.0)) {
      throw ConfigError(fmt::format("Bernoulli probability {} is outside [0, 1)", p));
    }
    if (p == 0.0) continue;
    if (top == max_count) {
      pmf.tail += p * q[max_count];
    } else {
      ++top;
    }
    for (std::size_t m = top; m > 0; --m) q[m] = q[m] * (1.0 - p) + q[m - 1] * p;
    q[0] *= 1.0 - p;
  }
  return pmf;
}

double omega(double m, double ell) {
  if (!(ell > 0.0)) throw ConfigError("omega requires a positive reference mean");
  const double diff = m - ell;
  return (diff * diff - m) / (ell * ell);
}

ApproxConstants approx_constants(double intensity, double c0) {
  if (!(intensity > 0.0)) throw ConfigError("intensity must be positive");
  if (!(c0 >= 0.0)) throw ConfigError("squared kernel integral must be non-negative");
  if (c0 >= intensity) {
    throw ConfigError(fmt::format(
        "squared kernel integral {} is not below the intensity {}", c0, intensity));
  }
  const double e = std::sqrt(std::numbers::e) - 1.0;
  const double gap = intensity - c0;
  const double root = std::sqrt(intensity);
  ApproxConstants k;
  k.intensity = intensity;
  k.c0 = c0;
  k.kappa0 = std::sqrt(3.0) * e * c0 * root / (gap * gap);
  k.kappa1 = 0.5 * std::sqrt(15.0) * e * c0 * c0 * root / (gap * gap * gap);
  return k;
}

ConditionValue check_condition_amed(double intensity, double c0) {
  const ApproxConstants k = approx_constants(intensity, c0);
  const double base = 1.0 / std::sqrt(2.0 * std::numbers::pi * intensity);
  const double value = std::max(base - k.kappa0, base * (1.0 + c0 / (2.0 * intensity)) - k.kappa1);
  return {value, value > 0.0};
}

BoundReport d0_d1_check(const SpectralModel& model, double intensity, double c0, double slack) {
  const ApproxConstants k = approx_constants(intensity, c0);
  const double volume = model.window().volume();
  const double theta = intensity * volume;
  const double mean = std::max(theta, model.eigenvalue_sum());
  const std::size_t top = default_max_count(mean, mean);
  const CountPmf exact = poisson_binomial_pmf(model.eigenvalues(), top);
  const CountPmf reference = poisson_pmf(theta, top);

  BoundReport r{};
  r.volume = volume;
  r.kappa0 = k.kappa0;
  r.kappa1 = k.kappa1;
  r.bound = k.kappa0 / std::sqrt(volume);
  for (std::size_t m = 0; m <= top; ++m) {
    const double d0 = exact[m] - reference[m];
    const double d1 = exact[m] - reference[m] * (1.0 - volume * omega(m, theta) * c0 / 2.0);
    r.sup_d0 = std::max(r.sup_d0, std::abs(d0));
    r.sup_d1 = std::max(r.sup_d1, std::abs(d1));
  }
  r.bound_ok = r.sup_d0 <= r.bound + slack;
  r.residual = (r.sup_d1 - k.kappa1 / std::sqrt(volume)) * volume;
  r.tail = std::max(exact.tail, reference.tail);
  return r;
}

double jittered_median(const CountPmf& pmf) {
  double below = 0.0;  // P(N <= m - 1)
  for (std::size_t m = 0; m <= pmf.max_count(); ++m) {
    const double p = pmf.probabilities[m];
    if (below + p >= 0.5 && p > 0.0) return m + (0.5 - below) / p;
    below += p;
  }
  throw NumericError("count distribution is truncated below its median");
}

double s_n_diagnostic(const SpectralModel& model, double cell_volume) {
  const double volume = model.window().volume();
  if (std::abs(volume - cell_volume) > 1e-9 * volume) {
    throw ConfigError(fmt::format("model window volume {} differs from the cell volume {}",
                                  volume, cell_volume));
  }
  const double mean = model.eigenvalue_sum();
  const CountPmf pmf =
      poisson_binomial_pmf(model.eigenvalues(), default_max_count(mean, model.count_variance()));
  const double median = jittered_median(pmf);
  return std::sqrt(cell_volume) * pmf[static_cast<std::size_t>(std::floor(median))];
}

}  // namespace dpp
