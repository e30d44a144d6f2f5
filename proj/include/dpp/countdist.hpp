#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpp/sampler.hpp"

namespace dpp {

// Probabilities P(N = m) for m = 0..max_count() plus the mass beyond it.
struct CountPmf {
  std::vector<double> probabilities;
  double tail = 0.0;

  std::size_t max_count() const { return probabilities.size() - 1; }
  double operator[](std::size_t m) const {
    return m < probabilities.size() ? probabilities[m] : 0.0;
  }
  double total() const;
  double mean() const;
  double variance() const;
  // P(N <= m); m = -1 gives 0.
  double cdf(long long m) const;
};

// ceil(mean + 12 sd)
std::size_t default_max_count(double mean, double variance);

CountPmf poisson_pmf(double theta, std::size_t max_count);

// Exact law of a sum of independent Bernoulli(p_i). Mass that would land
// above max_count is accumulated in the tail.
CountPmf poisson_binomial_pmf(std::span<const double> probs, std::size_t max_count);

// ((m - l)^2 - m) / l^2
double omega(double m, double ell);

struct ApproxConstants {
  double intensity;
  double c0;
  double kappa0;
  double kappa1;
};

// Throws ConfigError unless 0 <= c0 < intensity.
ApproxConstants approx_constants(double intensity, double c0);

struct ConditionValue {
  double value;
  bool holds;
};

// max((2 pi lambda)^(-1/2) - kappa0, (2 pi lambda)^(-1/2) (1 + c0 / (2 lambda)) - kappa1)
ConditionValue check_condition_amed(double intensity, double c0);

// Comparison of the exact count law of a spectral model on S (its window)
// with Poisson(lambda |S|). kappa1' is unknown, so the first-order residual
// (sup |d1| - kappa1 / sqrt|S|) |S| is reported without a verdict.
struct BoundReport {
  double volume;
  double kappa0;
  double bound;  // kappa0 / sqrt|S|
  double sup_d0;
  bool bound_ok;
  double kappa1;
  double sup_d1;
  double residual;
  double tail;  // larger of the two truncated tails
};

// slack is added to the bound before comparing.
BoundReport d0_d1_check(const SpectralModel& model, double intensity, double c0,
                        double slack = 0.0);

// inf{t : F_Z(t) >= 1/2} for Z = N + U, F_Z(t) = P(N <= floor t - 1) + P(N = floor t)(t - floor t).
double jittered_median(const CountPmf& pmf);

// sqrt(c_n) P(N = floor Me_Z) for the count on a single cell. The model's
// window must have volume c_n.
double s_n_diagnostic(const SpectralModel& model, double cell_volume);

}  // namespace dpp
