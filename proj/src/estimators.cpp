#include "dpp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "dpp/error.hpp"

namespace dpp {

CellGrid::CellGrid(Window window, int cells_per_axis)
    : window_(std::move(window)), per_axis_(cells_per_axis) {
  if (per_axis_ < 1) throw ConfigError("a grid needs at least one cell per axis");
  cell_count_ = 1;
  for (int i = 0; i < window_.dimension(); ++i) cell_count_ *= per_axis_;
}

std::size_t CellGrid::cell_of(std::span<const double> point) const {
  std::size_t index = 0;
  for (int i = 0; i < window_.dimension(); ++i) {
    const Interval& a = window_.axis(i);
    const double scaled = (point[i] - a.lo) / (a.hi - a.lo) * per_axis_;
    const int j = std::clamp(static_cast<int>(std::floor(scaled)), 0, per_axis_ - 1);
    index = index * per_axis_ + j;
  }
  return index;
}

Window CellGrid::cell(std::size_t index) const {
  const int d = window_.dimension();
  std::vector<Interval> axes(d);
  for (int i = d - 1; i >= 0; --i) {
    const int j = static_cast<int>(index % per_axis_);
    index /= per_axis_;
    const Interval& a = window_.axis(i);
    const double width = (a.hi - a.lo) / per_axis_;
    axes[i] = {a.lo + j * width, j + 1 == per_axis_ ? a.hi : a.lo + (j + 1) * width};
  }
  return Window(std::move(axes));
}

std::vector<long long> CellGrid::counts(const PointPattern& pattern) const {
  if (!(pattern.window() == window_)) {
    throw ConfigError("grid and pattern are defined on different windows");
  }
  std::vector<long long> c(cell_count_, 0);
  for (std::size_t p = 0; p < pattern.size(); ++p) ++c[cell_of(pattern.point(p))];
  return c;
}

CellGrid make_grid(const Window& window, int k_n) {
  if (k_n < 1) throw ConfigError(fmt::format("grid size {} must be positive", k_n));
  const int d = window.dimension();
  const int side = static_cast<int>(std::lround(std::pow(k_n, 1.0 / d)));
  long long check = 1;
  for (int i = 0; i < d; ++i) check *= side;
  if (check != k_n) {
    throw ConfigError(fmt::format("grid size {} is not a perfect power of order {}", k_n, d));
  }
  return CellGrid(window, side);
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::standard: return "std";
    case EstimatorKind::median: return "med";
    case EstimatorKind::median_dd: return "med-dd";
  }
  return "unknown";
}

IntensityEstimate lambda_std(const PointPattern& pattern) {
  const double volume = pattern.window().volume();
  if (!(volume > 0.0)) throw ConfigError("window volume must be positive");
  return {EstimatorKind::standard, static_cast<double>(pattern.size()) / volume};
}

double sample_quantile(std::span<const double> values, double p) {
  if (values.empty()) throw ConfigError("sample quantile of an empty sample");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile order must lie in (0, 1)");
  const std::size_t n = values.size();
  // Smallest i with p <= i / n, tested in floating point exactly as stated.
  std::size_t i = static_cast<std::size_t>(std::ceil(p * n));
  i = std::clamp<std::size_t>(i, 1, n);
  while (i > 1 && p <= static_cast<double>(i - 1) / n) --i;
  while (i < n && !(p <= static_cast<double>(i) / n)) ++i;
  std::vector<double> work(values.begin(), values.end());
  std::nth_element(work.begin(), work.begin() + (i - 1), work.end());
  return work[i - 1];
}

JitteredCounts jittered_counts(const PointPattern& pattern, const CellGrid& grid,
                               RngStream& rng) {
  const std::vector<long long> counts = grid.counts(pattern);
  JitteredCounts z;
  z.seed = rng.seed();
  z.values.resize(counts.size());
  z.jitter.resize(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    z.jitter[k] = rng.uniform();
    z.values[k] = static_cast<double>(counts[k]) + z.jitter[k];
  }
  return z;
}

IntensityEstimate lambda_med(const PointPattern& pattern, const CellGrid& grid, RngStream& rng) {
  const JitteredCounts z = jittered_counts(pattern, grid, rng);
  return {EstimatorKind::median, sample_quantile(z.values, 0.5) / grid.cell_volume(),
          grid.cell_count(), z.seed};
}

IntensityEstimate lambda_med_dd(const PointPattern& pattern, std::span<const int> ladder,
                                RngStream& rng) {
  if (ladder.empty()) throw ConfigError("the grid ladder is empty");
  std::vector<double> values;
  values.reserve(ladder.size());
  for (const int k : ladder) {
    values.push_back(lambda_med(pattern, make_grid(pattern.window(), k), rng).value);
  }
  return {EstimatorKind::median_dd, sample_quantile(values, 0.5), 0, rng.seed()};
}

Taper triangular_taper() {
  Taper t;
  t.value = [](std::span<const double> x) {
    double v = 1.0;
    for (const double xi : x) v *= std::max(0.0, 1.0 - std::abs(xi));
    return v;
  };
  t.integral = [](const Window& w) {
    // Antiderivative of max(0, 1 - |t|), clamped to [-1, 1].
    const auto primitive = [](double s) {
      s = std::clamp(s, -1.0, 1.0);
      return s >= 0.0 ? s - 0.5 * s * s : s + 0.5 * s * s;
    };
    double v = 1.0;
    for (const Interval& a : w.axes()) v *= primitive(a.hi) - primitive(a.lo);
    return v;
  };
  return t;
}

double default_bandwidth(const Window& window) {
  return std::pow(window.volume(), -1.0 / (2.0 * window.dimension()));
}

double sigma2_hat(const PointPattern& pattern, const Taper& taper, double bandwidth) {
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  const Window& w = pattern.window();
  const int d = w.dimension();
  const double volume = w.volume();
  const double lambda = lambda_std(pattern).value;
  const double scale = std::pow(volume, 1.0 / d) * bandwidth;

  std::vector<double> lag(d);
  double pairs = 0.0;
  const std::size_t n = pattern.size();
  for (std::size_t a = 0; a < n; ++a) {
    const auto x = pattern.point(a);
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto y = pattern.point(b);
      double overlap = 1.0;
      for (int i = 0; i < d; ++i) {
        lag[i] = (y[i] - x[i]) / scale;
        overlap *= std::max(0.0, w.side(i) - std::abs(y[i] - x[i]));
      }
      const double k = taper.value(lag);
      if (k == 0.0) continue;
      if (!(overlap > 0.0)) {
        throw NumericError("translated windows of a point pair do not overlap");
      }
      pairs += 2.0 * k / overlap;  // ordered pairs (x, y) and (y, x)
    }
  }

  std::vector<double> centre(d);
  for (int i = 0; i < d; ++i) centre[i] = -0.5 * (w.axis(i).lo + w.axis(i).hi);
  const double k_integral = taper.integral(w.translated(centre));
  return lambda + pairs -
         volume * std::pow(bandwidth, d) * lambda * (lambda - 1.0 / volume) * k_integral;
}

double conservative_sd(double estimate, double volume) {
  if (!(estimate >= 0.0)) throw ConfigError("intensity estimate must be non-negative");
  if (!(volume > 0.0)) throw ConfigError("window volume must be positive");
  return std::sqrt(std::numbers::pi * estimate / 2.0) / std::sqrt(volume);
}

ConfidenceInterval conservative_ci(const IntensityEstimate& estimate, double volume,
                                   double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, 0.5 + 0.5 * level);
  const double half = z * conservative_sd(estimate.value, volume);
  return {estimate.value - half, estimate.value + half};
}

}  // namespace dpp
