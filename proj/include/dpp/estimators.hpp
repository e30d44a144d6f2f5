#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dpp/geometry.hpp"
#include "dpp/rng.hpp"

namespace dpp {

// Regular tiling of a window into congruent boxes, cells_per_axis cells
// along every axis. Cells are half-open [a, b) per axis except the last,
// which is closed. Cell indices are lexicographic with the first axis
// slowest.
class CellGrid {
 public:
  CellGrid(Window window, int cells_per_axis);

  const Window& window() const { return window_; }
  int cells_per_axis() const { return per_axis_; }
  int cell_count() const { return cell_count_; }  // k_n
  double cell_volume() const { return window_.volume() / cell_count_; }  // c_n
  std::size_t cell_of(std::span<const double> point) const;
  Window cell(std::size_t index) const;
  std::vector<long long> counts(const PointPattern& pattern) const;

 private:
  Window window_;
  int per_axis_;
  int cell_count_;
};

// Throws ConfigError when k_n is not a perfect d-th power.
CellGrid make_grid(const Window& window, int k_n);

enum class EstimatorKind { standard, median, median_dd };

std::string to_string(EstimatorKind kind);

struct IntensityEstimate {
  EstimatorKind kind;
  double value;
  int k_n = 0;  // cells for a single median estimate; 0 otherwise
  std::uint64_t seed = 0;
};

struct JitteredCounts {
  std::vector<double> values;  // count + jitter per cell
  std::vector<double> jitter;
  std::uint64_t seed;
};

IntensityEstimate lambda_std(const PointPattern& pattern);

// Smallest order statistic Y_(i) with i / n >= p.
double sample_quantile(std::span<const double> values, double p);

// Jitter is drawn in cell order from rng.
JitteredCounts jittered_counts(const PointPattern& pattern, const CellGrid& grid, RngStream& rng);

IntensityEstimate lambda_med(const PointPattern& pattern, const CellGrid& grid, RngStream& rng);

// Median of lambda_med over the ladder, drawn in ladder order.
IntensityEstimate lambda_med_dd(const PointPattern& pattern, std::span<const int> ladder,
                                RngStream& rng);

inline const std::vector<int> kDefaultLadder{9, 16, 25, 36, 49};

// Taper k for the variance estimator together with the integral of k over a
// box.
struct Taper {
  std::function<double(std::span<const double>)> value;
  std::function<double(const Window&)> integral;
};

// prod_i max(0, 1 - |x_i|)
Taper triangular_taper();

// |W|^(-1/(2d))
double default_bandwidth(const Window& window);

// Kernel estimator of the asymptotic variance of sqrt|W| lambda_std. The
// taper integral is taken over the window translated to be centred at the
// origin, which keeps the estimate translation invariant.
double sigma2_hat(const PointPattern& pattern, const Taper& taper, double bandwidth);

struct ConfidenceInterval {
  double low;
  double high;
};

// sqrt(pi lambda / 2) / sqrt|W|, the Poisson upper bound on the standard
// deviation of the median estimators.
double conservative_sd(double estimate, double volume);

// estimate -/+ z conservative_sd with z the two-sided normal quantile.
ConfidenceInterval conservative_ci(const IntensityEstimate& estimate, double volume,
                                   double level = 0.95);

}  // namespace dpp
