#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpp/contamination.hpp"
#include "dpp/kernel.hpp"

namespace dpp {

struct Scenario {
  std::string label;
  ContaminationSpec contamination;
};

struct EstimatorSettings {
  // Grid sizes reported individually as med<k>.
  std::vector<int> grids{9, 16, 25, 36, 49};
  // Ladder for the data-driven median; reported as medDD when non-empty.
  std::vector<int> ladder{9, 16, 25, 36, 49};
  bool sigma2 = false;
  double bandwidth_scale = 1.0;
};

struct ExperimentConfig {
  std::string model = "custom";
  KernelSpec kernel = KernelSpec::bessel(2, 50.0, 0.25);
  double window_scale = 1.0;  // window [-n, n]^d
  int replications = 500;
  EstimatorSettings estimators;
  std::vector<Scenario> scenarios{{"A", {}}};
  std::uint64_t seed = 1;
  int workers = 1;
  int truncation = 0;  // 0 selects default_truncation
  bool keep_records = false;
};

struct ReplicationRecord {
  std::size_t index;
  std::uint64_t seed;
  std::size_t sampled;  // points before contamination
  // values[scenario][column], columns as in ExperimentReport::columns
  std::vector<std::vector<double>> values;
};

struct ColumnSummary {
  double mean = 0.0;
  double sd = 0.0;  // (r - 1) denominator, 0 when r = 1
  double bias = 0.0;
  double mse = 0.0;
  double gain = 0.0;  // percent; NaN for columns without a gain
};

struct ExperimentReport {
  std::string config_digest;
  std::string model_digest;
  double target_intensity = 0.0;
  double target_variance = 0.0;  // lambda - c0, the target of sigma2
  int replications = 0;
  std::vector<std::string> columns;
  std::vector<std::string> scenarios;
  std::vector<std::vector<ColumnSummary>> summary;  // [scenario][column]
  std::vector<ReplicationRecord> records;            // empty unless retained

  const ColumnSummary& at(const std::string& scenario, const std::string& column) const;
};

// Column names in evaluation order: std, med<k>..., medDD, sigma2.
std::vector<std::string> experiment_columns(const EstimatorSettings& settings);

// (mse_std - mse_est) / mse_std * 100. Throws ConfigError when mse_std = 0.
double gain(double mse_std, double mse_est);

// Per-replication stream derivation: replication i uses
// RngStream::derive(seed, i) to draw the DPP; scenario s then uses
// child(s) of that stream for contamination followed by the jitter of each
// distinct grid, in column order.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Recomputes the summary from per-replication values.
std::vector<std::vector<ColumnSummary>> summarize(
    const std::vector<ReplicationRecord>& records, std::size_t scenarios,
    const std::vector<std::string>& columns, double intensity, double variance);

std::string config_digest(const ExperimentConfig& config);

}  // namespace dpp
