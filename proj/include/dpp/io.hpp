#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpp/countdist.hpp"
#include "dpp/estimators.hpp"
#include "dpp/geometry.hpp"
#include "dpp/harness.hpp"

namespace dpp {

inline constexpr const char* kToolVersion = "0.1.0";

// Header x[,y[,z]], one point per row.
void write_pattern_csv(std::ostream& out, const PointPattern& pattern);

struct CsvPoints {
  int dimension = 0;
  std::vector<double> coordinates;
};

// Throws ConfigError naming the offending row (1-based, header is row 1).
// An empty stream is read as zero points in dimension 2.
CsvPoints read_points_csv(std::istream& in);

nlohmann::json window_json(const Window& window);
nlohmann::json pattern_json(const PointPattern& pattern, std::uint64_t seed,
                            const std::string& model_digest);
nlohmann::json estimate_json(const IntensityEstimate& estimate, const ConfidenceInterval& ci);
nlohmann::json bound_report_json(const BoundReport& report);

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> arguments;
  std::string config;  // config path, empty when flags only
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::string version = kToolVersion;
};

nlohmann::json manifest_json(const RunManifest& manifest);

// dpp1 -> 0.25, dpp2 -> 0.75; throws ConfigError for other names.
double preset_range_fraction(const std::string& model);

// INI text with sections [kernel], [window], [estimators], [harness] and
// either one [contamination] section or several [scenario.<label>]
// sections, kept in file order. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

// One row per scenario; for each estimator column <c>_mean, <c>_sd,
// <c>_bias, <c>_mse, <c>_gain.
void write_report_csv(std::ostream& out, const ExperimentConfig& config,
                      const ExperimentReport& report);
nlohmann::json report_json(const ExperimentConfig& config, const ExperimentReport& report);

// Comma separated integers.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace dpp
