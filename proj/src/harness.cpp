#include "dpp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dpp/digest.hpp"
#include "dpp/error.hpp"
#include "dpp/estimators.hpp"
#include "dpp/sampler.hpp"

namespace dpp {

namespace {

struct Job {
  const ExperimentConfig& config;
  const SpectralModel& model;
  const std::vector<std::string>& columns;
  Taper taper;
  double bandwidth;
};

// Grid sizes needing a median estimate, in the order their jitter is drawn.
std::vector<int> grid_order(const EstimatorSettings& s) {
  std::vector<int> order;
  for (const int k : s.grids) {
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
  }
  for (const int k : s.ladder) {
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
  }
  return order;
}

std::vector<double> evaluate(const Job& job, const PointPattern& pattern, RngStream& rng) {
  const EstimatorSettings& s = job.config.estimators;
  std::vector<double> row;
  row.reserve(job.columns.size());
  row.push_back(lambda_std(pattern).value);

  std::map<int, double> med;
  for (const int k : grid_order(s)) {
    med[k] = lambda_med(pattern, make_grid(pattern.window(), k), rng).value;
  }
  for (const int k : s.grids) row.push_back(med[k]);
  if (!s.ladder.empty()) {
    std::vector<double> ladder_values;
    for (const int k : s.ladder) ladder_values.push_back(med[k]);
    row.push_back(sample_quantile(ladder_values, 0.5));
  }
  if (s.sigma2) row.push_back(sigma2_hat(pattern, job.taper, job.bandwidth));
  return row;
}

ReplicationRecord replicate(const Job& job, std::size_t index) {
  RngStream rng = RngStream::derive(job.config.seed, index);
  ReplicationRecord record{index, rng.seed(), 0, {}};
  const PointPattern sample = sample_dpp(job.model, rng);
  record.sampled = sample.size();
  for (std::size_t s = 0; s < job.config.scenarios.size(); ++s) {
    RngStream sub = rng.child(s);
    const ContaminationResult contaminated =
        contaminate(sample, job.config.scenarios[s].contamination, sub);
    record.values.push_back(evaluate(job, contaminated.pattern, sub));
  }
  return record;
}

}  // namespace

const ColumnSummary& ExperimentReport::at(const std::string& scenario,
                                          const std::string& column) const {
  const auto s = std::find(scenarios.begin(), scenarios.end(), scenario);
  const auto c = std::find(columns.begin(), columns.end(), column);
  if (s == scenarios.end() || c == columns.end()) {
    throw ConfigError("report has no cell " + scenario + "/" + column);
  }
  return summary[s - scenarios.begin()][c - columns.begin()];
}

std::vector<std::string> experiment_columns(const EstimatorSettings& settings) {
  std::vector<std::string> columns{"std"};
  for (const int k : settings.grids) columns.push_back(fmt::format("med{}", k));
  if (!settings.ladder.empty()) columns.push_back("medDD");
  if (settings.sigma2) columns.push_back("sigma2");
  return columns;
}

double gain(double mse_std, double mse_est) {
  if (!(mse_std > 0.0)) throw ConfigError("gain is undefined when the standard MSE is zero");
  return (mse_std - mse_est) / mse_std * 100.0;
}

std::vector<std::vector<ColumnSummary>> summarize(
    const std::vector<ReplicationRecord>& records, std::size_t scenarios,
    const std::vector<std::string>& columns, double intensity, double variance) {
  const double r = static_cast<double>(records.size());
  if (records.empty()) throw ConfigError("no replications to summarize");
  std::vector<std::vector<ColumnSummary>> out(scenarios,
                                              std::vector<ColumnSummary>(columns.size()));
  for (std::size_t s = 0; s < scenarios; ++s) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double target = columns[c] == "sigma2" ? variance : intensity;
      ColumnSummary& cell = out[s][c];
      double sum = 0.0;
      double sq = 0.0;
      for (const auto& rec : records) {
        const double v = rec.values[s][c];
        sum += v;
        sq += (v - target) * (v - target);
      }
      cell.mean = sum / r;
      double dev = 0.0;
      for (const auto& rec : records) {
        const double v = rec.values[s][c] - cell.mean;
        dev += v * v;
      }
      cell.sd = records.size() > 1 ? std::sqrt(dev / (r - 1.0)) : 0.0;
      cell.bias = cell.mean - target;
      cell.mse = sq / r;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      ColumnSummary& cell = out[s][c];
      if (columns[c] == "sigma2" || !(out[s][0].mse > 0.0)) {
        cell.gain = std::numeric_limits<double>::quiet_NaN();
      } else {
        cell.gain = gain(out[s][0].mse, cell.mse);
      }
    }
  }
  return out;
}

std::string config_digest(const ExperimentConfig& config) {
  const KernelSpec& k = config.kernel;
  std::string text = fmt::format("model={} d={} lambda={} R_fraction={} n={} reps={} seed={} T={}",
                                 config.model, k.dimension(), k.intensity(),
                                 k.range_fraction(), config.window_scale, config.replications,
                                 config.seed, config.truncation);
  const EstimatorSettings& e = config.estimators;
  text += fmt::format(" grids={} ladder={} sigma2={} bw={}", fmt::join(e.grids, ","),
                      fmt::join(e.ladder, ","), e.sigma2, e.bandwidth_scale);
  for (const Scenario& s : config.scenarios) {
    text += fmt::format(" [{} {} {} {} {}]", s.label, to_string(s.contamination.kind),
                        s.contamination.rho, s.contamination.squares,
                        s.contamination.side_fraction);
  }
  return digest_hex(text);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.replications < 1) throw ConfigError("replication count must be at least 1");
  if (!(config.window_scale > 0.0)) throw ConfigError("window scale must be positive");
  if (config.scenarios.empty()) throw ConfigError("at least one scenario is required");
  if (!(config.estimators.bandwidth_scale > 0.0)) {
    throw ConfigError("bandwidth scale must be positive");
  }
  const Window window = Window::centered_cube(config.kernel.dimension(), config.window_scale);
  for (const int k : grid_order(config.estimators)) (void)make_grid(window, k);
  const int truncation = config.truncation > 0 ? config.truncation : default_truncation(window);
  const SpectralModel model = build_spectral_model(config.kernel, window, truncation);
  const std::vector<std::string> columns = experiment_columns(config.estimators);
  const Job job{config, model, columns, triangular_taper(),
                config.estimators.bandwidth_scale * default_bandwidth(window)};

  const std::size_t reps = static_cast<std::size_t>(config.replications);
  std::vector<ReplicationRecord> records(reps);
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_index = reps;
  std::string failure;

  const auto worker = [&] {
    for (std::size_t i = next++; i < reps; i = next++) {
      try {
        records[i] = replicate(job, i);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = e.what();
        }
        next = reps;
      }
    }
  };
  const int workers = std::clamp(config.workers, 1, static_cast<int>(reps));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed_index < reps) {
    throw NumericError(fmt::format("replication {} (seed {}) failed: {}", failed_index,
                                   RngStream::derive(config.seed, failed_index).seed(),
                                   failure));
  }

  ExperimentReport report;
  report.config_digest = config_digest(config);
  report.model_digest = model.digest();
  report.target_intensity = config.kernel.intensity();
  report.target_variance = config.kernel.intensity() - config.kernel.c0();
  report.replications = config.replications;
  report.columns = columns;
  for (const Scenario& s : config.scenarios) report.scenarios.push_back(s.label);
  report.summary = summarize(records, config.scenarios.size(), columns,
                             report.target_intensity, report.target_variance);
  if (config.keep_records) report.records = std::move(records);
  return report;
}

}  // namespace dpp
