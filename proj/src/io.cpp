#include "dpp/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dpp/error.hpp"

namespace dpp {

namespace {

const char* const kAxisNames[] = {"x", "y", "z"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) parts.push_back(trim(field));
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  }
}

long long parse_integer(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", what, text));
  }
}

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", what, text));
}

using Tree = boost::property_tree::ptree;

void check_keys(const Tree& section, const std::string& name,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.count(key)) {
      throw ConfigError(fmt::format("unknown key '{}' in section [{}]", key, name));
    }
  }
}

ContaminationSpec parse_contamination(const Tree& section, const std::string& name) {
  check_keys(section, name, {"kind", "rho", "squares", "side_fraction"});
  ContaminationSpec spec;
  spec.kind = parse_contamination_kind(trim(section.get<std::string>("kind", "none")));
  if (auto v = section.get_optional<std::string>("rho")) spec.rho = parse_double(trim(*v), name + ".rho");
  if (auto v = section.get_optional<std::string>("squares")) {
    spec.squares = static_cast<int>(parse_integer(trim(*v), name + ".squares"));
  }
  if (auto v = section.get_optional<std::string>("side_fraction")) {
    spec.side_fraction = parse_double(trim(*v), name + ".side_fraction");
  }
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) {
    throw ConfigError(fmt::format("[{}] rho must lie in [0, 1)", name));
  }
  if (spec.squares < 1) throw ConfigError(fmt::format("[{}] squares must be positive", name));
  return spec;
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void write_pattern_csv(std::ostream& out, const PointPattern& pattern) {
  const int d = pattern.dimension();
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << kAxisNames[i];
  out << '\n';
  for (std::size_t p = 0; p < pattern.size(); ++p) {
    const auto x = pattern.point(p);
    out << fmt::format("{}\n", fmt::join(x, ","));
  }
}

CsvPoints read_points_csv(std::istream& in) {
  CsvPoints result;
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    result.dimension = 2;
    return result;
  }
  const std::vector<std::string> header = split(trim(line), ',');
  const int d = static_cast<int>(header.size());
  if (d < 1 || d > 3) throw ConfigError(fmt::format("row 1: expected 1 to 3 columns, got {}", d));
  for (int i = 0; i < d; ++i) {
    if (header[i] != kAxisNames[i]) {
      throw ConfigError(fmt::format("row 1: column {} should be '{}', found '{}'", i + 1,
                                    kAxisNames[i], header[i]));
    }
  }
  result.dimension = d;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(trim(line), ',');
    if (static_cast<int>(fields.size()) != d) {
      throw ConfigError(fmt::format("row {}: expected {} fields, got {}", row, d, fields.size()));
    }
    for (const std::string& f : fields) {
      const double v = parse_double(f, fmt::format("row {}", row));
      if (!std::isfinite(v)) throw ConfigError(fmt::format("row {}: non-finite coordinate", row));
      result.coordinates.push_back(v);
    }
  }
  return result;
}

nlohmann::json window_json(const Window& window) {
  nlohmann::json axes = nlohmann::json::array();
  for (const Interval& a : window.axes()) axes.push_back({a.lo, a.hi});
  return axes;
}

nlohmann::json pattern_json(const PointPattern& pattern, std::uint64_t seed,
                            const std::string& model_digest) {
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t p = 0; p < pattern.size(); ++p) {
    const auto x = pattern.point(p);
    points.push_back(std::vector<double>(x.begin(), x.end()));
  }
  return {{"window", window_json(pattern.window())},
          {"points", std::move(points)},
          {"seed", seed},
          {"model_digest", model_digest}};
}

nlohmann::json estimate_json(const IntensityEstimate& estimate, const ConfidenceInterval& ci) {
  return {{"estimator", to_string(estimate.kind)},
          {"value", estimate.value},
          {"k_n", estimate.k_n},
          {"seed", estimate.seed},
          {"ci_low", ci.low},
          {"ci_high", ci.high}};
}

nlohmann::json bound_report_json(const BoundReport& report) {
  return {{"S_volume", report.volume},  {"kappa0", report.kappa0},
          {"sup_d0", report.sup_d0},    {"bound_ok", report.bound_ok},
          {"sup_d1", report.sup_d1},    {"residual", report.residual}};
}

nlohmann::json manifest_json(const RunManifest& manifest) {
  return {{"subcommand", manifest.subcommand},
          {"arguments", manifest.arguments},
          {"config", manifest.config},
          {"seed", manifest.seed},
          {"outputs", manifest.outputs},
          {"version", manifest.version}};
}

double preset_range_fraction(const std::string& model) {
  if (model == "dpp1") return 0.25;
  if (model == "dpp2") return 0.75;
  throw ConfigError("unknown model '" + model + "' (expected dpp1, dpp2 or custom)");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const std::string& part : split(text, ',')) {
    if (part.empty()) throw ConfigError("empty entry in list '" + text + "'");
    values.push_back(static_cast<int>(parse_integer(part, "list")));
  }
  return values;
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  Tree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }

  ExperimentConfig config;
  bool single_contamination = false;
  std::vector<Scenario> scenarios;
  for (const auto& [name, section] : tree) {
    if (name == "kernel") {
      check_keys(section, name, {"model", "d", "lambda", "R_fraction"});
      config.model = trim(section.get<std::string>("model", "dpp1"));
      const double lambda = parse_double(trim(section.get<std::string>("lambda", "50")), "kernel.lambda");
      const long long d = parse_integer(trim(section.get<std::string>("d", "2")), "kernel.d");
      double fraction = 0.0;
      if (auto v = section.get_optional<std::string>("R_fraction")) {
        fraction = parse_double(trim(*v), "kernel.R_fraction");
        if (config.model != "custom" && fraction != preset_range_fraction(config.model)) {
          throw ConfigError("kernel.R_fraction conflicts with model " + config.model);
        }
      } else if (config.model == "custom") {
        throw ConfigError("a custom model needs kernel.R_fraction");
      } else {
        fraction = preset_range_fraction(config.model);
      }
      if (d < 1 || d > 3) throw ConfigError("kernel.d must be 1, 2 or 3");
      config.kernel = KernelSpec::bessel(static_cast<int>(d), lambda, fraction);
    } else if (name == "window") {
      check_keys(section, name, {"n"});
      if (auto v = section.get_optional<std::string>("n")) config.window_scale = parse_double(trim(*v), "window.n");
    } else if (name == "estimators") {
      check_keys(section, name, {"grids", "ladder", "sigma2", "bandwidth_scale"});
      EstimatorSettings& e = config.estimators;
      if (auto v = section.get_optional<std::string>("grids")) e.grids = trim(*v).empty() ? std::vector<int>{} : parse_int_list(trim(*v));
      if (auto v = section.get_optional<std::string>("ladder")) e.ladder = trim(*v).empty() ? std::vector<int>{} : parse_int_list(trim(*v));
      if (auto v = section.get_optional<std::string>("sigma2")) e.sigma2 = parse_bool(trim(*v), "estimators.sigma2");
      if (auto v = section.get_optional<std::string>("bandwidth_scale")) {
        e.bandwidth_scale = parse_double(trim(*v), "estimators.bandwidth_scale");
      }
    } else if (name == "harness") {
      check_keys(section, name, {"reps", "seed", "workers", "truncation", "keep_records"});
      if (auto v = section.get_optional<std::string>("reps")) config.replications = static_cast<int>(parse_integer(trim(*v), "harness.reps"));
      if (auto v = section.get_optional<std::string>("seed")) {
        const long long s = parse_integer(trim(*v), "harness.seed");
        if (s < 0) throw ConfigError("harness.seed must be non-negative");
        config.seed = static_cast<std::uint64_t>(s);
      }
      if (auto v = section.get_optional<std::string>("workers")) config.workers = static_cast<int>(parse_integer(trim(*v), "harness.workers"));
      if (auto v = section.get_optional<std::string>("truncation")) config.truncation = static_cast<int>(parse_integer(trim(*v), "harness.truncation"));
      if (auto v = section.get_optional<std::string>("keep_records")) config.keep_records = parse_bool(trim(*v), "harness.keep_records");
    } else if (name == "contamination") {
      const ContaminationSpec spec = parse_contamination(section, name);
      scenarios.push_back({to_string(spec.kind), spec});
      single_contamination = true;
    } else if (name.rfind("scenario.", 0) == 0 && name.size() > 9) {
      scenarios.push_back({name.substr(9), parse_contamination(section, name)});
    } else {
      throw ConfigError("unknown config section [" + name + "]");
    }
  }
  if (single_contamination && scenarios.size() > 1) {
    throw ConfigError("use either [contamination] or [scenario.*] sections, not both");
  }
  if (!scenarios.empty()) config.scenarios = std::move(scenarios);
  if (config.replications < 1) throw ConfigError("harness.reps must be at least 1");
  if (config.workers < 1) throw ConfigError("harness.workers must be at least 1");
  if (!(config.window_scale > 0.0)) throw ConfigError("window.n must be positive");
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_experiment_config(in);
}

void write_report_csv(std::ostream& out, const ExperimentConfig& config,
                      const ExperimentReport& report) {
  out << "model,n,scenario,contamination,rho,squares,side_fraction,reps";
  for (const std::string& c : report.columns) {
    out << fmt::format(",{0}_mean,{0}_sd,{0}_bias,{0}_mse,{0}_gain", c);
  }
  out << '\n';
  const auto num = [](double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string("NA"); };
  for (std::size_t s = 0; s < report.scenarios.size(); ++s) {
    const ContaminationSpec& spec = config.scenarios[s].contamination;
    out << fmt::format("{},{},{},{},{},{},{},{}", config.model, config.window_scale,
                       report.scenarios[s], to_string(spec.kind), spec.rho, spec.squares,
                       spec.side_fraction, report.replications);
    for (const ColumnSummary& cell : report.summary[s]) {
      out << ',' << num(cell.mean) << ',' << num(cell.sd) << ',' << num(cell.bias) << ','
          << num(cell.mse) << ',' << num(cell.gain);
    }
    out << '\n';
  }
}

nlohmann::json report_json(const ExperimentConfig& config, const ExperimentReport& report) {
  nlohmann::json scenarios = nlohmann::json::array();
  for (std::size_t s = 0; s < report.scenarios.size(); ++s) {
    const ContaminationSpec& spec = config.scenarios[s].contamination;
    nlohmann::json estimators = nlohmann::json::object();
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      const ColumnSummary& cell = report.summary[s][c];
      estimators[report.columns[c]] = {{"mean", cell.mean},
                                       {"sd", cell.sd},
                                       {"bias", cell.bias},
                                       {"mse", cell.mse},
                                       {"gain", finite_or_null(cell.gain)}};
    }
    scenarios.push_back({{"label", report.scenarios[s]},
                         {"contamination",
                          {{"kind", to_string(spec.kind)},
                           {"rho", spec.rho},
                           {"squares", spec.squares},
                           {"side_fraction", spec.side_fraction}}},
                         {"estimators", std::move(estimators)}});
  }
  nlohmann::json records = nlohmann::json::array();
  for (const ReplicationRecord& r : report.records) {
    records.push_back({{"index", r.index}, {"seed", r.seed}, {"sampled", r.sampled},
                       {"values", r.values}});
  }
  const KernelSpec& k = config.kernel;
  return {{"config",
           {{"model", config.model},
            {"d", k.dimension()},
            {"lambda", k.intensity()},
            {"R_fraction", k.range_fraction()},
            {"R", k.range()},
            {"n", config.window_scale},
            {"reps", config.replications},
            {"seed", config.seed},
            {"truncation", config.truncation},
            {"grids", config.estimators.grids},
            {"ladder", config.estimators.ladder},
            {"sigma2", config.estimators.sigma2},
            {"bandwidth_scale", config.estimators.bandwidth_scale}}},
          {"config_digest", report.config_digest},
          {"model_digest", report.model_digest},
          {"target_intensity", report.target_intensity},
          {"target_variance", report.target_variance},
          {"columns", report.columns},
          {"scenarios", std::move(scenarios)},
          {"records", std::move(records)}};
}

}  // namespace dpp
