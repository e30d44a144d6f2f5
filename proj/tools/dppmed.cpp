// dppmed: simulate stationary Bessel-type DPPs, estimate their intensity,
// check the approximation conditions and run Monte Carlo experiments.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dpp/contamination.hpp"
#include "dpp/countdist.hpp"
#include "dpp/error.hpp"
#include "dpp/estimators.hpp"
#include "dpp/harness.hpp"
#include "dpp/io.hpp"
#include "dpp/kernel.hpp"
#include "dpp/sampler.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;

struct KernelFlags {
  std::string model = "dpp1";
  double lambda = 50.0;
  std::optional<double> r_fraction;
  int dimension = 2;

  dpp::KernelSpec build() const {
    double fraction = 0.0;
    if (model == "custom") {
      if (!r_fraction) throw dpp::ConfigError("--model custom needs --R-fraction");
      fraction = *r_fraction;
    } else {
      fraction = dpp::preset_range_fraction(model);
      if (r_fraction && *r_fraction != fraction) {
        throw dpp::ConfigError(fmt::format("--R-fraction {} conflicts with --model {} ({})",
                                           *r_fraction, model, fraction));
      }
    }
    if (fraction > 1.0) {
      throw dpp::ConfigError(
          fmt::format("R fraction {} exceeds 1: the kernel does not define a DPP", fraction));
    }
    return dpp::KernelSpec::bessel(dimension, lambda, fraction);
  }
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& k) {
  cmd->add_option("--model", k.model, "Kernel preset")
      ->check(CLI::IsMember({"dpp1", "dpp2", "custom"}))
      ->capture_default_str();
  cmd->add_option("--lambda", k.lambda, "Intensity")->capture_default_str();
  cmd->add_option("--R-fraction", k.r_fraction, "Range R as a fraction of the maximal range M");
  cmd->add_option("--dim", k.dimension, "Dimension (1 to 3)")->capture_default_str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dpp::ConfigError("cannot write " + path);
  out << text;
}

void emit_json(const std::string& path, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

dpp::RunManifest manifest_for(const std::string& subcommand, std::uint64_t seed,
                              const std::vector<std::string>& arguments) {
  dpp::RunManifest m;
  m.subcommand = subcommand;
  m.seed = seed;
  m.arguments = arguments;
  return m;
}

// simulate ------------------------------------------------------------------

struct SimulateOptions {
  KernelFlags kernel;
  double n = 1.0;
  std::uint64_t seed = 1;
  int truncation = 0;
  std::string process = "dpp";
  std::string out;
};

int run_simulate(const SimulateOptions& o, const std::vector<std::string>& args) {
  const dpp::KernelSpec spec = o.kernel.build();
  const dpp::Window window = dpp::Window::centered_cube(spec.dimension(), o.n);
  dpp::RngStream rng(o.seed);
  std::string digest;
  std::optional<dpp::PointPattern> pattern;
  if (o.process == "poisson") {
    pattern = dpp::sample_poisson(spec.intensity(), window, rng);
  } else {
    const int t = o.truncation > 0 ? o.truncation : dpp::default_truncation(window);
    const dpp::SpectralModel model = dpp::build_spectral_model(spec, window, t);
    digest = model.digest();
    pattern = dpp::sample_dpp(model, rng);
  }

  dpp::RunManifest manifest = manifest_for("simulate", o.seed, args);
  manifest.outputs = {o.out + ".csv", o.out + ".json"};
  std::ostringstream csv;
  dpp::write_pattern_csv(csv, *pattern);
  write_text(o.out + ".csv", csv.str());
  json sidecar = dpp::pattern_json(*pattern, o.seed, digest);
  sidecar["kernel"] = spec.to_config();
  sidecar["process"] = o.process;
  sidecar["manifest"] = dpp::manifest_json(manifest);
  emit_json(o.out + ".json", sidecar);
  std::cerr << fmt::format("{} points written to {}.csv\n", pattern->size(), o.out);
  return 0;
}

// estimate ------------------------------------------------------------------

struct EstimateOptions {
  std::string pattern;
  double n = 1.0;
  std::string ladder = "9,16,25,36,49";
  std::uint64_t seed = 1;
  bool sigma2 = false;
  double level = 0.95;
  std::string out;
};

int run_estimate(const EstimateOptions& o, const std::vector<std::string>& args) {
  std::ifstream in(o.pattern);
  if (!in) throw dpp::ConfigError("cannot open " + o.pattern);
  dpp::CsvPoints points = dpp::read_points_csv(in);
  const dpp::Window window = dpp::Window::centered_cube(points.dimension, o.n);
  const dpp::PointPattern pattern(window, std::move(points.coordinates));
  const std::vector<int> ladder = dpp::parse_int_list(o.ladder);
  const double volume = window.volume();

  json estimates = json::array();
  const dpp::IntensityEstimate standard = dpp::lambda_std(pattern);
  estimates.push_back(dpp::estimate_json(standard, dpp::conservative_ci(standard, volume, o.level)));

  // One jitter stream for the whole ladder; the data-driven estimate is the
  // median of the values below, as lambda_med_dd with the same seed.
  dpp::RngStream rng(o.seed);
  std::vector<double> medians;
  for (const int k : ladder) {
    const dpp::IntensityEstimate e = dpp::lambda_med(pattern, dpp::make_grid(window, k), rng);
    medians.push_back(e.value);
    estimates.push_back(dpp::estimate_json(e, dpp::conservative_ci(e, volume, o.level)));
  }
  if (!ladder.empty()) {
    const dpp::IntensityEstimate dd{dpp::EstimatorKind::median_dd,
                                    dpp::sample_quantile(medians, 0.5), 0, o.seed};
    estimates.push_back(dpp::estimate_json(dd, dpp::conservative_ci(dd, volume, o.level)));
  }

  dpp::RunManifest manifest = manifest_for("estimate", o.seed, args);
  manifest.config = o.pattern;
  if (!o.out.empty()) manifest.outputs = {o.out};
  json doc{{"window", dpp::window_json(window)},
           {"count", pattern.size()},
           {"level", o.level},
           {"estimates", std::move(estimates)}};
  if (o.sigma2) {
    const double b = dpp::default_bandwidth(window);
    doc["sigma2"] = {{"value", dpp::sigma2_hat(pattern, dpp::triangular_taper(), b)},
                     {"bandwidth", b}};
  }
  doc["manifest"] = dpp::manifest_json(manifest);
  emit_json(o.out, doc);
  return 0;
}

// check ---------------------------------------------------------------------

struct CheckOptions {
  KernelFlags kernel;
  std::optional<double> bounds_n;
  std::string out;
};

int run_check(const CheckOptions& o, const std::vector<std::string>& args) {
  const dpp::KernelSpec spec = o.kernel.build();
  const dpp::ExistenceReport existence = dpp::check_existence(spec);
  json doc{{"d", spec.dimension()},
           {"lambda", spec.intensity()},
           {"M", spec.max_range()},
           {"R", spec.range()},
           {"R_fraction", spec.range_fraction()},
           {"C0", spec.c0()},
           {"C0_direct", existence.c0_direct},
           {"fourier_sup", existence.sup_fourier},
           {"fourier_bound", std::pow(spec.range_fraction(), spec.dimension())},
           {"existence", existence.valid},
           {"existence_strict", existence.strict}};
  bool ok = existence.valid;
  if (spec.c0() < spec.intensity()) {
    const dpp::ApproxConstants k = dpp::approx_constants(spec.intensity(), spec.c0());
    const dpp::ConditionValue c = dpp::check_condition_amed(spec.intensity(), spec.c0());
    doc["kappa0"] = k.kappa0;
    doc["kappa1"] = k.kappa1;
    doc["condition_value"] = c.value;
    doc["condition_holds"] = c.holds;
    if (o.bounds_n) {
      const dpp::Window window = dpp::Window::centered_cube(spec.dimension(), *o.bounds_n);
      const dpp::SpectralModel model =
          dpp::build_spectral_model(spec, window, dpp::default_truncation(window));
      doc["bounds"] = dpp::bound_report_json(
          dpp::d0_d1_check(model, spec.intensity(), spec.c0()));
    }
  } else {
    doc["error"] = "squared kernel integral is not below the intensity";
    ok = false;
  }
  dpp::RunManifest manifest = manifest_for("check", 0, args);
  if (!o.out.empty()) manifest.outputs = {o.out};
  doc["manifest"] = dpp::manifest_json(manifest);
  emit_json(o.out, doc);
  return ok ? 0 : kExitInvalid;
}

// experiment ----------------------------------------------------------------

struct ExperimentOptions {
  std::string config;
  KernelFlags kernel;
  bool kernel_given = false;
  std::optional<double> n;
  std::optional<std::string> ladder;
  std::optional<std::string> contamination;
  std::optional<double> rho;
  std::optional<int> squares;
  std::optional<double> side_fraction;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out = "experiment";
};

int run_experiment_cmd(const ExperimentOptions& o, const std::vector<std::string>& args) {
  dpp::ExperimentConfig config;
  if (!o.config.empty()) config = dpp::load_experiment_config(o.config);
  if (o.config.empty() || o.kernel_given) {
    config.kernel = o.kernel.build();
    config.model = o.kernel.model;
  }
  if (o.n) config.window_scale = *o.n;
  if (o.ladder) {
    config.estimators.ladder = dpp::parse_int_list(*o.ladder);
    config.estimators.grids = config.estimators.ladder;
  }
  if (o.contamination || o.rho || o.squares || o.side_fraction) {
    dpp::ContaminationSpec spec =
        config.scenarios.size() == 1 ? config.scenarios[0].contamination : dpp::ContaminationSpec{};
    if (o.contamination) spec.kind = dpp::parse_contamination_kind(*o.contamination);
    if (o.rho) spec.rho = *o.rho;
    if (o.squares) spec.squares = *o.squares;
    if (o.side_fraction) spec.side_fraction = *o.side_fraction;
    config.scenarios = {{dpp::to_string(spec.kind), spec}};
  }
  if (o.reps) config.replications = *o.reps;
  if (o.seed) config.seed = *o.seed;
  if (o.workers) {
    config.workers = *o.workers;
  } else if (o.config.empty()) {
    config.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  if (config.workers < 1) throw dpp::ConfigError("--workers must be at least 1");

  const dpp::ExperimentReport report = dpp::run_experiment(config);
  dpp::RunManifest manifest = manifest_for("experiment", config.seed, args);
  manifest.config = o.config;
  manifest.outputs = {o.out + ".csv", o.out + ".json"};
  std::ostringstream csv;
  dpp::write_report_csv(csv, config, report);
  write_text(o.out + ".csv", csv.str());
  json doc = dpp::report_json(config, report);
  doc["manifest"] = dpp::manifest_json(manifest);
  emit_json(o.out + ".json", doc);
  std::cout << csv.str();
  return 0;
}

// plotdata ------------------------------------------------------------------

struct PlotOptions {
  KernelFlags kernel;
  std::string pattern;
  double n = 1.0;
  int k_n = 9;
  double r_max = 0.3;
  int points = 301;
  std::string out;
};

int run_plotdata(const PlotOptions& o, const std::vector<std::string>& args) {
  std::ostringstream csv;
  if (!o.pattern.empty()) {
    std::ifstream in(o.pattern);
    if (!in) throw dpp::ConfigError("cannot open " + o.pattern);
    dpp::CsvPoints points = dpp::read_points_csv(in);
    const dpp::Window window = dpp::Window::centered_cube(points.dimension, o.n);
    const dpp::PointPattern pattern(window, std::move(points.coordinates));
    const dpp::CellGrid grid = dpp::make_grid(window, o.k_n);
    const char* names[] = {"x", "y", "z"};
    for (int i = 0; i < pattern.dimension(); ++i) csv << names[i] << ',';
    csv << "cell\n";
    for (std::size_t p = 0; p < pattern.size(); ++p) {
      const auto x = pattern.point(p);
      csv << fmt::format("{},{}\n", fmt::join(x, ","), grid.cell_of(x));
    }
  } else {
    if (o.points < 2) throw dpp::ConfigError("--points must be at least 2");
    const dpp::KernelSpec spec = o.kernel.build();
    csv << "r,g\n";
    for (int i = 0; i < o.points; ++i) {
      const double r = o.r_max * i / (o.points - 1);
      csv << fmt::format("{},{}\n", r, dpp::pair_correlation(spec, r));
    }
  }
  dpp::RunManifest manifest = manifest_for("plotdata", 0, args);
  if (o.out.empty() || o.out == "-") {
    std::cout << csv.str();
    return 0;
  }
  manifest.outputs = {o.out, o.out + ".json"};
  write_text(o.out, csv.str());
  emit_json(o.out + ".json", json{{"manifest", dpp::manifest_json(manifest)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intensity estimation for stationary determinantal point processes"};
  app.set_version_flag("--version", dpp::kToolVersion);
  app.require_subcommand(1);
  const std::vector<std::string> args(argv + 1, argv + argc);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Draw one realization on [-n, n]^d");
  add_kernel_flags(simulate, sim.kernel);
  simulate->add_option("--n", sim.n, "Window half-side")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--truncation", sim.truncation, "Frequencies per half-axis (0: default)");
  simulate->add_option("--process", sim.process, "Point process")
      ->check(CLI::IsMember({"dpp", "poisson"}))
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "Output prefix for .csv and .json")->required();

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the intensity of a pattern file");
  estimate->add_option("pattern", est.pattern, "CSV with header x,y")->required();
  estimate->add_option("--n", est.n, "Window half-side")->capture_default_str();
  estimate->add_option("--kn-ladder", est.ladder, "Grid sizes")->capture_default_str();
  estimate->add_option("--seed", est.seed, "Jitter seed")->capture_default_str();
  estimate->add_flag("--sigma2", est.sigma2, "Also report the variance estimate");
  estimate->add_option("--level", est.level, "Confidence level")->capture_default_str();
  estimate->add_option("--out", est.out, "Output JSON (default stdout)");

  CheckOptions chk;
  auto* check = app.add_subcommand("check", "Kernel constants and approximation conditions");
  add_kernel_flags(check, chk.kernel);
  check->add_option("--bounds-n", chk.bounds_n, "Also compare count laws on [-n, n]^d");
  check->add_option("--out", chk.out, "Output JSON (default stdout)");

  ExperimentOptions exp;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo bias / SD / MSE / gain table");
  experiment->add_option("--config", exp.config, "INI experiment config");
  add_kernel_flags(experiment, exp.kernel);
  experiment->add_option("--n", exp.n, "Window half-side");
  experiment->add_option("--kn-ladder", exp.ladder, "Grid sizes");
  experiment->add_option("--contamination", exp.contamination, "Contamination kind")
      ->check(CLI::IsMember({"none", "add-subsquare", "delete-subsquare", "add-uniform",
                             "delete-uniform"}));
  experiment->add_option("--rho", exp.rho, "Contamination fraction");
  experiment->add_option("--squares", exp.squares, "Number of sub-squares");
  experiment->add_option("--side-fraction", exp.side_fraction,
                         "Added sub-square side relative to the window side");
  experiment->add_option("--reps", exp.reps, "Replications");
  experiment->add_option("--seed", exp.seed, "Master seed");
  experiment->add_option("--workers", exp.workers, "Worker threads (default: all cores)");
  experiment->add_option("--out", exp.out, "Output prefix for .csv and .json")
      ->capture_default_str();

  PlotOptions plot;
  auto* plotdata = app.add_subcommand("plotdata", "Pair correlation curve or annotated pattern");
  add_kernel_flags(plotdata, plot.kernel);
  plotdata->add_option("--pattern", plot.pattern, "Pattern CSV to annotate with cell indices");
  plotdata->add_option("--n", plot.n, "Window half-side")->capture_default_str();
  plotdata->add_option("--kn", plot.k_n, "Grid size for cell indices")->capture_default_str();
  plotdata->add_option("--r-max", plot.r_max, "Largest distance")->capture_default_str();
  plotdata->add_option("--points", plot.points, "Number of distances")->capture_default_str();
  plotdata->add_option("--out", plot.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  exp.kernel_given = experiment->count("--model") + experiment->count("--lambda") +
                         experiment->count("--R-fraction") + experiment->count("--dim") >
                     0;
  try {
    if (*simulate) return run_simulate(sim, args);
    if (*estimate) return run_estimate(est, args);
    if (*check) return run_check(chk, args);
    if (*experiment) return run_experiment_cmd(exp, args);
    if (*plotdata) return run_plotdata(plot, args);
  } catch (const dpp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const dpp::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitUsage;
}
