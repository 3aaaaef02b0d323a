#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qcmi/cli.hpp"

namespace qcmi::cli {

namespace {

void add_estimator_flags(CLI::App& app, RunConfig& c, std::string& norm, std::string& potential,
                         std::string& z_weights, std::string& ties, bool& nonstrict) {
  app.add_option("--k", c.estimator_config.k, "neighbors in the joint space")->check(CLI::PositiveNumber);
  app.add_option("--norm", norm, "distance norm")->check(CLI::IsMember({"max", "l2"}));
  app.add_option("--potential", potential, "replacement density q over (X,Z)")
      ->check(CLI::IsMember({"uniform", "gaussian", "product", "factual", "custom-grid"}));
  app.add_option("--bounds", c.potential.bounds, "uniform bounds lo0,hi0,lo1,hi1,...")->delimiter(',');
  app.add_option("--mean", c.potential.mean, "gaussian potential mean (one value or one per dimension)")->delimiter(',');
  app.add_option("--stddev", c.potential.stddev, "gaussian potential standard deviation")->delimiter(',');
  app.add_option("--grid-file", c.potential.grid_path, "custom-grid potential CSV");
  app.add_option("--bandwidth", c.estimator_config.bandwidth, "KDE bandwidth override")->check(CLI::PositiveNumber);
  app.add_option("--bins", c.bins, "partition estimator bins per dimension")->check(CLI::Range(2, 1 << 20));
  app.add_option("--weight-spread", c.estimator_config.weight_spread_threshold, "weight spread warning threshold");
  app.add_option("--z-weights", z_weights, "weights in the Z count")->check(CLI::IsMember({"neighbor", "center"}));
  app.add_option("--ties", ties, "digamma argument at zero radius")->check(CLI::IsMember({"tied-count", "fixed-k"}));
  app.add_flag("--nonstrict", nonstrict, "count subspace neighbors with <= instead of <");
  app.add_flag("--self-normalize", c.estimator_config.self_normalize, "divide importance weights by their mean");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential conditional mutual information estimation"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig c;
  std::string norm = "max";
  std::string potential = "uniform";
  std::string z_weights = "neighbor";
  std::string ties = "tied-count";
  double sigma = 0.0;
  std::string format = "json";
  std::string config_path;
  bool nonstrict = false;
  bool print_config = false;

  app.add_option("--config", config_path, "run configuration JSON (command-line flags are ignored)");
  app.add_option("--seed", c.seed, "seed for generators");
  app.add_option("--seeds", c.seeds, "seed list for experiments")->delimiter(',');
  app.add_option("--output", c.output, "output path ('-' for stdout; default from " + std::string(kOutputDirEnv) + ")");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

  auto* estimate = app.add_subcommand("estimate", "estimate from a dataset CSV");
  estimate->add_option("--input", c.input, "dataset CSV (x0..,y0..,z0..)")->required();
  estimate->add_option("--estimator", c.estimator, "estimator")->check(CLI::IsMember({"qcmi", "cmi", "entropy", "partition"}));
  add_estimator_flags(*estimate, c, norm, potential, z_weights, ties, nonstrict);

  auto* gen = app.add_subcommand("gen", "write a synthetic dataset");
  gen->add_option("generator", c.generator.name, "generator")->check(CLI::IsMember({"mod1", "beta-gaussian", "linear-decay"}));
  for (CLI::App* sub : {gen}) {
    sub->add_option("--samples", c.generator.samples, "number of samples");
    sub->add_option("--degree", c.generator.degree, "power applied to the uniform inputs");
    sub->add_option("--noise-width", c.generator.noise_width, "width of the uniform noise");
    sub->add_option("--alpha", c.generator.alpha, "beta distribution alpha");
    sub->add_option("--beta", c.generator.beta, "beta distribution beta");
    sub->add_option("--sigma", sigma, "gaussian noise standard deviation");
    sub->add_option("--zeros", c.generator.zeros, "all-zero samples to append");
    sub->add_option("--steps", c.generator.steps, "time steps per run");
    sub->add_option("--runs", c.generator.runs, "concatenated runs");
  }

  auto* experiment = app.add_subcommand("experiment", "run a named experiment preset, writing per-point CSV");
  experiment->add_option("preset", c.preset, "preset")->required()->check(CLI::IsMember(experiment_presets()));
  experiment->add_option("--grid", c.grid, "values for the swept parameter")->delimiter(',');
  experiment->add_option("--samples", c.generator.samples, "samples per point where not swept");
  experiment->add_option("--degree", c.generator.degree, "degree where not swept");
  experiment->add_option("--noise-width", c.generator.noise_width, "width of the uniform noise");
  experiment->add_option("--sigma", sigma, "gaussian noise standard deviation");
  experiment->add_option("--runs", c.generator.runs, "concatenated runs (linear-decay-auc)");
  add_estimator_flags(*experiment, c, norm, potential, z_weights, ties, nonstrict);

  auto* infer = app.add_subcommand("infer", "score directed edges of a time series");
  infer->add_option("--input", c.input, "time series CSV (t,v0,..)")->required();
  infer->add_option("--truth", c.truth, "adjacency edge list CSV (i,j)");
  infer->add_option("--method", c.method, "edge score")->check(CLI::IsMember({"rdi", "urdi"}));
  add_estimator_flags(*infer, c, norm, potential, z_weights, ties, nonstrict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open '" + config_path + "'");
      c = run_config_from_json(nlohmann::json::parse(in));
    } else {
      if (*estimate) c.command = Command::Estimate;
      if (*gen) c.command = Command::Gen;
      if (*experiment) c.command = Command::Experiment;
      if (*infer) c.command = Command::Infer;
      c.estimator_config.norm = norm_from_string(norm);
      c.estimator_config.strict = !nonstrict;
      c.estimator_config.z_weights = z_weights == "neighbor" ? ZCountWeights::Neighbor : ZCountWeights::Center;
      c.estimator_config.ties = ties == "tied-count" ? TiePolicy::TiedCount : TiePolicy::FixedK;
      c.potential.kind = potential_kind_from_string(potential);
      c.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
      if (gen->count("--sigma") + experiment->count("--sigma") > 0) c.generator.sigma = sigma;
    }
    c.estimator_config.validate();
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << '\n';
    return 2;
  }
  if (print_config) {
    std::cout << to_json(c).dump(2) << '\n';
    return 0;
  }
  return run(c, std::cerr);
}

}  // namespace qcmi::cli
