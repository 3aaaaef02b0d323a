#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcmi/estimators.hpp"
#include "qcmi/potentials.hpp"

namespace qcmi::cli {

inline constexpr const char* kOutputDirEnv = "QCMI_OUTPUT_DIR";

enum class Command { Estimate, Gen, Experiment, Infer };
enum class OutputFormat { Csv, Json };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Uniform;
  std::optional<std::vector<double>> bounds;  // lo0, hi0, lo1, hi1, ...
  std::optional<std::vector<double>> mean;
  std::optional<std::vector<double>> stddev;
  std::optional<std::string> grid_path;
};

struct GeneratorSpec {
  std::string name = "mod1";  // mod1 | beta-gaussian | linear-decay
  std::size_t samples = 1000;
  int degree = 1;
  double noise_width = 0.2;
  double alpha = 1.5;
  double beta = 1.5;
  /// Unset means the generator's own default: 0.3 for beta-gaussian, 0.1 for linear-decay.
  std::optional<double> sigma;
  double sigma_or(double fallback) const { return sigma.value_or(fallback); }
  std::size_t zeros = 0;
  std::size_t steps = 1000;
  std::size_t runs = 1;
};

struct RunConfig {
  Command command = Command::Estimate;
  std::string input;
  std::string truth;
  std::string estimator = "qcmi";  // estimate: qcmi | cmi | entropy | partition
  std::string method = "urdi";     // infer: rdi | urdi
  std::string preset;              // experiment
  std::vector<double> grid;        // experiment: overrides the swept values
  GeneratorSpec generator;
  EstimatorConfig estimator_config;
  PotentialSpec potential;
  std::optional<int> bins;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  std::string output;
  OutputFormat format = OutputFormat::Json;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EstimatorConfig& config);
EstimatorConfig estimator_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EstimateReport& report);

/// Potential for `data` as described by `spec`, honoring the estimator's bandwidth for factual q.
Potential build_potential(const PotentialSpec& spec, const Dataset& data, const EstimatorConfig& cfg);

/// Names accepted by the `experiment` command.
const std::vector<std::string>& experiment_presets();

/// Runs one experiment preset, writing per-point CSV rows to `out` as they
/// complete. Throws on failure after writing a `# FAILED` marker line.
void run_experiment(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Executes `config`; returns the process exit status (0 iff the output was fully written).
int run(const RunConfig& config, std::ostream& log);

/// Parses argv into a RunConfig and runs it.
int main(int argc, char** argv);

}  // namespace qcmi::cli
