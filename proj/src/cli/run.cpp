#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qcmi/cli.hpp"
#include "qcmi/netinfer.hpp"
#include "qcmi/random.hpp"
#include "qcmi/synthgen.hpp"

namespace qcmi::cli {

using nlohmann::json;

namespace {

std::string default_name(const RunConfig& c) {
  const char* ext = c.format == OutputFormat::Json ? ".json" : ".csv";
  switch (c.command) {
    case Command::Estimate: return "estimate-" + c.estimator + ext;
    case Command::Gen: return c.generator.name + "-seed" + std::to_string(c.seed) + ".csv";
    case Command::Experiment: return c.preset + ".csv";
    case Command::Infer: return "infer-" + c.method + ext;
  }
  return "out";
}

// "-" means stdout.
std::string resolve_output(const RunConfig& c) {
  if (!c.output.empty()) return c.output;
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir)
    return (std::filesystem::path(dir) / default_name(c)).string();
  return "-";
}

// Writes through `body` into `path`, or to stdout for "-".
template <typename Body>
void write_output(const std::string& path, Body&& body) {
  if (path == "-") {
    body(std::cout);
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("failed writing to stdout");
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

json envelope(const RunConfig& c, double seconds) {
  json j;
  j["version"] = std::string("qcmi-") + QCMI_VERSION;
  j["rng"] = std::string(kRngAlgorithm);
  j["config"] = to_json(c);
  j["duration_seconds"] = seconds;
  return j;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void run_estimate(const RunConfig& c, const std::string& path) {
  const auto start = Clock::now();
  if (c.input.empty()) throw std::invalid_argument("estimate needs --input");
  const Dataset data = read_dataset_csv(c.input);
  json result;
  if (c.estimator == "qcmi") {
    const Potential q = build_potential(c.potential, data, c.estimator_config);
    result = to_json(qcmi_knn(data, q, c.estimator_config));
  } else if (c.estimator == "cmi") {
    result = to_json(cmi_knn(data, c.estimator_config));
  } else if (c.estimator == "entropy") {
    result = {{"method", "entropy"},
              {"estimate", entropy_kl(data.xyz(), c.estimator_config.k, c.estimator_config.norm)},
              {"units", "nats"}};
  } else if (c.estimator == "partition") {
    const Potential q = build_potential(c.potential, data, c.estimator_config);
    result = {{"method", "partition"}, {"estimate", qcmi_partition(data, q, c.bins)}, {"units", "nats"}};
  } else {
    throw std::invalid_argument("unknown estimator '" + c.estimator + "' (qcmi, cmi, entropy, partition)");
  }
  result["samples"] = data.size();
  json report = envelope(c, seconds_since(start));
  report["result"] = result;
  write_output(path, [&](std::ostream& out) {
    if (c.format == OutputFormat::Json) {
      out << report.dump(2) << '\n';
      return;
    }
    out << "method,estimate,samples,k,norm,duration_seconds\n"
        << result["method"].get<std::string>() << ',' << format_double(result["estimate"].get<double>()) << ','
        << data.size() << ',' << c.estimator_config.k << ',' << to_string(c.estimator_config.norm) << ','
        << report["duration_seconds"].get<double>() << '\n';
  });
}

void run_gen(const RunConfig& c, const std::string& path) {
  const GeneratorSpec& g = c.generator;
  if (g.name == "linear-decay") {
    const TimeSeries series = gen_linear_decay(g.steps, g.sigma_or(0.1), c.seed, g.runs);
    write_output(path, [&](std::ostream& out) { write_timeseries_csv(out, series); });
    if (path != "-") {
      write_output(path + ".adjacency.csv", [&](std::ostream& out) { write_adjacency_csv(out, series.adjacency); });
    }
    return;
  }
  Dataset data;
  if (g.name == "mod1") data = gen_mod1(g.samples, g.degree, g.noise_width, c.seed);
  else if (g.name == "beta-gaussian") data = gen_beta_gaussian(g.samples, g.alpha, g.beta, g.sigma_or(0.3), c.seed);
  else throw std::invalid_argument("unknown generator '" + g.name + "' (mod1, beta-gaussian, linear-decay)");
  if (g.zeros > 0) data = inflate_zeros(data, g.zeros);
  write_output(path, [&](std::ostream& out) { write_dataset_csv(out, data); });
}

void run_infer(const RunConfig& c, const std::string& path) {
  const auto start = Clock::now();
  if (c.input.empty()) throw std::invalid_argument("infer needs --input");
  std::ifstream in(c.input);
  if (!in) throw std::runtime_error("cannot open '" + c.input + "'");
  TimeSeries series = read_timeseries_csv(in);
  if (!c.truth.empty()) {
    std::ifstream truth(c.truth);
    if (!truth) throw std::runtime_error("cannot open '" + c.truth + "'");
    series.adjacency = read_adjacency_csv(truth, series.variables());
  }
  const ScoreMatrix scores = directed_scores(series, edge_method_from_string(c.method), c.estimator_config);
  std::optional<double> area;
  if (scores.has_truth()) area = auc(scores);

  json report = envelope(c, seconds_since(start));
  json rows = json::array();
  for (Eigen::Index i = 0; i < scores.scores.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < scores.scores.cols(); ++j) {
      const double s = scores.scores(i, j);
      row.push_back(std::isnan(s) ? json(nullptr) : json(s));
    }
    rows.push_back(row);
  }
  report["result"] = {{"method", c.method},
                      {"scores", rows},
                      {"auc", area ? json(*area) : json(nullptr)},
                      {"failures", scores.failures}};
  write_output(path, [&](std::ostream& out) {
    if (c.format == OutputFormat::Json) out << report.dump(2) << '\n';
    else write_scores_csv(out, scores);
  });
}

}  // namespace

int run(const RunConfig& c, std::ostream& log) {
  std::string path;
  try {
    path = resolve_output(c);
    switch (c.command) {
      case Command::Estimate: run_estimate(c, path); break;
      case Command::Gen: run_gen(c, path); break;
      case Command::Infer: run_infer(c, path); break;
      case Command::Experiment: {
        const auto start = Clock::now();
        write_output(path, [&](std::ostream& out) { run_experiment(c, out, log); });
        if (path != "-") {
          write_output(path + ".json", [&](std::ostream& out) { out << envelope(c, seconds_since(start)).dump(2) << '\n'; });
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    log << json{{"error", e.what()}, {"command", to_json(c)["command"]}}.dump() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qcmi::cli
