#include <stdexcept>

#include "qcmi/cli.hpp"

namespace qcmi::cli {

using nlohmann::json;

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::Estimate: return "estimate";
    case Command::Gen: return "gen";
    case Command::Experiment: return "experiment";
    case Command::Infer: return "infer";
  }
  return "?";
}

Command command_from(const std::string& name) {
  if (name == "estimate") return Command::Estimate;
  if (name == "gen") return Command::Gen;
  if (name == "experiment") return Command::Experiment;
  if (name == "infer") return Command::Infer;
  throw std::invalid_argument("unknown command '" + name + "'");
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
  j[key] = value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

json to_json(const EstimatorConfig& c) {
  json j;
  j["k"] = c.k;
  j["norm"] = std::string(to_string(c.norm));
  j["strict"] = c.strict;
  put_optional(j, "bandwidth", c.bandwidth);
  j["weight_spread_threshold"] = c.weight_spread_threshold;
  j["z_weights"] = c.z_weights == ZCountWeights::Neighbor ? "neighbor" : "center";
  j["ties"] = c.ties == TiePolicy::TiedCount ? "tied-count" : "fixed-k";
  j["self_normalize"] = c.self_normalize;
  return j;
}

EstimatorConfig estimator_config_from_json(const json& j) {
  EstimatorConfig c;
  c.k = j.value("k", c.k);
  c.norm = norm_from_string(j.value("norm", std::string("max")));
  c.strict = j.value("strict", c.strict);
  c.bandwidth = get_optional<double>(j, "bandwidth");
  c.weight_spread_threshold = j.value("weight_spread_threshold", c.weight_spread_threshold);
  const auto zw = j.value("z_weights", std::string("neighbor"));
  if (zw != "neighbor" && zw != "center") throw std::invalid_argument("z_weights must be neighbor or center");
  c.z_weights = zw == "neighbor" ? ZCountWeights::Neighbor : ZCountWeights::Center;
  const auto ties = j.value("ties", std::string("tied-count"));
  if (ties != "tied-count" && ties != "fixed-k") throw std::invalid_argument("ties must be tied-count or fixed-k");
  c.ties = ties == "tied-count" ? TiePolicy::TiedCount : TiePolicy::FixedK;
  c.self_normalize = j.value("self_normalize", c.self_normalize);
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = command_name(c.command);
  j["input"] = c.input;
  j["truth"] = c.truth;
  j["estimator"] = c.estimator;
  j["method"] = c.method;
  j["preset"] = c.preset;
  j["grid"] = c.grid;
  j["generator"] = {{"name", c.generator.name},       {"samples", c.generator.samples},
                    {"degree", c.generator.degree},   {"noise_width", c.generator.noise_width},
                    {"alpha", c.generator.alpha},     {"beta", c.generator.beta},
                    {"zeros", c.generator.zeros},
                    {"steps", c.generator.steps},     {"runs", c.generator.runs}};
  put_optional(j["generator"], "sigma", c.generator.sigma);
  j["estimator_config"] = to_json(c.estimator_config);
  json p;
  p["kind"] = std::string(to_string(c.potential.kind));
  put_optional(p, "bounds", c.potential.bounds);
  put_optional(p, "mean", c.potential.mean);
  put_optional(p, "stddev", c.potential.stddev);
  put_optional(p, "grid_path", c.potential.grid_path);
  j["potential"] = p;
  put_optional(j, "bins", c.bins);
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["output"] = c.output;
  j["format"] = c.format == OutputFormat::Json ? "json" : "csv";
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  c.command = command_from(j.at("command").get<std::string>());
  c.input = j.value("input", std::string());
  c.truth = j.value("truth", std::string());
  c.estimator = j.value("estimator", c.estimator);
  c.method = j.value("method", c.method);
  c.preset = j.value("preset", std::string());
  c.grid = j.value("grid", std::vector<double>{});
  if (j.contains("generator")) {
    const json& g = j.at("generator");
    c.generator.name = g.value("name", c.generator.name);
    c.generator.samples = g.value("samples", c.generator.samples);
    c.generator.degree = g.value("degree", c.generator.degree);
    c.generator.noise_width = g.value("noise_width", c.generator.noise_width);
    c.generator.alpha = g.value("alpha", c.generator.alpha);
    c.generator.beta = g.value("beta", c.generator.beta);
    c.generator.sigma = get_optional<double>(g, "sigma");
    c.generator.zeros = g.value("zeros", c.generator.zeros);
    c.generator.steps = g.value("steps", c.generator.steps);
    c.generator.runs = g.value("runs", c.generator.runs);
  }
  if (j.contains("estimator_config")) c.estimator_config = estimator_config_from_json(j.at("estimator_config"));
  if (j.contains("potential")) {
    const json& p = j.at("potential");
    c.potential.kind = potential_kind_from_string(p.value("kind", std::string("uniform")));
    c.potential.bounds = get_optional<std::vector<double>>(p, "bounds");
    c.potential.mean = get_optional<std::vector<double>>(p, "mean");
    c.potential.stddev = get_optional<std::vector<double>>(p, "stddev");
    c.potential.grid_path = get_optional<std::string>(p, "grid_path");
  }
  c.bins = get_optional<int>(j, "bins");
  c.seed = j.value("seed", c.seed);
  c.seeds = j.value("seeds", std::vector<std::uint64_t>{});
  c.output = j.value("output", std::string());
  const auto format = j.value("format", std::string("json"));
  if (format != "json" && format != "csv") throw std::invalid_argument("format must be csv or json");
  c.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  return c;
}

json to_json(const EstimateReport& r) {
  json j;
  j["method"] = r.method;
  j["estimate"] = r.estimate;
  j["units"] = "nats";
  j["config"] = to_json(r.config);
  put_optional(j, "bandwidth", r.bandwidth);
  if (r.weights) {
    j["weights"] = {{"min", r.weights->min},
                    {"mean", r.weights->mean},
                    {"max", r.weights->max},
                    {"min_positive", r.weights->min_positive},
                    {"zeros", r.weights->zeros}};
  } else {
    j["weights"] = nullptr;
  }
  put_optional(j, "decomposition", r.decomposition);
  put_optional(j, "residual", r.residual);
  j["floored_counts"] = r.floored_counts;
  j["tied_samples"] = r.tied_samples;
  j["warnings"] = r.warnings;
  j["terms"] = std::vector<double>(r.terms.data(), r.terms.data() + r.terms.size());
  return j;
}

Potential build_potential(const PotentialSpec& spec, const Dataset& data, const EstimatorConfig& cfg) {
  PotentialParams params;
  const auto d = static_cast<std::size_t>(data.dx() + data.dz());
  if (spec.bounds) {
    if (spec.bounds->size() != 2 * d)
      throw std::invalid_argument("--bounds needs lo,hi pairs for each of the " + std::to_string(d) + " (X,Z) dimensions");
    Box box{Vector(static_cast<Eigen::Index>(d)), Vector(static_cast<Eigen::Index>(d))};
    for (std::size_t c = 0; c < d; ++c) {
      box.lo(static_cast<Eigen::Index>(c)) = (*spec.bounds)[2 * c];
      box.hi(static_cast<Eigen::Index>(c)) = (*spec.bounds)[2 * c + 1];
    }
    params.bounds = box;
  }
  const auto to_vector = [d](const std::vector<double>& v, const char* what) {
    if (v.size() == 1) return Vector::Constant(static_cast<Eigen::Index>(d), v.front()).eval();
    if (v.size() != d) throw std::invalid_argument(std::string(what) + " needs 1 or " + std::to_string(d) + " values");
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  if (spec.mean) params.mean = to_vector(*spec.mean, "--mean");
  if (spec.stddev) params.stddev = to_vector(*spec.stddev, "--stddev");
  params.bandwidth = cfg.bandwidth;
  if (spec.kind == PotentialKind::CustomGrid) {
    if (!spec.grid_path) throw std::invalid_argument("custom-grid potential needs --grid-file");
    params.grid = read_density_grid(*spec.grid_path);
  }
  return make_potential(spec.kind, data, params);
}

}  // namespace qcmi::cli
