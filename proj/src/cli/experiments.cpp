#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "qcmi/cli.hpp"
#include "qcmi/netinfer.hpp"
#include "qcmi/synthgen.hpp"

namespace qcmi::cli {

namespace {

std::vector<std::uint64_t> seeds_or(const RunConfig& c, std::size_t count) {
  if (!c.seeds.empty()) return c.seeds;
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t s = 0; s < count; ++s) seeds[s] = c.seed + s;
  return seeds;
}

std::vector<double> grid_or(const RunConfig& c, std::vector<double> fallback) {
  return c.grid.empty() ? fallback : c.grid;
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v)) throw std::invalid_argument(std::string(what) + " grid values must be non-negative integers");
  return static_cast<std::size_t>(v);
}

// Differential entropy of Normal(0, sigma^2) wrapped onto [0, 1), by Simpson's rule.
double wrapped_normal_entropy(double sigma) {
  constexpr int kIntervals = 4000;
  const int reach = static_cast<int>(std::ceil(12.0 * sigma)) + 1;
  const auto density = [&](double y) {
    double f = 0.0;
    for (int k = -reach; k <= reach; ++k) {
      const double u = (y - k) / sigma;
      f += std::exp(-0.5 * u * u);
    }
    return f / (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  const double step = 1.0 / kIntervals;
  double acc = 0.0;
  for (int s = 0; s <= kIntervals; ++s) {
    const double f = density(s * step);
    const double g = f > 0.0 ? -f * std::log(f) : 0.0;
    acc += g * (s == 0 || s == kIntervals ? 1.0 : (s % 2 ? 4.0 : 2.0));
  }
  return acc * step / 3.0;
}

// NaN when the default bin rule leaves fewer than two bins per axis.
double partition_or_nan(const Dataset& data, const Potential& q, std::optional<int> bins) {
  const double dims = data.dx() + data.dy() + data.dz();
  if (!bins && std::floor(std::pow(static_cast<double>(data.size()) / 100.0, 1.0 / dims) + 1e-9) < 2.0)
    return std::numeric_limits<double>::quiet_NaN();
  return qcmi_partition(data, q, bins);
}

Potential unit_square(const Dataset& data) {
  return make_uniform_potential(data.dx(), data.dz(),
                                Box{Vector::Zero(data.dx() + data.dz()), Vector::Ones(data.dx() + data.dz())});
}

// Uniform potential on [0, 1]^2 unless the config overrides the potential.
Potential experiment_potential(const RunConfig& c, const Dataset& data) {
  if (c.potential.kind == PotentialKind::Uniform && !c.potential.bounds) return unit_square(data);
  return build_potential(c.potential, data, c.estimator_config);
}

void mod1_rows(const RunConfig& c, std::ostream& out, std::ostream& log, bool sweep_degree) {
  const auto seeds = seeds_or(c, sweep_degree ? 5 : 10);
  const double truth = std::log(1.0 / c.generator.noise_width);
  out << (sweep_degree ? "degree" : "samples") << ",seed,truth,qcmi_knn,cmi_knn,qcmi_partition\n" << std::flush;
  const std::vector<double> grid = sweep_degree
                                       ? grid_or(c, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10})
                                       : grid_or(c, {500, 1000, 2000, 4000, 8000, 16000});
  for (const double g : grid) {
    for (const auto seed : seeds) {
      const int degree = sweep_degree ? static_cast<int>(as_count(g, "degree")) : c.generator.degree;
      const std::size_t n = sweep_degree ? c.generator.samples : as_count(g, "samples");
      const Dataset data = gen_mod1(n, degree, c.generator.noise_width, seed);
      const Potential q = experiment_potential(c, data);
      const double qk = qcmi_knn(data, q, c.estimator_config).estimate;
      const double ck = cmi_knn(data, c.estimator_config).estimate;
      const double qp = partition_or_nan(data, q, c.bins);
      out << (sweep_degree ? degree : static_cast<long long>(n)) << ',' << seed << ',' << format_double(truth) << ','
          << format_double(qk) << ',' << format_double(ck) << ',' << format_double(qp) << '\n'
          << std::flush;
      log << "  " << (sweep_degree ? "degree " : "N ") << g << " seed " << seed << ": qcmi " << qk << '\n';
    }
  }
}

void beta_gaussian_rows(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto seeds = seeds_or(c, 5);
  out << "sigma,samples,seed,truth,qcmi_knn,cmi_knn,qcmi_partition\n" << std::flush;
  for (const double sigma : grid_or(c, {0.3, 1.0})) {
    // Under uniform (X, Z), Y | Z is uniform on the circle, so the truth is
    // minus the entropy of the wrapped noise.
    const double truth = -wrapped_normal_entropy(sigma);
    for (const auto seed : seeds) {
      const Dataset data = gen_beta_gaussian(c.generator.samples, c.generator.alpha, c.generator.beta, sigma, seed);
      const Potential q = experiment_potential(c, data);
      const double qk = qcmi_knn(data, q, c.estimator_config).estimate;
      const double ck = cmi_knn(data, c.estimator_config).estimate;
      const double qp = qcmi_partition(data, q, c.bins.value_or(25));
      out << format_double(sigma) << ',' << c.generator.samples << ',' << seed << ',' << format_double(truth) << ','
          << format_double(qk) << ',' << format_double(ck) << ',' << format_double(qp) << '\n'
          << std::flush;
      log << "  sigma " << sigma << " seed " << seed << ": qcmi " << qk << '\n';
    }
  }
}

void zero_inflation_rows(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto seeds = seeds_or(c, 5);
  out << "zeros,seed,truth,cmi_knn,qcmi_knn\n" << std::flush;
  const double truth = std::log(1.0 / c.generator.noise_width);
  for (const double g : grid_or(c, {0, 2000, 4000, 6000, 8000, 10000, 12000, 14000, 16000, 18000, 20000})) {
    const std::size_t zeros = as_count(g, "zeros");
    for (const auto seed : seeds) {
      const Dataset base = gen_mod1(c.generator.samples, c.generator.degree, c.generator.noise_width, seed);
      const Dataset data = inflate_zeros(base, zeros);
      const Potential q = experiment_potential(c, data);
      const double ck = cmi_knn(data, c.estimator_config).estimate;
      const double qk = qcmi_knn(data, q, c.estimator_config).estimate;
      out << zeros << ',' << seed << ',' << format_double(truth) << ',' << format_double(ck) << ',' << format_double(qk)
          << '\n'
          << std::flush;
      log << "  zeros " << zeros << " seed " << seed << ": cmi " << ck << " qcmi " << qk << '\n';
    }
  }
}

void linear_decay_rows(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto seeds = seeds_or(c, 20);
  out << "steps,runs,seed,auc_rdi,auc_urdi\n" << std::flush;
  for (const double g : grid_or(c, {250, 500, 1000, 2000})) {
    const std::size_t steps = as_count(g, "steps");
    for (const auto seed : seeds) {
      const TimeSeries series = gen_linear_decay(steps, c.generator.sigma_or(0.1), seed, c.generator.runs);
      const double rdi = auc(directed_scores(series, EdgeMethod::Rdi, c.estimator_config));
      const double urdi = auc(directed_scores(series, EdgeMethod::Urdi, c.estimator_config));
      out << steps << ',' << c.generator.runs << ',' << seed << ',' << format_double(rdi) << ',' << format_double(urdi)
          << '\n'
          << std::flush;
      log << "  steps " << steps << " seed " << seed << ": rdi " << rdi << " urdi " << urdi << '\n';
    }
  }
}

}  // namespace

const std::vector<std::string>& experiment_presets() {
  static const std::vector<std::string> presets{"mod1-sweep-n", "mod1-sweep-N", "beta-gaussian", "zero-inflation",
                                                "linear-decay-auc"};
  return presets;
}

void run_experiment(const RunConfig& c, std::ostream& out, std::ostream& log) {
  try {
    if (c.preset == "mod1-sweep-n") mod1_rows(c, out, log, true);
    else if (c.preset == "mod1-sweep-N") mod1_rows(c, out, log, false);
    else if (c.preset == "beta-gaussian") beta_gaussian_rows(c, out, log);
    else if (c.preset == "zero-inflation") zero_inflation_rows(c, out, log);
    else if (c.preset == "linear-decay-auc") linear_decay_rows(c, out, log);
    else throw std::invalid_argument("unknown experiment preset '" + c.preset + "'");
  } catch (const std::exception& e) {
    out << "# FAILED: " << e.what() << '\n' << std::flush;
    throw;
  }
}

}  // namespace qcmi::cli
