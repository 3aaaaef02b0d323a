#include "qcmi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qcmi/density.hpp"
#include "qcmi/error.hpp"
#include "qcmi/neighbors.hpp"

namespace qcmi {

void EstimatorConfig::validate() const {
  if (k < 1) throw std::invalid_argument("estimator config: k must be >= 1");
  if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth)))
    throw std::invalid_argument("estimator config: bandwidth must be positive and finite");
  if (!(weight_spread_threshold > 0.0)) throw std::invalid_argument("estimator config: weight spread threshold must be positive");
}

std::vector<std::string> EstimatorConfig::warnings(int dx, int dy, int dz) const {
  std::vector<std::string> out;
  const double bound = std::max({static_cast<double>(dz) / (dx + dy), static_cast<double>(dx + dy) / dz,
                                 static_cast<double>(dx + dz) / dy});
  if (!(k > bound)) {
    std::ostringstream msg;
    msg << "k=" << k << " does not exceed " << bound << "; the consistency guarantee asks for a larger k";
    out.push_back(msg.str());
  }
  return out;
}

WeightStats weight_stats(const Eigen::Ref<const Vector>& w) {
  WeightStats s;
  if (w.size() == 0) return s;
  s.min = w.minCoeff();
  s.max = w.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    sum += w(i);
    if (w(i) == 0.0) ++s.zeros;
    else if (s.min_positive == 0.0 || w(i) < s.min_positive) s.min_positive = w(i);
  }
  s.mean = sum / static_cast<double>(w.size());
  return s;
}

namespace {

// Per-sample quantities of the coupled estimator, in canonical order.
struct Coupled {
  std::vector<double> rho;
  std::vector<double> psi_k;
  std::vector<double> n_xz;
  std::vector<double> n_yz;
  std::vector<double> n_z;
  std::vector<double> terms;
  std::vector<char> skipped;
  std::size_t floored = 0;
  std::size_t tied = 0;
};

void check_inputs(const Dataset& data, const EstimatorConfig& cfg) {
  data.validate();
  cfg.validate();
  if (data.size() < static_cast<std::size_t>(cfg.k) + 1)
    throw std::invalid_argument("estimator: need N >= k + 1 samples (N=" + std::to_string(data.size()) +
                                ", k=" + std::to_string(cfg.k) + ")");
}

// `weights` empty means the unweighted estimator. `order[c]` is the caller
// row of canonical sample c, for error messages.
Coupled coupled_terms(const Dataset& canon, std::span<const double> weights, const EstimatorConfig& cfg,
                      const std::vector<std::size_t>& order) {
  const std::size_t n = canon.size();
  const bool weighted = !weights.empty();
  const PointIndex joint(canon.xyz(), cfg.norm);
  const PointIndex xz(canon.xz(), cfg.norm);
  const PointIndex yz(canon.yz(), cfg.norm);
  const PointIndex z(canon.z, cfg.norm);

  Coupled out;
  out.rho.resize(n);
  out.psi_k.resize(n);
  out.n_xz.resize(n);
  out.n_yz.resize(n);
  out.n_z.resize(n);
  out.terms.assign(n, 0.0);
  out.skipped.assign(n, 0);
  const double psi_k = digamma(static_cast<double>(cfg.k));

  const auto floor_count = [&](double count, std::size_t i, const char* what) {
    if (!(count > 0.0)) throw EstimationError(std::string("zero ") + what + " neighbor count", order[i]);
    if (count < kCountFloor) {
      ++out.floored;
      return kCountFloor;
    }
    return count;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (weighted && weights[i] == 0.0) {
      out.skipped[i] = 1;
      continue;
    }
    const double rho = joint.kth_distance(i, cfg.k);
    out.rho[i] = rho;
    out.psi_k[i] = psi_k;
    if (rho == 0.0) {
      ++out.tied;
      if (cfg.ties == TiePolicy::TiedCount)
        out.psi_k[i] = digamma(static_cast<double>(joint.count_within(i, 0.0, true)));
    }
    // Every joint neighbor sitting exactly at rho in some subspace leaves a
    // strict count of 0; count those points for this sample instead.
    bool strict = cfg.strict;
    if (strict && rho > 0.0 && cfg.ties == TiePolicy::TiedCount &&
        (xz.count_within(i, rho, true) == 0 || yz.count_within(i, rho, true) == 0 || z.count_within(i, rho, true) == 0)) {
      strict = false;
      ++out.tied;
    }
    out.n_xz[i] = static_cast<double>(xz.count_within(i, rho, strict));
    if (out.n_xz[i] == 0.0) throw EstimationError("zero (X,Z) neighbor count", order[i]);
    if (weighted) {
      out.n_yz[i] = floor_count(yz.weighted_count_within(i, rho, weights, strict), i, "(Y,Z)");
      const double nz = cfg.z_weights == ZCountWeights::Neighbor
                            ? z.weighted_count_within(i, rho, weights, strict)
                            : weights[i] * static_cast<double>(z.count_within(i, rho, strict));
      out.n_z[i] = floor_count(nz, i, "Z");
    } else {
      out.n_yz[i] = floor_count(static_cast<double>(yz.count_within(i, rho, strict)), i, "(Y,Z)");
      out.n_z[i] = floor_count(static_cast<double>(z.count_within(i, rho, strict)), i, "Z");
    }
    out.terms[i] = out.psi_k[i] - std::log(out.n_xz[i]) - std::log(out.n_yz[i]) + std::log(out.n_z[i]);
  }
  return out;
}

Vector to_caller_order(const std::vector<double>& canonical, const std::vector<std::size_t>& order) {
  Vector out(static_cast<Eigen::Index>(canonical.size()));
  for (std::size_t c = 0; c < order.size(); ++c) out(static_cast<Eigen::Index>(order[c])) = canonical[c];
  return out;
}

double decomposition_from(const Coupled& cp, std::span<const double> w, int dx, int dy, int dz, Norm norm) {
  const std::size_t n = cp.rho.size();
  const double nd = static_cast<double>(n);
  const double log_n1 = std::log(nd - 1.0);
  const double psi_n = digamma(nd);
  const double c_xyz = log_unit_ball_volume(dx + dy + dz, norm);
  const double c_xz = log_unit_ball_volume(dx + dz, norm);
  const double c_yz = log_unit_ball_volume(dy + dz, norm);
  const double c_z = log_unit_ball_volume(dz, norm);
  double h_xyz = 0.0, h_xz = 0.0, h_yz = 0.0, h_z = 0.0, w_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w_sum += w[i];
    if (cp.skipped[i]) continue;
    const double log_rho = std::log(cp.rho[i]);
    h_xyz += w[i] * (-cp.psi_k[i] + psi_n + c_xyz + (dx + dy + dz) * log_rho);
    h_xz += w[i] * (-std::log(cp.n_xz[i]) + log_n1 + c_xz + (dx + dz) * log_rho);
    h_yz += w[i] * (-std::log(cp.n_yz[i]) + log_n1 + c_yz + (dy + dz) * log_rho);
    h_z += w[i] * (-std::log(cp.n_z[i]) + log_n1 + c_z + dz * log_rho);
  }
  const double mean_w = w_sum / nd;
  const double c = cmi_constant(dx, dy, dz, norm);
  return (h_yz + h_xz - h_xyz - h_z) / nd - mean_w * (log_n1 - psi_n) + c * (1.0 - mean_w);
}

std::vector<double> permuted(const Eigen::Ref<const Vector>& v, const std::vector<std::size_t>& order) {
  std::vector<double> out(order.size());
  for (std::size_t c = 0; c < order.size(); ++c) out[c] = v(static_cast<Eigen::Index>(order[c]));
  return out;
}

void check_weights(const Eigen::Ref<const Vector>& weights, std::size_t n) {
  if (static_cast<std::size_t>(weights.size()) != n) throw std::invalid_argument("weights: expected one weight per sample");
  if (!weights.allFinite() || (weights.array() < 0.0).any())
    throw std::invalid_argument("weights must be finite and non-negative");
}

}  // namespace

double entropy_kl(const Eigen::Ref<const Matrix>& points, int k, Norm norm) {
  if (k < 1) throw std::invalid_argument("entropy_kl: k must be >= 1");
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < static_cast<std::size_t>(k) + 1) throw std::invalid_argument("entropy_kl: need N >= k + 1 samples");
  if (points.cols() < 1 || !points.allFinite()) throw std::invalid_argument("entropy_kl: points must be finite with d >= 1");
  const auto order = canonical_order(points);
  const PointIndex index(permute_rows(points, order), norm);
  const int d = static_cast<int>(points.cols());
  double sum_log_rho = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = index.kth_distance(i, k);
    if (rho == 0.0) throw EstimationError("entropy_kl: zero k-th neighbor distance (duplicate points)", order[i]);
    sum_log_rho += std::log(rho);
  }
  const double nd = static_cast<double>(n);
  // mean of log(N rho^d c_d / k), plus log k - psi(k)
  return d * (sum_log_rho / nd) + std::log(nd) + log_unit_ball_volume(d, norm) - digamma(static_cast<double>(k));
}

EstimateReport cmi_knn(const Dataset& data, const EstimatorConfig& cfg) {
  check_inputs(data, cfg);
  const auto order = canonical_order(data.xyz());
  const Dataset canon = permute_rows(data, order);
  const Coupled cp = coupled_terms(canon, {}, cfg, order);

  EstimateReport report;
  report.method = "cmi";
  report.config = cfg;
  report.warnings = cfg.warnings(data.dx(), data.dy(), data.dz());
  double sum = 0.0;
  for (const double t : cp.terms) sum += 1.0 * t;
  report.estimate = sum / static_cast<double>(data.size()) + cmi_constant(data.dx(), data.dy(), data.dz(), cfg.norm);
  report.terms = to_caller_order(cp.terms, order);
  report.floored_counts = cp.floored;
  report.tied_samples = cp.tied;
  if (cp.tied == 0) {
    const std::vector<double> ones(data.size(), 1.0);
    report.decomposition = decomposition_from(cp, ones, data.dx(), data.dy(), data.dz(), cfg.norm);
    report.residual = std::abs(report.estimate - *report.decomposition);
  }
  return report;
}

WeightVector importance_weights(const Dataset& data, const Potential& q, const EstimatorConfig& cfg) {
  data.validate();
  cfg.validate();
  if (data.size() < 2) throw std::invalid_argument("importance_weights: need at least 2 samples");
  if (q.dx() != data.dx() || q.dz() != data.dz())
    throw std::invalid_argument("importance_weights: potential dimensions do not match the dataset");

  WeightVector out;
  out.bandwidth = cfg.bandwidth.value_or(bandwidth_rule(data.size(), data.dx(), data.dz()));
  const Matrix xz = data.xz();
  const KdeModel fhat(xz, out.bandwidth);
  out.values.resize(xz.rows());
  for (Eigen::Index i = 0; i < xz.rows(); ++i) {
    const Vector point = xz.row(i).transpose();
    const double qv = q.density(point);
    double fv = 0.0;
    try {
      fv = fhat.density(point);
    } catch (const std::range_error& e) {
      throw EstimationError(e.what(), static_cast<std::size_t>(i));
    }
    out.values(i) = qv / fv;
  }
  out.stats = weight_stats(out.values);
  if (out.stats.min_positive > 0.0 && out.stats.max / out.stats.min_positive > cfg.weight_spread_threshold) {
    std::ostringstream msg;
    msg << "importance weights spread " << out.stats.max / out.stats.min_positive << " exceeds threshold "
        << cfg.weight_spread_threshold << "; the potential may not be dominated by the data density";
    out.warnings.push_back(msg.str());
  }
  if (q.kind() == PotentialKind::Gaussian)
    out.warnings.push_back("gaussian potential has unbounded support; the bounded density-ratio assumption fails for bounded data");
  return out;
}

EstimateReport qcmi_knn(const Dataset& data, const Eigen::Ref<const Vector>& weights, const EstimatorConfig& cfg) {
  check_inputs(data, cfg);
  check_weights(weights, data.size());
  const auto order = canonical_order(data.xyz());
  const Dataset canon = permute_rows(data, order);
  const std::vector<double> w = permuted(weights, order);
  const Coupled cp = coupled_terms(canon, w, cfg, order);

  EstimateReport report;
  report.method = "qcmi";
  report.config = cfg;
  report.warnings = cfg.warnings(data.dx(), data.dy(), data.dz());
  double sum = 0.0;
  for (std::size_t i = 0; i < cp.terms.size(); ++i) sum += w[i] * cp.terms[i];
  report.estimate = sum / static_cast<double>(data.size()) + cmi_constant(data.dx(), data.dy(), data.dz(), cfg.norm);
  report.terms = to_caller_order(cp.terms, order);
  report.weights = weight_stats(weights);
  report.floored_counts = cp.floored;
  report.tied_samples = cp.tied;
  if (cp.tied == 0) {
    report.decomposition = decomposition_from(cp, w, data.dx(), data.dy(), data.dz(), cfg.norm);
    report.residual = std::abs(report.estimate - *report.decomposition);
  }
  return report;
}

EstimateReport qcmi_knn(const Dataset& data, const Potential& q, const EstimatorConfig& cfg) {
  WeightVector w = importance_weights(data, q, cfg);
  if (cfg.self_normalize) {
    if (!(w.stats.mean > 0.0)) throw std::invalid_argument("qcmi_knn: all importance weights are zero");
    w.values /= w.stats.mean;
  }
  EstimateReport report = qcmi_knn(data, w.values, cfg);
  report.bandwidth = w.bandwidth;
  report.warnings.insert(report.warnings.end(), w.warnings.begin(), w.warnings.end());
  return report;
}

double qcmi_decomposed(const Dataset& data, const Eigen::Ref<const Vector>& weights, const EstimatorConfig& cfg) {
  check_inputs(data, cfg);
  check_weights(weights, data.size());
  const auto order = canonical_order(data.xyz());
  const Dataset canon = permute_rows(data, order);
  const std::vector<double> w = permuted(weights, order);
  const Coupled cp = coupled_terms(canon, w, cfg, order);
  for (std::size_t i = 0; i < cp.rho.size(); ++i) {
    if (!cp.skipped[i] && cp.rho[i] == 0.0)
      throw EstimationError("qcmi_decomposed: zero k-th neighbor distance, log rho undefined", order[i]);
  }
  return decomposition_from(cp, w, data.dx(), data.dy(), data.dz(), cfg.norm);
}

}  // namespace qcmi
