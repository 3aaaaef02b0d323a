#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qcmi/dataset.hpp"
#include "qcmi/geometry.hpp"
#include "qcmi/potentials.hpp"

namespace qcmi {

/// Whose weight enters the conditioning-set count n_z.
enum class ZCountWeights {
  Neighbor,  ///< sum of w_j over the neighbors j (same as n_yz)
  Center,    ///< w_i times the unweighted neighbor count
};

/// Digamma argument for samples whose k-th neighbor distance is 0. TiedCount
/// also switches a sample to non-strict counts when a strict one comes out 0
/// at positive radius.
enum class TiePolicy {
  TiedCount,  ///< number of samples coinciding with i in the joint space
  FixedK,     ///< always k
};

struct EstimatorConfig {
  int k = 5;
  Norm norm = Norm::Max;
  /// Subspace counts use `<` when true and `<=` when false.
  bool strict = true;
  std::optional<double> bandwidth;
  /// Warn when max(w) / min positive w exceeds this.
  double weight_spread_threshold = 1e4;
  ZCountWeights z_weights = ZCountWeights::Neighbor;
  TiePolicy ties = TiePolicy::TiedCount;
  /// Divide potential-derived weights by their mean before estimating.
  bool self_normalize = false;

  void validate() const;
  /// Advisory messages; currently the k rule k > max{dz/(dx+dy), (dx+dy)/dz, (dx+dz)/dy}.
  std::vector<std::string> warnings(int dx, int dy, int dz) const;
};

/// Weighted counts that are positive but below this are raised to it.
inline constexpr double kCountFloor = 1e-12;

struct WeightStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double min_positive = 0.0;
  std::size_t zeros = 0;
};

struct WeightVector {
  Vector values;
  double bandwidth = 0.0;
  WeightStats stats;
  std::vector<std::string> warnings;
};

WeightStats weight_stats(const Eigen::Ref<const Vector>& w);

struct EstimateReport {
  std::string method;
  double estimate = 0.0;
  /// Per-sample I_i, in the caller's row order.
  Vector terms;
  std::optional<WeightStats> weights;
  std::optional<double> bandwidth;
  EstimatorConfig config;
  /// Entropy-decomposition route and |estimate - decomposition|; absent when
  /// some sample has zero k-th neighbor distance (log 0 in the decomposition).
  std::optional<double> decomposition;
  std::optional<double> residual;
  std::size_t floored_counts = 0;
  std::size_t tied_samples = 0;
  std::vector<std::string> warnings;
};

/// Kozachenko-Leonenko differential entropy in nats.
double entropy_kl(const Eigen::Ref<const Matrix>& points, int k, Norm norm = Norm::Max);

/// Coupled k-NN estimate of I(X;Y|Z) in nats.
EstimateReport cmi_knn(const Dataset& data, const EstimatorConfig& cfg = {});

/// w_i = q(x_i, z_i) / fhat_XZ(x_i, z_i), Gaussian KDE with the configured or rule bandwidth.
WeightVector importance_weights(const Dataset& data, const Potential& q, const EstimatorConfig& cfg = {});

/// Potential CMI under q.
EstimateReport qcmi_knn(const Dataset& data, const Potential& q, const EstimatorConfig& cfg = {});

/// Potential CMI with externally supplied weights (caller row order).
EstimateReport qcmi_knn(const Dataset& data, const Eigen::Ref<const Vector>& weights, const EstimatorConfig& cfg = {});

/// The same estimate assembled from four weighted entropy terms
/// h(X,Z) + h(Y,Z) - h(X,Y,Z) - h(Z) minus the (sum w / N)(log(N-1) - psi(N))
/// correction, with the additive constant placed as qcmi_knn places it.
double qcmi_decomposed(const Dataset& data, const Eigen::Ref<const Vector>& weights, const EstimatorConfig& cfg = {});

/// Plug-in potential CMI on an equal-width histogram with `bins` cells per
/// coordinate (default floor((N/100)^(1/D)), D the total dimension).
double qcmi_partition(const Dataset& data, const Potential& q, std::optional<int> bins = std::nullopt);

}  // namespace qcmi
