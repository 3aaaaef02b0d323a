#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qcmi/dataset.hpp"
#include "qcmi/geometry.hpp"

namespace qcmi {

/// Exact neighbor queries over a fixed point cloud (one point per row).
///
/// Backed by a bucketed kd-tree. Every query gives the same answer as a
/// linear scan: pruning only uses bounding-box bounds that are monotone in
/// the coordinates, and weighted sums are accumulated in ascending sample
/// index. The query point itself is never its own neighbor; coincident copies
/// of it are.
class PointIndex {
 public:
  PointIndex(const Eigen::Ref<const Matrix>& points, Norm norm);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  Norm norm() const { return norm_; }

  double distance(std::size_t i, std::size_t j) const;

  /// Distance from sample i to its k-th nearest other sample.
  double kth_distance(std::size_t i, int k) const;

  /// Number of other samples within `radius` of sample i (`<` when strict,
  /// `<=` otherwise). A strict query at radius 0 counts the samples that
  /// coincide with i instead of returning 0.
  std::size_t count_within(std::size_t i, double radius, bool strict = true) const;

  /// As count_within, summing `weights[j]` over the matched samples j in
  /// ascending j.
  double weighted_count_within(std::size_t i, double radius, std::span<const double> weights,
                               bool strict = true) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int left = -1;
    int right = -1;
    bool leaf() const { return left < 0; }
  };

  int build(std::size_t begin, std::size_t end);
  double min_dist(int node, std::size_t i) const;
  double max_dist(int node, std::size_t i) const;
  bool contains(int node, std::size_t i) const;

  RowMatrix points_;
  Norm norm_;
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> slot_;  // slot_[perm_[s]] == s
  std::vector<Node> nodes_;
  std::vector<double> boxes_;  // per node: lo[0..d), hi[0..d)
};

}  // namespace qcmi
