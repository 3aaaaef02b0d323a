#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qcmi/dataset.hpp"

namespace qcmi {

/// KDE bandwidth 0.5 * N^(-1 / (2 dx + 2 dz + 3)).
double bandwidth_rule(std::size_t n, int dx, int dz);

/// Gaussian product-kernel density estimate over a fixed sample.
///
/// Samples are stored in lexicographic order and every evaluation sums the
/// kernel contributions in that order, so two models built from the same
/// multiset of points agree bit for bit.
class KdeModel {
 public:
  KdeModel(const Eigen::Ref<const Matrix>& samples, double bandwidth);

  std::size_t size() const { return static_cast<std::size_t>(samples_.cols()); }
  int dim() const { return static_cast<int>(samples_.rows()); }
  double bandwidth() const { return bandwidth_; }

  /// Density at `query`. `leave_out` names a sample by its row in the matrix
  /// the model was built from and drops it from the sum (and from the
  /// normalizing count). Throws std::range_error when the sum underflows to 0.
  double density(const Eigen::Ref<const Vector>& query, std::optional<std::size_t> leave_out = std::nullopt) const;

 private:
  Matrix samples_;  // d x N, canonical column order
  std::vector<std::size_t> slot_of_row_;
  double bandwidth_;
  double log_norm_;  // -(d/2) log(2 pi) - d log h
};

}  // namespace qcmi
