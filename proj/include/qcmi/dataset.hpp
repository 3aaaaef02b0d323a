#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qcmi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N joint samples of (X, Y, Z); row i of each block belongs to sample i.
struct Dataset {
  Matrix x;
  Matrix y;
  Matrix z;

  Dataset() = default;
  Dataset(Matrix x_block, Matrix y_block, Matrix z_block);

  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  int dx() const { return static_cast<int>(x.cols()); }
  int dy() const { return static_cast<int>(y.cols()); }
  int dz() const { return static_cast<int>(z.cols()); }

  /// Throws unless the blocks agree on N, have at least one column and are finite.
  void validate() const;

  /// Rows of [X Z], [Y Z], [X Y Z].
  Matrix xz() const;
  Matrix yz() const;
  Matrix xyz() const;
};

/// Permutation that sorts the rows of `points` lexicographically.
/// Ties keep their relative order; tied rows are identical so the order is
/// immaterial to any reduction.
std::vector<std::size_t> canonical_order(const Eigen::Ref<const Matrix>& points);

Matrix permute_rows(const Eigen::Ref<const Matrix>& m, const std::vector<std::size_t>& order);
Dataset permute_rows(const Dataset& data, const std::vector<std::size_t>& order);

/// CSV with header `x0..,y0..,z0..`; one row per sample.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace qcmi
