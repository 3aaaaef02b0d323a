#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcmi/dataset.hpp"

namespace qcmi {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// T x n observations plus the generating graph. `adjacency(i, j)` is true
/// iff variable i drives variable j. `run_starts` lists the first row of each
/// independently initialized run; lagged pairs never straddle a run start.
struct TimeSeries {
  Matrix values;
  BoolMatrix adjacency;
  std::vector<std::size_t> run_starts{0};

  std::size_t steps() const { return static_cast<std::size_t>(values.rows()); }
  int variables() const { return static_cast<int>(values.cols()); }
  void validate() const;
};

/// X, Z ~ U(0,1)^degree, W ~ U(0, noise_width), Y = (X + Z + W) mod 1.
Dataset gen_mod1(std::size_t n, int degree, double noise_width, std::uint64_t seed);

/// X, Z ~ Beta(alpha, beta), W ~ Normal(0, sigma^2), Y = (X + Z + W) mod 1.
Dataset gen_beta_gaussian(std::size_t n, double alpha, double beta, double sigma, std::uint64_t seed);

/// Appends `count` all-zero samples.
Dataset inflate_zeros(const Dataset& data, std::size_t count);

/// The 6x6 sparsity template of the decaying linear system (row j lists the drivers of x_j).
BoolMatrix linear_decay_template();

/// 13 variables: x1..x6 follow x(t) = A x(t-1) with A drawn on the template
/// from U(0.75, 1.25) and divided by 5 * spectral radius; x7..x13 are
/// i.i.d. Normal(0, sigma^2) at every step. All start from U(0.5, 2).
/// `runs` independent initial states share one A and are concatenated.
TimeSeries gen_linear_decay(std::size_t steps, double sigma, std::uint64_t seed, std::size_t runs = 1);

/// `t, v0..v{n-1}` CSV. The adjacency goes to a separate `i,j` edge list.
void write_timeseries_csv(std::ostream& out, const TimeSeries& series);
void write_adjacency_csv(std::ostream& out, const BoolMatrix& adjacency);
/// Reads `t, v0..`; rows whose t does not exceed the previous row's t start a new run.
TimeSeries read_timeseries_csv(std::istream& in);
BoolMatrix read_adjacency_csv(std::istream& in, int variables);

}  // namespace qcmi
