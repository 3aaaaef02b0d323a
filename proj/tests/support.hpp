#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qcmi/dataset.hpp"
#include "qcmi/geometry.hpp"
#include "qcmi/random.hpp"

namespace qcmi::test {

inline Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = 0.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  return m;
}

inline Matrix normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

// Values on a 1/256 lattice, so sums with small integers stay exact.
inline Matrix dyadic_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = std::floor(rng.uniform() * 4096.0) / 256.0;
  return m;
}

inline Dataset random_dataset(std::uint64_t seed, Eigen::Index n, int dx = 1, int dy = 1, int dz = 1) {
  Rng rng(seed);
  Matrix x = uniform_matrix(rng, n, dx);
  Matrix z = uniform_matrix(rng, n, dz);
  Matrix y(n, dy);
  for (Eigen::Index r = 0; r < n; ++r)
    for (int c = 0; c < dy; ++c) y(r, c) = x(r, 0) + z(r, 0) + 0.3 * rng.normal();
  return Dataset(std::move(x), std::move(y), std::move(z));
}

// Linear-scan oracles.
inline double brute_kth(const Matrix& p, Eigen::Index i, int k, Norm norm) {
  std::vector<double> d;
  for (Eigen::Index j = 0; j < p.rows(); ++j)
    if (j != i) d.push_back(distance(p.row(i), p.row(j), norm));
  std::sort(d.begin(), d.end());
  return d[static_cast<std::size_t>(k - 1)];
}

inline double brute_count(const Matrix& p, Eigen::Index i, double radius, const std::vector<double>* w, bool strict,
                          Norm norm) {
  double acc = 0.0;
  const bool fallback = strict && radius == 0.0;
  for (Eigen::Index j = 0; j < p.rows(); ++j) {
    if (j == i) continue;
    const double d = distance(p.row(i), p.row(j), norm);
    const bool hit = fallback ? d == 0.0 : (strict ? d < radius : d <= radius);
    if (hit) acc += w ? (*w)[static_cast<std::size_t>(j)] : 1.0;
  }
  return acc;
}

}  // namespace qcmi::test
