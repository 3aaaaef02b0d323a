#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcmi/estimators.hpp"

namespace qcmi {

namespace {

struct Axis {
  double lo;
  double hi;
};

int bin_of(double v, const Axis& axis, int bins) {
  if (!(axis.hi > axis.lo)) return 0;
  const int b = static_cast<int>(std::floor((v - axis.lo) / (axis.hi - axis.lo) * bins));
  return std::clamp(b, 0, bins - 1);
}

double center_of(int b, const Axis& axis, int bins) {
  const double width = axis.hi > axis.lo ? (axis.hi - axis.lo) / bins : 1.0;
  return axis.lo + (b + 0.5) * width;
}

std::vector<Axis> empirical_axes(const Matrix& m) {
  std::vector<Axis> axes;
  for (Eigen::Index c = 0; c < m.cols(); ++c) axes.push_back({m.col(c).minCoeff(), m.col(c).maxCoeff()});
  return axes;
}

}  // namespace

double qcmi_partition(const Dataset& data, const Potential& q, std::optional<int> bins) {
  data.validate();
  if (data.size() == 0) throw std::invalid_argument("qcmi_partition: empty dataset");
  if (q.dx() != data.dx() || q.dz() != data.dz())
    throw std::invalid_argument("qcmi_partition: potential dimensions do not match the dataset");
  const int dims = data.dx() + data.dy() + data.dz();
  const int b = bins.value_or(static_cast<int>(
      std::floor(std::pow(static_cast<double>(data.size()) / 100.0, 1.0 / dims) + 1e-9)));
  if (b < 2) throw std::invalid_argument("qcmi_partition: need at least 2 bins per dimension (got " + std::to_string(b) + ")");

  const Matrix xz = data.xz();
  const int dxz = data.dx() + data.dz();
  const int dz = data.dz();

  // (X, Z) axes follow the potential's support when it has one.
  std::vector<Axis> xz_axes;
  std::optional<Box> support;
  if (const auto* u = std::get_if<Potential::Uniform>(&q.spec())) support = u->bounds;
  if (const auto* g = std::get_if<DensityGrid>(&q.spec())) support = g->bounds;
  if (support) {
    for (int c = 0; c < dxz; ++c) xz_axes.push_back({support->lo(c), support->hi(c)});
  } else {
    xz_axes = empirical_axes(xz);
  }
  const std::vector<Axis> y_axes = empirical_axes(data.y);

  const auto pow_b = [b](int e) {
    std::size_t v = 1;
    for (int i = 0; i < e; ++i) v *= static_cast<std::size_t>(b);
    return v;
  };
  const std::size_t z_cells = pow_b(dz);

  // xz cell -> (y cell -> count)
  std::map<std::size_t, std::map<std::size_t, double>> counts;
  std::map<std::size_t, double> totals;
  for (Eigen::Index i = 0; i < xz.rows(); ++i) {
    if (support) {
      const Vector p = xz.row(i).transpose();
      if ((p.array() < support->lo.array()).any() || (p.array() > support->hi.array()).any()) continue;
    }
    std::size_t cell = 0;
    for (int c = 0; c < dxz; ++c) cell = cell * static_cast<std::size_t>(b) + static_cast<std::size_t>(bin_of(xz(i, c), xz_axes[static_cast<std::size_t>(c)], b));
    std::size_t ycell = 0;
    for (int c = 0; c < data.dy(); ++c)
      ycell = ycell * static_cast<std::size_t>(b) + static_cast<std::size_t>(bin_of(data.y(i, c), y_axes[static_cast<std::size_t>(c)], b));
    counts[cell][ycell] += 1.0;
    totals[cell] += 1.0;
  }
  if (counts.empty()) throw std::invalid_argument("qcmi_partition: no samples inside the potential's support");

  // q mass per observed (X, Z) cell: midpoint rule, renormalized over the
  // observed cells (the conditional of Y is unknown elsewhere).
  std::map<std::size_t, double> q_mass;
  double q_total = 0.0;
  for (const auto& [cell, _] : counts) {
    Vector center(dxz);
    double volume = 1.0;
    std::size_t rest = cell;
    for (int c = dxz - 1; c >= 0; --c) {
      const int bc = static_cast<int>(rest % static_cast<std::size_t>(b));
      rest /= static_cast<std::size_t>(b);
      const Axis& axis = xz_axes[static_cast<std::size_t>(c)];
      center(c) = center_of(bc, axis, b);
      volume *= axis.hi > axis.lo ? (axis.hi - axis.lo) / b : 1.0;
    }
    const double m = q.density(center) * volume;
    q_mass[cell] = m;
    q_total += m;
  }
  if (!(q_total > 0.0)) throw std::invalid_argument("qcmi_partition: potential puts no mass on the observed cells");

  // Joint table P(xz, y) = Q(xz) * phat(y | xz) and the marginals P(z), P(y, z).
  std::map<std::size_t, double> p_z;
  std::map<std::pair<std::size_t, std::size_t>, double> p_yz;
  for (const auto& [cell, ys] : counts) {
    const double qm = q_mass[cell] / q_total;
    const std::size_t zc = cell % z_cells;
    p_z[zc] += qm;
    for (const auto& [yc, cnt] : ys) p_yz[{yc, zc}] += qm * cnt / totals[cell];
  }
  double cmi = 0.0;
  for (const auto& [cell, ys] : counts) {
    const double qm = q_mass[cell] / q_total;
    if (qm == 0.0) continue;
    const std::size_t zc = cell % z_cells;
    for (const auto& [yc, cnt] : ys) {
      const double p = qm * cnt / totals[cell];
      // log[ P(x,y,z) P(z) / (P(x,z) P(y,z)) ]
      cmi += p * std::log(p * p_z[zc] / (qm * p_yz[{yc, zc}]));
    }
  }
  return cmi;
}

}  // namespace qcmi
