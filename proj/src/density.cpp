#include "qcmi/density.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qcmi {

double bandwidth_rule(std::size_t n, int dx, int dz) {
  if (n < 2) throw std::invalid_argument("bandwidth_rule: need at least 2 samples");
  if (dx < 1 || dz < 1) throw std::invalid_argument("bandwidth_rule: dimensions must be >= 1");
  return 0.5 * std::pow(static_cast<double>(n), -1.0 / (2.0 * dx + 2.0 * dz + 3.0));
}

KdeModel::KdeModel(const Eigen::Ref<const Matrix>& samples, double bandwidth) : bandwidth_(bandwidth) {
  if (samples.rows() < 1 || samples.cols() < 1) throw std::invalid_argument("KdeModel: empty sample");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("KdeModel: bandwidth must be a positive finite number");
  if (!samples.allFinite()) throw std::invalid_argument("KdeModel: samples must be finite");
  const auto order = canonical_order(samples);
  samples_.resize(samples.cols(), samples.rows());
  slot_of_row_.resize(order.size());
  for (std::size_t s = 0; s < order.size(); ++s) {
    samples_.col(static_cast<Eigen::Index>(s)) = samples.row(static_cast<Eigen::Index>(order[s])).transpose();
    slot_of_row_[order[s]] = s;
  }
  const double d = static_cast<double>(samples.cols());
  log_norm_ = -0.5 * d * std::log(2.0 * std::numbers::pi) - d * std::log(bandwidth_);
}

double KdeModel::density(const Eigen::Ref<const Vector>& query, std::optional<std::size_t> leave_out) const {
  if (query.size() != samples_.rows()) throw std::invalid_argument("KdeModel: query dimension mismatch");
  if (leave_out && *leave_out >= size()) throw std::out_of_range("KdeModel: leave_out index out of range");
  const std::size_t m = size() - (leave_out ? 1 : 0);
  if (m == 0) throw std::invalid_argument("KdeModel: no samples left after leave-out");

  const double inv_h = 1.0 / bandwidth_;
  Eigen::ArrayXd kernel = (((samples_.colwise() - query).array() * inv_h).square().colwise().sum() * -0.5).exp().transpose();
  if (leave_out) kernel(static_cast<Eigen::Index>(slot_of_row_[*leave_out])) = 0.0;
  const double sum = kernel.sum();
  const double value = sum * std::exp(log_norm_) / static_cast<double>(m);
  if (!(value > 0.0))
    throw std::range_error("KdeModel: density underflowed to 0 (query far from every sample)");
  return value;
}

}  // namespace qcmi
