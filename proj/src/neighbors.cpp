#include "qcmi/neighbors.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace qcmi {

namespace {

constexpr std::size_t kLeafSize = 16;

// Merges consecutive sorted runs of `buf` (delimited by `bounds`) in place.
void merge_runs(std::vector<std::size_t>& buf, std::vector<std::size_t>& bounds) {
  std::vector<std::size_t> tmp(buf.size());
  while (bounds.size() > 2) {
    std::vector<std::size_t> next{0};
    for (std::size_t r = 0; r + 1 < bounds.size(); r += 2) {
      const auto first = buf.begin() + static_cast<std::ptrdiff_t>(bounds[r]);
      const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(bounds[r + 1]);
      if (r + 2 < bounds.size()) {
        const auto last = buf.begin() + static_cast<std::ptrdiff_t>(bounds[r + 2]);
        std::merge(first, mid, mid, last, tmp.begin() + static_cast<std::ptrdiff_t>(bounds[r]));
        next.push_back(bounds[r + 2]);
      } else {
        std::copy(first, mid, tmp.begin() + static_cast<std::ptrdiff_t>(bounds[r]));
        next.push_back(bounds[r + 1]);
      }
    }
    buf.swap(tmp);
    bounds.swap(next);
  }
}

}  // namespace

PointIndex::PointIndex(const Eigen::Ref<const Matrix>& points, Norm norm) : points_(points), norm_(norm) {
  if (points_.cols() < 1) throw std::invalid_argument("PointIndex: points need at least one column");
  if (!points_.allFinite()) throw std::invalid_argument("PointIndex: points must be finite");
  perm_.resize(size());
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  if (!perm_.empty()) build(0, perm_.size());
  slot_.resize(size());
  for (std::size_t s = 0; s < perm_.size(); ++s) slot_[perm_[s]] = s;
}

int PointIndex::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  const auto d = static_cast<std::size_t>(dim());
  nodes_.push_back(Node{begin, end});
  boxes_.resize(boxes_.size() + 2 * d);
  double* lo = boxes_.data() + static_cast<std::size_t>(id) * 2 * d;
  double* hi = lo + d;
  for (std::size_t c = 0; c < d; ++c) {
    lo[c] = hi[c] = points_(static_cast<Eigen::Index>(perm_[begin]), static_cast<Eigen::Index>(c));
  }
  for (std::size_t s = begin + 1; s < end; ++s) {
    for (std::size_t c = 0; c < d; ++c) {
      const double v = points_(static_cast<Eigen::Index>(perm_[s]), static_cast<Eigen::Index>(c));
      lo[c] = std::min(lo[c], v);
      hi[c] = std::max(hi[c], v);
    }
  }
  std::size_t split = 0;
  double widest = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    if (hi[c] - lo[c] > widest) {
      widest = hi[c] - lo[c];
      split = c;
    }
  }
  if (end - begin <= kLeafSize || widest == 0.0) {
    std::sort(perm_.begin() + static_cast<std::ptrdiff_t>(begin), perm_.begin() + static_cast<std::ptrdiff_t>(end));
    return id;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  const auto col = static_cast<Eigen::Index>(split);
  std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(begin), perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                   perm_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     const double va = points_(static_cast<Eigen::Index>(a), col);
                     const double vb = points_(static_cast<Eigen::Index>(b), col);
                     return va < vb || (va == vb && a < b);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double PointIndex::distance(std::size_t i, std::size_t j) const {
  return qcmi::distance(points_.row(static_cast<Eigen::Index>(i)), points_.row(static_cast<Eigen::Index>(j)), norm_);
}

double PointIndex::min_dist(int node, std::size_t i) const {
  const auto d = static_cast<std::size_t>(dim());
  const double* lo = boxes_.data() + static_cast<std::size_t>(node) * 2 * d;
  const double* hi = lo + d;
  double acc = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double q = points_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    double gap = 0.0;
    if (q < lo[c]) gap = lo[c] - q;
    else if (q > hi[c]) gap = q - hi[c];
    if (norm_ == Norm::Max) acc = std::max(acc, gap);
    else acc += gap * gap;
  }
  return norm_ == Norm::Max ? acc : std::sqrt(acc);
}

double PointIndex::max_dist(int node, std::size_t i) const {
  const auto d = static_cast<std::size_t>(dim());
  const double* lo = boxes_.data() + static_cast<std::size_t>(node) * 2 * d;
  const double* hi = lo + d;
  double acc = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double q = points_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    const double far = std::max(std::abs(q - lo[c]), std::abs(q - hi[c]));
    if (norm_ == Norm::Max) acc = std::max(acc, far);
    else acc += far * far;
  }
  return norm_ == Norm::Max ? acc : std::sqrt(acc);
}

bool PointIndex::contains(int node, std::size_t i) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  return slot_[i] >= n.begin && slot_[i] < n.end;
}

double PointIndex::kth_distance(std::size_t i, int k) const {
  if (i >= size()) throw std::out_of_range("kth_distance: sample index out of range");
  if (k < 1 || static_cast<std::size_t>(k) >= size())
    throw std::invalid_argument("kth_distance: k must satisfy 1 <= k <= N-1 (k=" + std::to_string(k) +
                                ", N=" + std::to_string(size()) + ")");
  const auto kk = static_cast<std::size_t>(k);
  std::priority_queue<double> best;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (best.size() == kk && min_dist(id, i) >= best.top()) continue;
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.leaf()) {
      for (std::size_t s = node.begin; s < node.end; ++s) {
        const std::size_t j = perm_[s];
        if (j == i) continue;
        const double dist = distance(i, j);
        if (best.size() < kk) {
          best.push(dist);
        } else if (dist < best.top()) {
          best.pop();
          best.push(dist);
        }
      }
      continue;
    }
    // Push the farther child first so the nearer one is explored next.
    const double dl = min_dist(node.left, i);
    const double dr = min_dist(node.right, i);
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return best.top();
}

std::size_t PointIndex::count_within(std::size_t i, double radius, bool strict) const {
  if (i >= size()) throw std::out_of_range("count_within: sample index out of range");
  if (!(radius >= 0.0)) throw std::invalid_argument("count_within: radius must be >= 0");
  const bool inclusive = !strict || radius == 0.0;
  const auto inside = [&](double dist) { return inclusive ? dist <= radius : dist < radius; };
  std::size_t count = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (!inside(min_dist(id, i))) continue;
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (inside(max_dist(id, i))) {
      count += node.end - node.begin - (contains(id, i) ? 1 : 0);
      continue;
    }
    if (node.leaf()) {
      for (std::size_t s = node.begin; s < node.end; ++s) {
        const std::size_t j = perm_[s];
        if (j != i && inside(distance(i, j))) ++count;
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return count;
}

double PointIndex::weighted_count_within(std::size_t i, double radius, std::span<const double> weights,
                                         bool strict) const {
  if (i >= size()) throw std::out_of_range("weighted_count_within: sample index out of range");
  if (weights.size() != size()) throw std::invalid_argument("weighted_count_within: weights size != N");
  if (!(radius >= 0.0)) throw std::invalid_argument("weighted_count_within: radius must be >= 0");
  const bool inclusive = !strict || radius == 0.0;
  const auto inside = [&](double dist) { return inclusive ? dist <= radius : dist < radius; };

  // Matched indices arrive as sorted runs (one per leaf); merging them gives
  // ascending index order for the final sum.
  std::vector<std::size_t> matched;
  std::vector<std::size_t> bounds{0};
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (!inside(min_dist(id, i))) continue;
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.leaf()) {
      stack.push_back(node.right);
      stack.push_back(node.left);
      continue;
    }
    const bool all_in = inside(max_dist(id, i));
    const std::size_t before = matched.size();
    for (std::size_t s = node.begin; s < node.end; ++s) {
      const std::size_t j = perm_[s];
      if (j != i && (all_in || inside(distance(i, j)))) matched.push_back(j);
    }
    if (matched.size() > before) bounds.push_back(matched.size());
  }
  merge_runs(matched, bounds);
  double sum = 0.0;
  for (const std::size_t j : matched) sum += weights[j];
  return sum;
}

}  // namespace qcmi
