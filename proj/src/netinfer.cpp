#include "qcmi/netinfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace qcmi {

std::string_view to_string(EdgeMethod method) { return method == EdgeMethod::Rdi ? "rdi" : "urdi"; }

EdgeMethod edge_method_from_string(std::string_view name) {
  if (name == "rdi") return EdgeMethod::Rdi;
  if (name == "urdi") return EdgeMethod::Urdi;
  throw std::invalid_argument("unknown edge method '" + std::string(name) + "'");
}

Dataset lagged_dataset(const TimeSeries& series, int i, int j) {
  if (i < 0 || j < 0 || i >= series.variables() || j >= series.variables())
    throw std::out_of_range("lagged_dataset: variable index out of range");
  std::vector<Eigen::Index> rows;
  std::size_t run = 0;
  for (std::size_t t = 1; t < series.steps(); ++t) {
    if (run + 1 < series.run_starts.size() && series.run_starts[run + 1] == t) {
      ++run;
      continue;
    }
    rows.push_back(static_cast<Eigen::Index>(t));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix x(n, 1), y(n, 1), z(n, 1);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index t = rows[static_cast<std::size_t>(r)];
    x(r, 0) = series.values(t - 1, i);
    y(r, 0) = series.values(t, j);
    z(r, 0) = series.values(t - 1, j);
  }
  return Dataset(std::move(x), std::move(y), std::move(z));
}

ScoreMatrix directed_scores(const TimeSeries& series, EdgeMethod method, const EstimatorConfig& cfg) {
  series.validate();
  if (series.steps() < 3) throw std::invalid_argument("directed_scores: need at least 3 steps");
  const int n = series.variables();
  if (n < 2) throw std::invalid_argument("directed_scores: need at least 2 variables");
  cfg.validate();

  ScoreMatrix out;
  out.scores = Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  out.truth = series.adjacency;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      try {
        const Dataset lagged = lagged_dataset(series, i, j);
        double score = 0.0;
        if (method == EdgeMethod::Rdi) {
          score = cmi_knn(lagged, cfg).estimate;
        } else {
          const Potential q = make_potential(PotentialKind::Uniform, lagged);
          score = qcmi_knn(lagged, q, cfg).estimate;
        }
        if (!std::isfinite(score)) throw std::runtime_error("non-finite score");
        out.scores(i, j) = score;
      } catch (const std::exception& e) {
        out.failures.push_back(std::to_string(i) + "->" + std::to_string(j) + ": " + e.what());
      }
    }
  }
  return out;
}

double auc(const ScoreMatrix& scores) {
  if (!scores.has_truth()) throw std::invalid_argument("auc: ground truth required");
  const Eigen::Index n = scores.scores.rows();
  if (scores.truth.rows() != n || scores.truth.cols() != scores.scores.cols())
    throw std::invalid_argument("auc: truth and score shapes differ");
  std::vector<std::pair<double, bool>> entries;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < scores.scores.cols(); ++j)
      if (i != j && !std::isnan(scores.scores(i, j))) entries.emplace_back(scores.scores(i, j), scores.truth(i, j));

  const auto positives = static_cast<double>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.second; }));
  const double negatives = static_cast<double>(entries.size()) - positives;
  if (positives == 0.0 || negatives == 0.0)
    throw std::invalid_argument("auc: need at least one true edge and one non-edge");

  // Rank-sum with midranks for ties.
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double positive_rank_sum = 0.0;
  for (std::size_t s = 0; s < entries.size();) {
    std::size_t e = s;
    while (e < entries.size() && entries[e].first == entries[s].first) ++e;
    const double midrank = 0.5 * static_cast<double>(s + 1 + e);
    for (std::size_t r = s; r < e; ++r)
      if (entries[r].second) positive_rank_sum += midrank;
    s = e;
  }
  return (positive_rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

void write_scores_csv(std::ostream& out, const ScoreMatrix& scores) {
  out << "i,j,score" << (scores.has_truth() ? ",truth" : "") << '\n';
  for (Eigen::Index i = 0; i < scores.scores.rows(); ++i) {
    for (Eigen::Index j = 0; j < scores.scores.cols(); ++j) {
      if (i == j) continue;
      const double s = scores.scores(i, j);
      out << i << ',' << j << ',' << (std::isnan(s) ? std::string("nan") : format_double(s));
      if (scores.has_truth()) out << ',' << (scores.truth(i, j) ? 1 : 0);
      out << '\n';
    }
  }
}

}  // namespace qcmi
