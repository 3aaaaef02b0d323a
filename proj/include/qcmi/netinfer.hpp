#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qcmi/estimators.hpp"
#include "qcmi/synthgen.hpp"

namespace qcmi {

enum class EdgeMethod { Rdi, Urdi };

std::string_view to_string(EdgeMethod method);
EdgeMethod edge_method_from_string(std::string_view name);

/// Directed pairwise scores. `scores(i, j)` rates i -> j; the diagonal and
/// failed pairs hold NaN and are listed in `failures`.
struct ScoreMatrix {
  Matrix scores;
  BoolMatrix truth;
  std::vector<std::string> failures;

  bool has_truth() const { return truth.size() != 0; }
};

/// Lagged dataset for i -> j: X = x_i(t-1), Y = x_j(t), Z = x_j(t-1), over
/// every t whose predecessor lies in the same run.
Dataset lagged_dataset(const TimeSeries& series, int i, int j);

/// I(x_i(t-1); x_j(t) | x_j(t-1)) for every ordered pair, by cmi_knn (rdi) or
/// by qcmi_knn under a uniform potential on the empirical range of the lagged
/// (X, Z) (urdi).
ScoreMatrix directed_scores(const TimeSeries& series, EdgeMethod method, const EstimatorConfig& cfg = {});

/// Mann-Whitney AUC over off-diagonal, non-missing entries: probability that a
/// random true edge outscores a random non-edge, ties counting one half.
double auc(const ScoreMatrix& scores);

/// One row per off-diagonal pair: `i,j,score,truth`.
void write_scores_csv(std::ostream& out, const ScoreMatrix& scores);

}  // namespace qcmi
