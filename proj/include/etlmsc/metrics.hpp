#pragma once

#include <cstdint>
#include <vector>

#include "etlmsc/graph.hpp"

namespace etlmsc {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// counts(a, b) = number of samples with truth label a and predicted label b.
struct ContingencyTable {
  CountMatrix counts;
  std::int64_t n = 0;

  static ContingencyTable build(const Partition& truth, const Partition& pred);
};

/// Partition from raw labels; num_clusters = max label + 1. Negative labels throw.
Partition make_partition(std::vector<int> labels);

/// Mutual information over sqrt(H(truth) H(pred)), natural logarithms.
double nmi(const Partition& truth, const Partition& pred);

/// Best one-to-one label mapping accuracy. Unequal cluster counts are padded
/// with empty clusters.
double accuracy(const Partition& truth, const Partition& pred);

/// Minimum-cost perfect assignment for a square cost matrix: result[row] = column.
/// Among optimal assignments the lexicographically smallest is returned.
std::vector<int> hungarian(const Matrix& cost);

struct PairCounts {
  std::int64_t tp = 0;  ///< same cluster in both
  std::int64_t fp = 0;  ///< same in pred only
  std::int64_t fn = 0;  ///< same in truth only
  std::int64_t tn = 0;
};

struct PairMetrics {
  double ari = 0;
  double f_score = 0;
  double precision = 0;
  double recall = 0;
};

PairCounts pair_counts(const Partition& truth, const Partition& pred);
PairMetrics pair_metrics(const Partition& truth, const Partition& pred);

/// Precision / recall / F from pair counts. No predicted pairs gives precision
/// 0, except when there are no true pairs either (then everything is 1).
PairMetrics pair_scores(const PairCounts& c);

struct MetricSuite {
  double nmi = 0;
  double acc = 0;
  double ari = 0;
  double f_score = 0;
  double precision = 0;
  double recall = 0;
};

MetricSuite evaluate(const Partition& truth, const Partition& pred);

}  // namespace etlmsc
