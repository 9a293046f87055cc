#include "etlmsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace etlmsc {
namespace {

void check_lengths(const Partition& truth, const Partition& pred) {
  if (truth.labels.size() != pred.labels.size()) {
    std::ostringstream msg;
    msg << "partitions have " << truth.labels.size() << " and " << pred.labels.size()
        << " samples";
    throw Error(ErrorCode::kLengthMismatch, msg.str());
  }
}

int label_span(const Partition& p) {
  int span = std::max(p.num_clusters, 0);
  for (int label : p.labels) {
    if (label < 0) throw Error(ErrorCode::kInvalidArgument, "labels must be nonnegative");
    span = std::max(span, label + 1);
  }
  return span;
}

double entropy(const std::vector<std::int64_t>& sizes, double n) {
  double h = 0;
  for (auto s : sizes) {
    if (s > 0) {
      const double p = static_cast<double>(s) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

std::int64_t choose2(std::int64_t m) { return m * (m - 1) / 2; }

// Kuhn's augmenting path search restricted to allowed edges.
bool augment(int row, const std::vector<std::vector<int>>& adj, std::vector<int>& match_col,
             std::vector<char>& seen) {
  for (int col : adj[static_cast<std::size_t>(row)]) {
    if (seen[static_cast<std::size_t>(col)]) continue;
    seen[static_cast<std::size_t>(col)] = 1;
    if (match_col[static_cast<std::size_t>(col)] < 0 ||
        augment(match_col[static_cast<std::size_t>(col)], adj, match_col, seen)) {
      match_col[static_cast<std::size_t>(col)] = row;
      return true;
    }
  }
  return false;
}

// True when rows first..n-1 can be perfectly matched to the columns not in used.
bool completable(const std::vector<std::vector<int>>& adj, int first,
                 const std::vector<char>& used) {
  const int n = static_cast<int>(adj.size());
  std::vector<std::vector<int>> sub(adj.size());
  for (int r = first; r < n; ++r) {
    for (int c : adj[static_cast<std::size_t>(r)]) {
      if (!used[static_cast<std::size_t>(c)]) sub[static_cast<std::size_t>(r)].push_back(c);
    }
  }
  std::vector<int> match_col(adj.size(), -1);
  for (int r = first; r < n; ++r) {
    std::vector<char> seen(adj.size(), 0);
    if (!augment(r, sub, match_col, seen)) return false;
  }
  return true;
}

}  // namespace

ContingencyTable ContingencyTable::build(const Partition& truth, const Partition& pred) {
  check_lengths(truth, pred);
  ContingencyTable t;
  t.counts = CountMatrix::Zero(label_span(truth), label_span(pred));
  for (std::size_t s = 0; s < truth.labels.size(); ++s) ++t.counts(truth.labels[s], pred.labels[s]);
  t.n = static_cast<std::int64_t>(truth.labels.size());
  return t;
}

Partition make_partition(std::vector<int> labels) {
  Partition p;
  p.labels = std::move(labels);
  p.num_clusters = label_span(p);
  return p;
}

double nmi(const Partition& truth, const Partition& pred) {
  const ContingencyTable t = ContingencyTable::build(truth, pred);
  if (t.n == 0) return 1.0;
  const double n = static_cast<double>(t.n);
  std::vector<std::int64_t> a(static_cast<std::size_t>(t.counts.rows()));
  std::vector<std::int64_t> b(static_cast<std::size_t>(t.counts.cols()));
  for (Index i = 0; i < t.counts.rows(); ++i) a[static_cast<std::size_t>(i)] = t.counts.row(i).sum();
  for (Index j = 0; j < t.counts.cols(); ++j) b[static_cast<std::size_t>(j)] = t.counts.col(j).sum();

  const double ha = entropy(a, n);
  const double hb = entropy(b, n);
  if (ha == 0 && hb == 0) return 1.0;  // both a single cluster, hence equal
  if (ha == 0 || hb == 0) return 0.0;

  double mi = 0;
  for (Index i = 0; i < t.counts.rows(); ++i) {
    for (Index j = 0; j < t.counts.cols(); ++j) {
      const auto nij = t.counts(i, j);
      if (nij == 0) continue;
      const double ratio = n * static_cast<double>(nij) /
                           (static_cast<double>(a[static_cast<std::size_t>(i)]) *
                            static_cast<double>(b[static_cast<std::size_t>(j)]));
      mi += static_cast<double>(nij) / n * std::log(ratio);
    }
  }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != cost.rows()) throw Error(ErrorCode::kShapeMismatch, "cost matrix must be square");
  if (!cost.allFinite()) throw Error(ErrorCode::kInvalidArgument, "cost matrix must be finite");
  if (n == 0) return {};

  // Shortest augmenting path Hungarian method with row potentials u and column
  // potentials v (1-based, column 0 is a sentinel). Afterwards u_i + v_j <= c_ij.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  // An assignment is optimal exactly when all its edges are tight under the
  // final potentials, so the lexicographically smallest optimum is a greedy
  // walk over tight edges that keeps the remainder perfectly matchable.
  const double scale = 1.0 + cost.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * scale;
  std::vector<std::vector<int>> tight(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (cost(i, j) - u[i + 1] - v[j + 1] <= tol) tight[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  std::vector<int> result(static_cast<std::size_t>(n), -1);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j : tight[static_cast<std::size_t>(i)]) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      taken[static_cast<std::size_t>(j)] = 1;
      if (completable(tight, i + 1, taken)) {
        result[static_cast<std::size_t>(i)] = j;
        break;
      }
      taken[static_cast<std::size_t>(j)] = 0;
    }
  }
  // The matching found by the main loop is always tight, so every row is set;
  // fall back to it only if rounding pruned a tight edge.
  if (std::find(result.begin(), result.end(), -1) != result.end()) {
    for (int j = 1; j <= n; ++j) result[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return result;
}

double accuracy(const Partition& truth, const Partition& pred) {
  const ContingencyTable t = ContingencyTable::build(truth, pred);
  if (t.n == 0) return 1.0;
  const Index k = std::max(t.counts.rows(), t.counts.cols());
  Matrix cost = Matrix::Zero(k, k);
  cost.topLeftCorner(t.counts.rows(), t.counts.cols()) = -t.counts.cast<double>();
  const std::vector<int> map = hungarian(cost);
  std::int64_t hit = 0;
  for (Index i = 0; i < t.counts.rows(); ++i) {
    const int j = map[static_cast<std::size_t>(i)];
    if (j < t.counts.cols()) hit += t.counts(i, j);
  }
  return static_cast<double>(hit) / static_cast<double>(t.n);
}

PairCounts pair_counts(const Partition& truth, const Partition& pred) {
  const ContingencyTable t = ContingencyTable::build(truth, pred);
  std::int64_t same_both = 0, same_truth = 0, same_pred = 0;
  for (Index i = 0; i < t.counts.rows(); ++i) {
    same_truth += choose2(t.counts.row(i).sum());
    for (Index j = 0; j < t.counts.cols(); ++j) same_both += choose2(t.counts(i, j));
  }
  for (Index j = 0; j < t.counts.cols(); ++j) same_pred += choose2(t.counts.col(j).sum());
  PairCounts c;
  c.tp = same_both;
  c.fp = same_pred - same_both;
  c.fn = same_truth - same_both;
  c.tn = choose2(t.n) - c.tp - c.fp - c.fn;
  return c;
}

PairMetrics pair_scores(const PairCounts& c) {
  PairMetrics m;
  const auto pred_pairs = c.tp + c.fp;
  const auto true_pairs = c.tp + c.fn;
  if (pred_pairs == 0 && true_pairs == 0) {
    m.precision = m.recall = m.f_score = 1.0;
  } else {
    m.precision = pred_pairs > 0 ? static_cast<double>(c.tp) / static_cast<double>(pred_pairs) : 0.0;
    m.recall = true_pairs > 0 ? static_cast<double>(c.tp) / static_cast<double>(true_pairs) : 0.0;
    m.f_score = (m.precision + m.recall) > 0
                    ? 2 * m.precision * m.recall / (m.precision + m.recall)
                    : 0.0;
  }

  // Adjusted Rand index written in pair counts; equal to the contingency form.
  using Wide = long double;
  const Wide tp = c.tp, fp = c.fp, fn = c.fn, tn = c.tn;
  const Wide denom = (tp + fn) * (fn + tn) + (tp + fp) * (fp + tn);
  m.ari = denom == 0 ? 1.0 : static_cast<double>(2 * (tp * tn - fn * fp) / denom);
  return m;
}

PairMetrics pair_metrics(const Partition& truth, const Partition& pred) {
  if (truth.labels.size() < 2 && truth.labels.size() == pred.labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "pair metrics need at least two samples");
  }
  return pair_scores(pair_counts(truth, pred));
}

MetricSuite evaluate(const Partition& truth, const Partition& pred) {
  const PairMetrics pm = pair_metrics(truth, pred);
  MetricSuite s;
  s.nmi = nmi(truth, pred);
  s.acc = accuracy(truth, pred);
  s.ari = pm.ari;
  s.f_score = pm.f_score;
  s.precision = pm.precision;
  s.recall = pm.recall;
  return s;
}

}  // namespace etlmsc
