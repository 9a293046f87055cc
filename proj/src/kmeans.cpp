#include <limits>

#include "etlmsc/graph.hpp"
#include "etlmsc/random.hpp"

namespace etlmsc {
namespace {

Matrix plus_plus_seeds(const Matrix& points, int k, Rng& rng) {
  const Index n = points.rows();
  Matrix centers(k, points.cols());
  Vector nearest = Vector::Constant(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(static_cast<std::size_t>(n), false);

  Index pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  for (int c = 0; c < k; ++c) {
    centers.row(c) = points.row(pick);
    taken[static_cast<std::size_t>(pick)] = true;
    if (c + 1 == k) break;
    for (Index i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), (points.row(i) - centers.row(c)).squaredNorm());
    }
    const double total = nearest.sum();
    if (total > 0) {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= nearest(i);
        if (target < 0 && nearest(i) > 0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave the scan on a zero-weight point.
      while (nearest(pick) == 0 && pick > 0) --pick;
    } else {
      // Every point coincides with a chosen center; fall back to an unused index.
      std::vector<Index> free;
      for (Index i = 0; i < n; ++i) {
        if (!taken[static_cast<std::size_t>(i)]) free.push_back(i);
      }
      pick = free[rng.below(free.size())];
    }
  }
  return centers;
}

double assign(const Matrix& points, const Matrix& centers, std::vector<int>& labels,
              Vector& cost) {
  double inertia = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centers.rows(); ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    cost(i) = best_d;
    inertia += best_d;
  }
  return inertia;
}

KMeansRun lloyd(const Matrix& points, int k, Rng& rng, const KMeansOptions& options) {
  const Index n = points.rows();
  KMeansRun run;
  run.centers = plus_plus_seeds(points, k, rng);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Vector cost(n);

  double inertia = assign(points, run.centers, labels, cost);
  run.inertia_history.push_back(inertia);

  for (int it = 0; it < options.max_iterations; ++it) {
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        run.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: reseed at the point worst served by its current center.
      Index far = 0;
      cost.maxCoeff(&far);
      run.centers.row(c) = points.row(far);
      cost(far) = 0;
    }

    const double next = assign(points, run.centers, labels, cost);
    run.inertia_history.push_back(next);
    const double change = inertia - next;
    inertia = next;
    if (inertia == 0 || change <= options.tolerance * (inertia + change)) break;
  }

  run.inertia = inertia;
  run.partition.labels = std::move(labels);
  run.partition.num_clusters = k;
  return run;
}

}  // namespace

KMeansRun kmeans_detailed(const Matrix& points, int num_clusters, std::uint64_t seed,
                          const KMeansOptions& options) {
  if (num_clusters < 1 || num_clusters > points.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "k-means needs 1 <= C <= N");
  }
  const int restarts = std::max(1, options.restarts);
  std::vector<KMeansRun> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(r)));
    runs[static_cast<std::size_t>(r)] = lloyd(points, num_clusters, rng, options);
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return std::move(runs[best]);
}

Partition kmeans(const Matrix& points, int num_clusters, std::uint64_t seed, int restarts) {
  KMeansOptions options;
  options.restarts = restarts;
  return kmeans_detailed(points, num_clusters, seed, options).partition;
}

}  // namespace etlmsc
