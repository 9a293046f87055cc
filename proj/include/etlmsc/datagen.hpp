#pragma once

#include <cstdint>
#include <vector>

#include "etlmsc/graph.hpp"
#include "etlmsc/tensor.hpp"

namespace etlmsc {

/// Gaussian-blob multi-view corpus.
///
/// Cluster centers of every view form a regular simplex with edge length
/// `separation` (hence dims[v] >= clusters), turned by a seeded random
/// rotation per view. Sample s belongs to cluster floor(s * C / N). With
/// `complementary`, view v places cluster (v + 1) mod C on top of cluster
/// v mod C, so no single view separates all clusters once M >= 2.
struct MultiViewSpec {
  Index n = 300;
  int clusters = 3;
  int views = 3;
  std::vector<Index> dims;   ///< per-view feature count; empty means clusters for all
  double separation = 4.0;
  std::vector<double> noise; ///< per-view noise std; empty means 1 for all; one value broadcasts
  bool complementary = false;
  std::uint64_t seed = 0;

  void validate() const;
  Index dim(int v) const;
  double noise_std(int v) const;
};

struct MultiViewData {
  std::vector<Matrix> views;  ///< N x d_v, one sample per row
  Partition truth;
};

MultiViewData gen_multiview(const MultiViewSpec& spec);

/// Corpus used for the convergence and lambda sweeps: N = 300, C = M = 3,
/// 3 features, separation 4, noise 1.5.
MultiViewSpec standard_corpus(std::uint64_t seed);

/// Corpus used for the complementary-view comparison: N = 300, C = M = 3,
/// 3 features, separation 6, noise 1, complementary.
MultiViewSpec complementary_corpus(std::uint64_t seed);

struct LowRankSparseSpec {
  Index n1 = 0, n2 = 0, n3 = 0;
  Index rank = 1;
  double fiber_fraction = 0.05;
  /// Z0 = low_rank_scale * A * B / sqrt(rank * n3), so its entries have
  /// variance low_rank_scale^2. Corrupted fibers get N(0, sparse_scale^2) entries.
  double low_rank_scale = 1.0;
  double sparse_scale = 1.0;
  std::uint64_t seed = 0;
};

struct LowRankSparse {
  Tensor3 observed;  ///< Z0 + E0
  Tensor3 low_rank;  ///< Z0, tubal rank <= rank
  Tensor3 sparse;    ///< E0, nonzero on round(fiber_fraction * n1 n2) mode-3 fibers
};

/// Throws RankTooLarge when rank > min(n1, n2).
LowRankSparse gen_lowrank_sparse(const LowRankSparseSpec& spec);

}  // namespace etlmsc
