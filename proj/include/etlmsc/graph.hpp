#pragma once

#include <cstdint>
#include <vector>

#include "etlmsc/tensor.hpp"

namespace etlmsc {

struct SimilarityMatrix {
  Matrix values;      ///< symmetric, entries in (0, 1], unit diagonal
  double sigma = 0;   ///< kernel bandwidth in feature units
};

/// Row-stochastic matrix of a random walk.
struct TransitionMatrix {
  Matrix values;
};

struct StationaryDistribution {
  Vector pi;
  int iterations = 0;
};

/// Hard clustering of N samples into labels 0 .. num_clusters - 1.
struct Partition {
  std::vector<int> labels;
  int num_clusters = 0;

  Index size() const { return static_cast<Index>(labels.size()); }
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Teleportation weight mixed into every stationary-distribution solve.
inline constexpr double kTeleportAlpha = 0.99;

/// Gaussian kernel S_ij = exp(-||x_i - x_j||^2 / sigma^2) over the rows of X
/// (one sample per row). sigma = sigma_ratio * mean pairwise distance.
SimilarityMatrix gaussian_similarity(const Matrix& samples, double sigma_ratio);

/// P = D^{-1} S with D_ii the row sums of S.
TransitionMatrix transition_matrix(const Matrix& similarity);
inline TransitionMatrix transition_matrix(const SimilarityMatrix& s) {
  return transition_matrix(s.values);
}

/// Power iteration on the teleported chain alpha P + (1 - alpha) / N 11^T
/// starting from the uniform vector. Stops at L1 change <= 1e-12; throws
/// NoConvergence after 10000 iterations.
StationaryDistribution stationary_distribution(const Matrix& p, double alpha = kTeleportAlpha);

/// L' = (Pi^{1/2} P Pi^{-1/2} + Pi^{-1/2} P^T Pi^{1/2}) / 2.
Matrix normalized_laplacian(const Matrix& p, const Vector& pi);

/// Orthonormal eigenvectors for the C algebraically largest eigenvalues,
/// in descending eigenvalue order. Each column is signed so that its
/// largest-magnitude entry (first one on ties) is positive.
struct SpectralEmbedding {
  Matrix vectors;  ///< N x C
  Vector values;   ///< C eigenvalues, descending
};
SpectralEmbedding spectral_embed(const Matrix& laplacian, int num_clusters);

struct KMeansOptions {
  int restarts = 20;
  int max_iterations = 300;
  double tolerance = 1e-9;  ///< relative inertia change
};

struct KMeansRun {
  Partition partition;
  Matrix centers;
  double inertia = 0;
  std::vector<double> inertia_history;  ///< one entry per Lloyd iteration
};

/// Best-of-restarts k-means with k-means++ seeding over the rows of points.
KMeansRun kmeans_detailed(const Matrix& points, int num_clusters, std::uint64_t seed,
                          const KMeansOptions& options = {});
Partition kmeans(const Matrix& points, int num_clusters, std::uint64_t seed, int restarts = 20);

struct SpectralOptions {
  KMeansOptions kmeans;
  bool normalize_rows = false;  ///< unit-length rows of U before k-means
};

/// Makes an arbitrary nonnegative-ish square matrix a valid transition matrix:
/// clamp negatives, symmetrize, add 1e-12 * max entry to the diagonal,
/// row-normalize. Matrices that already are row-stochastic pass unchanged.
Matrix condition_transition(const Matrix& p_like);
bool is_transition_matrix(const Matrix& p, double tolerance = 1e-12);

struct SpectralClustering {
  Partition partition;
  Matrix transition;  ///< the conditioned matrix actually clustered
  StationaryDistribution stationary;
  SpectralEmbedding embedding;
};

/// Random-walk spectral clustering: condition -> pi -> L' -> embed -> k-means.
SpectralClustering markov_spectral_cluster_detailed(const Matrix& p_like, int num_clusters,
                                                    std::uint64_t seed,
                                                    const SpectralOptions& options = {});
Partition markov_spectral_cluster(const Matrix& p_like, int num_clusters, std::uint64_t seed,
                                  const SpectralOptions& options = {});

}  // namespace etlmsc
