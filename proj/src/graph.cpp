#include "etlmsc/graph.hpp"

#include <cmath>
#include <sstream>

namespace etlmsc {

SimilarityMatrix gaussian_similarity(const Matrix& samples, double sigma_ratio) {
  const Index n = samples.rows();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two samples");
  if (!(sigma_ratio > 0) || !std::isfinite(sigma_ratio)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_ratio must be positive");
  }
  if (!samples.allFinite()) throw Error(ErrorCode::kInvalidArgument, "features must be finite");

  Matrix sq(n, n);
  double distance_sum = 0;
  for (Index j = 0; j < n; ++j) {
    sq(j, j) = 0;
    for (Index i = j + 1; i < n; ++i) {
      const double d2 = (samples.row(i) - samples.row(j)).squaredNorm();
      sq(i, j) = sq(j, i) = d2;
      distance_sum += std::sqrt(d2);
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  const double mean_distance = distance_sum / pairs;
  if (!(mean_distance > 0)) {
    throw Error(ErrorCode::kDegenerateData, "all pairwise distances are zero");
  }

  SimilarityMatrix out;
  out.sigma = sigma_ratio * mean_distance;
  const double inv = 1.0 / (out.sigma * out.sigma);
  out.values = (-sq.array() * inv).exp().matrix();
  out.values.diagonal().setOnes();
  return out;
}

TransitionMatrix transition_matrix(const Matrix& similarity) {
  if (similarity.rows() != similarity.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "similarity matrix must be square");
  }
  const Vector degree = similarity.rowwise().sum();
  for (Index i = 0; i < degree.size(); ++i) {
    if (!(degree(i) > 0)) {
      std::ostringstream msg;
      msg << "row " << i << " of the similarity matrix sums to " << degree(i);
      throw Error(ErrorCode::kZeroDegree, msg.str());
    }
  }
  return {degree.cwiseInverse().asDiagonal() * similarity};
}

StationaryDistribution stationary_distribution(const Matrix& p, double alpha) {
  if (p.rows() != p.cols() || p.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "transition matrix must be square and non-empty");
  }
  constexpr int kMaxIterations = 10000;
  constexpr double kTolerance = 1e-12;
  const Index n = p.rows();
  const double teleport = (1.0 - alpha) / static_cast<double>(n);
  const Matrix pt = p.transpose();

  Vector pi = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  for (int it = 1; it <= kMaxIterations; ++it) {
    next.noalias() = alpha * (pt * pi);
    next.array() += teleport * pi.sum();
    next /= next.sum();
    const double change = (next - pi).lpNorm<1>();
    pi.swap(next);
    if (change <= kTolerance) return {pi, it};
  }
  throw Error(ErrorCode::kNoConvergence, "stationary distribution did not converge");
}

Matrix normalized_laplacian(const Matrix& p, const Vector& pi) {
  if (p.rows() != p.cols() || p.rows() != pi.size()) {
    throw Error(ErrorCode::kShapeMismatch, "P must be N x N and pi length N");
  }
  if ((pi.array() <= 0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "stationary distribution must be strictly positive");
  }
  const Vector root = pi.cwiseSqrt();
  const Matrix b = root.asDiagonal() * p * root.cwiseInverse().asDiagonal();
  return 0.5 * (b + b.transpose());
}

SpectralEmbedding spectral_embed(const Matrix& laplacian, int num_clusters) {
  const Index n = laplacian.rows();
  if (laplacian.cols() != n) throw Error(ErrorCode::kShapeMismatch, "matrix must be square");
  if (num_clusters < 1 || num_clusters > n) {
    throw Error(ErrorCode::kInvalidArgument, "cluster count must lie in 1..N");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kEigenFailure, "symmetric eigendecomposition failed");
  }
  SpectralEmbedding out;
  out.vectors.resize(n, num_clusters);
  out.values.resize(num_clusters);
  for (int c = 0; c < num_clusters; ++c) {
    const Index src = n - 1 - c;  // eigenvalues come back ascending
    Vector v = eig.eigenvectors().col(src);
    Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0) v = -v;
    out.vectors.col(c) = v;
    out.values(c) = eig.eigenvalues()(src);
  }
  return out;
}

bool is_transition_matrix(const Matrix& p, double tolerance) {
  if (p.rows() != p.cols() || !p.allFinite() || (p.array() < 0).any()) return false;
  return ((p.rowwise().sum().array() - 1.0).abs() <= tolerance).all();
}

Matrix condition_transition(const Matrix& p_like) {
  if (p_like.rows() != p_like.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "matrix must be square");
  }
  if (!p_like.allFinite()) throw Error(ErrorCode::kInvalidArgument, "matrix has non-finite entries");
  if (is_transition_matrix(p_like)) return p_like;

  const Matrix clamped = p_like.cwiseMax(0.0);
  Matrix sym = 0.5 * (clamped + clamped.transpose());
  const double peak = sym.maxCoeff();
  sym.diagonal().array() += 1e-12 * (peak > 0 ? peak : 1.0);
  const Vector rows = sym.rowwise().sum();
  return rows.cwiseInverse().asDiagonal() * sym;
}

SpectralClustering markov_spectral_cluster_detailed(const Matrix& p_like, int num_clusters,
                                                    std::uint64_t seed,
                                                    const SpectralOptions& options) {
  SpectralClustering out;
  out.transition = condition_transition(p_like);
  out.stationary = stationary_distribution(out.transition);
  const Matrix lap = normalized_laplacian(out.transition, out.stationary.pi);
  out.embedding = spectral_embed(lap, num_clusters);

  Matrix points = out.embedding.vectors;
  if (options.normalize_rows) {
    for (Index i = 0; i < points.rows(); ++i) {
      const double norm = points.row(i).norm();
      if (norm > 0) points.row(i) /= norm;
    }
  }
  out.partition = kmeans_detailed(points, num_clusters, seed, options.kmeans).partition;
  return out;
}

Partition markov_spectral_cluster(const Matrix& p_like, int num_clusters, std::uint64_t seed,
                                  const SpectralOptions& options) {
  return markov_spectral_cluster_detailed(p_like, num_clusters, seed, options).partition;
}

}  // namespace etlmsc
