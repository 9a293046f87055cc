#include "etlmsc/datagen.hpp"

#include <cmath>
#include <numeric>

#include "etlmsc/random.hpp"
#include "etlmsc/tsvd.hpp"

namespace etlmsc {
namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  // Filled column by column so the stream order follows the storage order.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

Tensor3 gaussian_tensor(Dims dims, Rng& rng) {
  Tensor3 t(dims);
  for (auto& x : t.data()) x = rng.normal();
  return t;
}

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
// of R's diagonal folded into Q.
Matrix random_orthogonal(Index d, Rng& rng) {
  const Matrix g = gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

void MultiViewSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (clusters < 1) fail("clusters must be positive");
  if (views < 1) fail("views must be positive");
  if (n < 2 * static_cast<Index>(clusters)) fail("need at least two samples per cluster");
  if (!dims.empty() && dims.size() != 1 && static_cast<int>(dims.size()) != views) {
    fail("dims must list one value or one per view");
  }
  if (!noise.empty() && noise.size() != 1 && static_cast<int>(noise.size()) != views) {
    fail("noise must list one value or one per view");
  }
  for (int v = 0; v < views; ++v) {
    if (dim(v) < clusters) fail("each view needs at least as many features as clusters");
    if (!(noise_std(v) >= 0) || !std::isfinite(noise_std(v))) fail("noise must be finite and >= 0");
  }
  if (!(separation >= 0) || !std::isfinite(separation)) fail("separation must be finite and >= 0");
}

Index MultiViewSpec::dim(int v) const {
  if (dims.empty()) return clusters;
  return dims.size() == 1 ? dims.front() : dims[static_cast<std::size_t>(v)];
}

double MultiViewSpec::noise_std(int v) const {
  if (noise.empty()) return 1.0;
  return noise.size() == 1 ? noise.front() : noise[static_cast<std::size_t>(v)];
}

MultiViewData gen_multiview(const MultiViewSpec& spec) {
  spec.validate();
  MultiViewData out;
  out.truth.num_clusters = spec.clusters;
  out.truth.labels.resize(static_cast<std::size_t>(spec.n));
  for (Index s = 0; s < spec.n; ++s) {
    out.truth.labels[static_cast<std::size_t>(s)] =
        static_cast<int>(s * spec.clusters / spec.n);
  }

  for (int v = 0; v < spec.views; ++v) {
    Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(v)));
    const Index d = spec.dim(v);
    // Scaled basis vectors: pairwise distances all equal `separation`.
    Matrix centers = Matrix::Zero(spec.clusters, d);
    for (int c = 0; c < spec.clusters; ++c) centers(c, c) = spec.separation / std::sqrt(2.0);
    if (spec.complementary && spec.clusters > 1) {
      centers.row((v + 1) % spec.clusters) = centers.row(v % spec.clusters);
    }
    centers = centers * random_orthogonal(d, rng);

    Matrix x(spec.n, d);
    const double sd = spec.noise_std(v);
    for (Index s = 0; s < spec.n; ++s) {
      x.row(s) = centers.row(out.truth.labels[static_cast<std::size_t>(s)]);
      for (Index f = 0; f < d; ++f) x(s, f) += sd * rng.normal();
    }
    out.views.push_back(std::move(x));
  }
  return out;
}

MultiViewSpec standard_corpus(std::uint64_t seed) {
  MultiViewSpec spec;
  spec.dims = {3};
  spec.separation = 4.0;
  spec.noise = {1.5};
  spec.seed = seed;
  return spec;
}

MultiViewSpec complementary_corpus(std::uint64_t seed) {
  MultiViewSpec spec;
  spec.dims = {3};
  spec.separation = 6.0;
  spec.noise = {1.0};
  spec.complementary = true;
  spec.seed = seed;
  return spec;
}

LowRankSparse gen_lowrank_sparse(const LowRankSparseSpec& spec) {
  if (spec.n1 < 1 || spec.n2 < 1 || spec.n3 < 1) {
    throw Error(ErrorCode::kShapeMismatch, "dimensions must be positive");
  }
  if (spec.rank < 1 || spec.rank > std::min(spec.n1, spec.n2)) {
    throw Error(ErrorCode::kRankTooLarge, "tubal rank must lie in 1..min(n1, n2)");
  }
  if (!(spec.fiber_fraction >= 0 && spec.fiber_fraction < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "fiber fraction must lie in [0, 1)");
  }
  Rng rng(spec.seed);
  const Tensor3 a = gaussian_tensor({spec.n1, spec.rank, spec.n3}, rng);
  const Tensor3 b = gaussian_tensor({spec.rank, spec.n2, spec.n3}, rng);

  LowRankSparse out;
  out.low_rank = t_product(a, b);
  out.low_rank *= spec.low_rank_scale /
                  std::sqrt(static_cast<double>(spec.rank) * static_cast<double>(spec.n3));

  out.sparse = Tensor3(spec.n1, spec.n2, spec.n3);
  const Index fibers = spec.n1 * spec.n2;
  const auto count = static_cast<Index>(std::llround(spec.fiber_fraction * static_cast<double>(fibers)));
  // Partial Fisher-Yates picks `count` distinct fibers.
  std::vector<Index> order(static_cast<std::size_t>(fibers));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index t = 0; t < count; ++t) {
    const auto pick = t + static_cast<Index>(rng.below(static_cast<std::uint64_t>(fibers - t)));
    std::swap(order[static_cast<std::size_t>(t)], order[static_cast<std::size_t>(pick)]);
    const Index f = order[static_cast<std::size_t>(t)];
    for (Index k = 0; k < spec.n3; ++k) {
      out.sparse(f % spec.n1, f / spec.n1, k) = spec.sparse_scale * rng.normal();
    }
  }
  out.observed = out.low_rank + out.sparse;
  return out;
}

}  // namespace etlmsc
