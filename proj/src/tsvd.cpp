#include "etlmsc/tsvd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>

namespace etlmsc {
namespace {

constexpr unsigned kFullUV = Eigen::ComputeFullU | Eigen::ComputeFullV;
constexpr unsigned kThinUV = Eigen::ComputeThinU | Eigen::ComputeThinV;

// Runs body(k) for every half-spectrum slice, in parallel. The first
// exception thrown by any slice is rethrown on the calling thread.
template <typename Body>
void for_each_slice(Index count, Body&& body) {
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
  for (Index k = 0; k < count; ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(k);
    } catch (...) {
#pragma omp critical(etlmsc_slice_failure)
      {
        if (!failure) failure = std::current_exception();
      }
      failed = true;
    }
  }
  if (failure) std::rethrow_exception(failure);
}

bool self_conjugate(Index k, Index n3) { return spectrum_weight(k, n3) == 1; }

template <typename Svd>
void check_svd(const Svd& svd) {
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::kSvdDidNotConverge, "SVD of a Fourier slice failed");
  }
}

}  // namespace

Tensor3 t_product(const Tensor3& a, const Tensor3& b) {
  if (a.n2() != b.n1() || a.n3() != b.n3()) {
    throw Error(ErrorCode::kShapeMismatch, "t_product needs A: n1 x n2 x n3 and B: n2 x n4 x n3");
  }
  const CTensor3 af = rfft_mode3(a);
  const CTensor3 bf = rfft_mode3(b);
  CTensor3 cf(a.n1(), b.n2(), af.n3());
  for_each_slice(af.n3(), [&](Index k) {
    cf.frontal_slice(k).noalias() = af.frontal_slice(k) * bf.frontal_slice(k);
  });
  return irfft_mode3(cf, a.n3());
}

Tensor3 transpose_t(const Tensor3& a) {
  const auto [n1, n2, n3] = a.dims();
  Tensor3 out(n2, n1, n3);
  out.frontal_slice(0) = a.frontal_slice(0).transpose();
  for (Index k = 1; k < n3; ++k) out.frontal_slice(k) = a.frontal_slice(n3 - k).transpose();
  return out;
}

Tensor3 identity_tensor(Index n, Index n3) {
  Tensor3 out(n, n, n3);
  out.frontal_slice(0).setIdentity();
  return out;
}

TSvdFactors t_svd(const Tensor3& a) {
  const auto [n1, n2, n3] = a.dims();
  const Index r = std::min(n1, n2);
  const CTensor3 af = rfft_mode3(a);
  const Index half = af.n3();

  CTensor3 uf(n1, n1, half);
  CTensor3 sf(n1, n2, half);
  CTensor3 vf(n2, n2, half);
  Matrix sv(r, n3);

  for_each_slice(half, [&](Index k) {
    Vector s;
    if (self_conjugate(k, n3)) {
      // Real slice: a real SVD keeps the factors real, so their inverse FFT is exact.
      const Matrix slice = af.frontal_slice(k).real();
      Eigen::BDCSVD<Matrix> svd(slice, kFullUV);
      check_svd(svd);
      uf.frontal_slice(k) = svd.matrixU().cast<Complex>();
      vf.frontal_slice(k) = svd.matrixV().cast<Complex>();
      s = svd.singularValues();
    } else {
      Eigen::BDCSVD<CMatrix> svd(CMatrix(af.frontal_slice(k)), kFullUV);
      check_svd(svd);
      uf.frontal_slice(k) = svd.matrixU();
      vf.frontal_slice(k) = svd.matrixV();
      s = svd.singularValues();
    }
    for (Index i = 0; i < r; ++i) sf(i, i, k) = s(i);
    sv.col(k) = s;
    if (k != 0 && n3 - k != k) sv.col(n3 - k) = s;
  });

  TSvdFactors out;
  out.U = irfft_mode3(uf, n3);
  out.S = irfft_mode3(sf, n3);
  out.V = irfft_mode3(vf, n3);
  out.singular_values_f = std::move(sv);
  return out;
}

double tnn(const Tensor3& a) {
  const Index n3 = a.n3();
  const CTensor3 af = rfft_mode3(a);
  Vector per_slice(af.n3());
  for_each_slice(af.n3(), [&](Index k) {
    Eigen::BDCSVD<CMatrix> svd(CMatrix(af.frontal_slice(k)));
    check_svd(svd);
    per_slice(k) = spectrum_weight(k, n3) * svd.singularValues().sum();
  });
  return per_slice.sum();
}

ShrinkResult tubal_shrink(const Tensor3& a, double theta) {
  if (!(theta >= 0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::kInvalidArgument, "tubal_shrink threshold must be finite and >= 0");
  }
  const Index n3 = a.n3();
  CTensor3 af = rfft_mode3(a);
  Vector per_slice(af.n3());

  for_each_slice(af.n3(), [&](Index k) {
    auto slice = af.frontal_slice(k);
    Eigen::BDCSVD<CMatrix> svd(CMatrix(slice), kThinUV);
    check_svd(svd);
    const Vector& s = svd.singularValues();
    Index rank = 0;
    while (rank < s.size() && s(rank) > theta) ++rank;
    if (rank == 0) {
      slice.setZero();
      per_slice(k) = 0;
      return;
    }
    const Vector shrunk = (s.head(rank).array() - theta).matrix();
    slice.noalias() = svd.matrixU().leftCols(rank) * shrunk.cast<Complex>().asDiagonal() *
                      svd.matrixV().leftCols(rank).adjoint();
    per_slice(k) = spectrum_weight(k, n3) * shrunk.sum();
  });

  // The shrunk self-conjugate slices must stay real for the result to be real.
  double max_abs = 0;
  double max_imag = 0;
  for (Index k = 0; k < af.n3(); ++k) {
    const auto slice = af.frontal_slice(k);
    if (slice.size() > 0) max_abs = std::max(max_abs, slice.cwiseAbs().maxCoeff());
    if (self_conjugate(k, n3) && slice.size() > 0) {
      max_imag = std::max(max_imag, slice.imag().cwiseAbs().maxCoeff());
    }
  }
  if (max_imag > 1e-8 * max_abs) {
    throw Error(ErrorCode::kIfftNotReal, "tubal shrinkage produced a non-real self-conjugate slice");
  }
  return {irfft_mode3(af, n3), per_slice.sum()};
}

}  // namespace etlmsc
