#include "etlmsc/tensor.hpp"

#include <cmath>

namespace etlmsc {

Tensor3 rotate(const Tensor3& t) {
  const auto [n1, n2, n3] = t.dims();
  Tensor3 out(n2, n3, n1);
  for (Index k = 0; k < n3; ++k)
    for (Index j = 0; j < n2; ++j)
      for (Index i = 0; i < n1; ++i) out(j, k, i) = t(i, j, k);
  return out;
}

Tensor3 unrotate(const Tensor3& t) {
  // t has dims (n2, n3, n1) of the tensor that was rotated.
  const auto [n2, n3, n1] = t.dims();
  Tensor3 out(n1, n2, n3);
  for (Index k = 0; k < n3; ++k)
    for (Index j = 0; j < n2; ++j)
      for (Index i = 0; i < n1; ++i) out(i, j, k) = t(j, k, i);
  return out;
}

Matrix matricize_mode3(const Tensor3& t) {
  const Index cols = t.n1() * t.n2();
  return Eigen::Map<const Matrix>(t.data().data(), cols, t.n3()).transpose();
}

Tensor3 fold_mode3(const Matrix& m, Dims dims) {
  if (m.rows() != dims.n3 || m.cols() != dims.n1 * dims.n2) {
    throw Error(ErrorCode::kShapeMismatch, "matrix shape does not match mode-3 unfolding");
  }
  Tensor3 out(dims);
  Eigen::Map<Matrix>(out.data().data(), dims.n1 * dims.n2, dims.n3) = m.transpose();
  return out;
}

Matrix bvec(const Tensor3& t) {
  const auto [n1, n2, n3] = t.dims();
  Matrix out(n1 * n3, n2);
  for (Index k = 0; k < n3; ++k) out.middleRows(k * n1, n1) = t.frontal_slice(k);
  return out;
}

Tensor3 unbvec(const Matrix& m, Dims dims) {
  if (m.rows() != dims.n1 * dims.n3 || m.cols() != dims.n2) {
    throw Error(ErrorCode::kShapeMismatch, "matrix shape does not match block vector");
  }
  Tensor3 out(dims);
  for (Index k = 0; k < dims.n3; ++k) out.frontal_slice(k) = m.middleRows(k * dims.n1, dims.n1);
  return out;
}

Matrix bcirc(const Tensor3& t) {
  const auto [n1, n2, n3] = t.dims();
  Matrix out(n1 * n3, n2 * n3);
  for (Index r = 0; r < n3; ++r) {
    for (Index c = 0; c < n3; ++c) {
      const Index k = ((r - c) % n3 + n3) % n3;
      out.block(r * n1, c * n2, n1, n2) = t.frontal_slice(k);
    }
  }
  return out;
}

double fro_norm(const Tensor3& t) { return t.flat().norm(); }

double l1_norm(const Tensor3& t) { return t.flat().lpNorm<1>(); }

double linf_norm(const Tensor3& t) { return t.flat().lpNorm<Eigen::Infinity>(); }

double l21_norm(const Tensor3& t) {
  const Index plane = t.n1() * t.n2();
  const Eigen::Map<const Matrix> fibers(t.data().data(), plane, t.n3());
  return fibers.rowwise().norm().sum();
}

TensorNorms norms(const Tensor3& t) {
  return {fro_norm(t), l1_norm(t), linf_norm(t), l21_norm(t)};
}

}  // namespace etlmsc
