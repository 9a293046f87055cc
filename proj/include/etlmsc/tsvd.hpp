#pragma once

#include "etlmsc/tensor.hpp"

namespace etlmsc {

/// Factors of A = U * S * V^T under the t-product.
struct TSvdFactors {
  Tensor3 U;  ///< n1 x n1 x n3, orthogonal
  Tensor3 S;  ///< n1 x n2 x n3, f-diagonal
  Tensor3 V;  ///< n2 x n2 x n3, orthogonal
  /// Singular values of each Fourier slice, min(n1, n2) x n3, column k
  /// nonincreasing. These are the diagonals of S_f.
  Matrix singular_values_f;
};

/// t-product of A (n1 x n2 x n3) and B (n2 x n4 x n3), computed slicewise in
/// the Fourier domain.
Tensor3 t_product(const Tensor3& a, const Tensor3& b);

/// Transpose each frontal slice and reverse the order of slices 2..n3.
Tensor3 transpose_t(const Tensor3& a);

/// n x n x n3 tensor whose first frontal slice is the identity, rest zero.
Tensor3 identity_tensor(Index n, Index n3);

TSvdFactors t_svd(const Tensor3& a);

/// Sum of the nuclear norms of all n3 Fourier-domain frontal slices.
double tnn(const Tensor3& a);

struct ShrinkResult {
  Tensor3 value;
  double tnn = 0;  ///< tnn of value, available for free from the shrunk spectra
};

/// Tubal shrinkage: every singular value s of every Fourier slice of A maps to
/// max(s - theta, 0). Because the FFT is unnormalized this is the proximal map
/// of (theta / n3) * tnn, i.e. it minimizes (theta / n3) tnn(Z) + 1/2 ||Z - A||_F^2.
ShrinkResult tubal_shrink(const Tensor3& a, double theta);

}  // namespace etlmsc
