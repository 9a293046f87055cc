#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "etlmsc/error.hpp"

namespace etlmsc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

struct Dims {
  Index n1 = 0;
  Index n2 = 0;
  Index n3 = 0;

  Index size() const { return n1 * n2 * n3; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense 3-order tensor.
///
/// Layout: element (i, j, k) lives at i + n1 * (j + n2 * k), i.e. each
/// frontal slice is a contiguous column-major n1 x n2 block and slices are
/// stored one after another. Mode-3 fibers therefore have stride n1 * n2.
template <typename Scalar>
class BasicTensor3 {
 public:
  using SliceMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>;
  using ConstSliceMap = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>;
  using VectorMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;
  using ConstVectorMap = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;

  BasicTensor3() = default;

  /// Zero-initialised tensor.
  BasicTensor3(Index n1, Index n2, Index n3) : BasicTensor3(Dims{n1, n2, n3}) {}

  explicit BasicTensor3(Dims dims) : dims_(dims) {
    if (dims.n1 <= 0 || dims.n2 <= 0 || dims.n3 <= 0) {
      throw Error(ErrorCode::kShapeMismatch, "tensor dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(dims.size()), Scalar(0));
  }

  BasicTensor3(Dims dims, std::vector<Scalar> data) : dims_(dims), data_(std::move(data)) {
    if (dims.n1 <= 0 || dims.n2 <= 0 || dims.n3 <= 0 ||
        static_cast<Index>(data_.size()) != dims.size()) {
      throw Error(ErrorCode::kShapeMismatch, "data length does not match n1*n2*n3");
    }
  }

  const Dims& dims() const { return dims_; }
  Index n1() const { return dims_.n1; }
  Index n2() const { return dims_.n2; }
  Index n3() const { return dims_.n3; }
  Index size() const { return dims_.size(); }

  Scalar& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }
  const Scalar& operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }

  SliceMap frontal_slice(Index k) {
    return SliceMap(data_.data() + k * dims_.n1 * dims_.n2, dims_.n1, dims_.n2);
  }
  ConstSliceMap frontal_slice(Index k) const {
    return ConstSliceMap(data_.data() + k * dims_.n1 * dims_.n2, dims_.n1, dims_.n2);
  }

  /// Flat view over all entries, for elementwise arithmetic.
  VectorMap flat() { return VectorMap(data_.data(), size()); }
  ConstVectorMap flat() const { return ConstVectorMap(data_.data(), size()); }

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }

  BasicTensor3& operator+=(const BasicTensor3& other) {
    check_same(other);
    flat() += other.flat();
    return *this;
  }
  BasicTensor3& operator-=(const BasicTensor3& other) {
    check_same(other);
    flat() -= other.flat();
    return *this;
  }
  BasicTensor3& operator*=(Scalar s) {
    flat() *= s;
    return *this;
  }

  friend BasicTensor3 operator+(BasicTensor3 a, const BasicTensor3& b) { return a += b; }
  friend BasicTensor3 operator-(BasicTensor3 a, const BasicTensor3& b) { return a -= b; }
  friend BasicTensor3 operator*(BasicTensor3 a, Scalar s) { return a *= s; }
  friend BasicTensor3 operator*(Scalar s, BasicTensor3 a) { return a *= s; }

  friend bool operator==(const BasicTensor3&, const BasicTensor3&) = default;

 private:
  std::size_t offset(Index i, Index j, Index k) const {
    return static_cast<std::size_t>(i + dims_.n1 * (j + dims_.n2 * k));
  }
  void check_same(const BasicTensor3& other) const {
    if (other.dims_ != dims_) throw Error(ErrorCode::kShapeMismatch, "tensor dimensions differ");
  }

  Dims dims_;
  std::vector<Scalar> data_;
};

using Tensor3 = BasicTensor3<double>;
using CTensor3 = BasicTensor3<Complex>;

// Structural operators ------------------------------------------------------

/// One-step cyclic dimension shift (Matlab `shiftdim(T, 1)`):
/// out(j, k, i) = in(i, j, k), so an N x N x M stack becomes N x M x N.
Tensor3 rotate(const Tensor3& t);

/// Inverse of rotate: out(i, j, k) = in(j, k, i).
Tensor3 unrotate(const Tensor3& t);

/// Mode-3 matricization, shape n3 x (n1 * n2). Column c = i + n1 * j holds the
/// fiber T(i, j, :).
Matrix matricize_mode3(const Tensor3& t);
Tensor3 fold_mode3(const Matrix& m, Dims dims);

/// Frontal slices stacked top to bottom, shape (n1 * n3) x n2.
Matrix bvec(const Tensor3& t);
Tensor3 unbvec(const Matrix& m, Dims dims);

/// Block circulant embedding, shape (n1 * n3) x (n2 * n3). Block (r, c) is
/// frontal slice (r - c) mod n3. Quadratic in n3; meant for checking t-products.
Matrix bcirc(const Tensor3& t);

// Norms -----------------------------------------------------------------------

struct TensorNorms {
  double fro = 0;
  double l1 = 0;
  double linf = 0;
  double l21_mode3 = 0;
};

double fro_norm(const Tensor3& t);
double l1_norm(const Tensor3& t);
double linf_norm(const Tensor3& t);
/// Sum over (i, j) of the Euclidean norm of the fiber T(i, j, :).
double l21_norm(const Tensor3& t);
TensorNorms norms(const Tensor3& t);

// Mode-3 FFT ------------------------------------------------------------------

/// Unnormalized DFT of every mode-3 fiber. The result has full length n3 and
/// is conjugate symmetric: slice k and slice n3 - k are conjugates.
CTensor3 fft_mode3(const Tensor3& t);

/// Inverse of fft_mode3 (scaled by 1 / n3). Throws IfftNotReal when the
/// largest imaginary magnitude exceeds 1e-8 * max |F|.
Tensor3 ifft_mode3(const CTensor3& f);

/// Half spectrum: slices 0 .. n3 / 2 of fft_mode3(t).
CTensor3 rfft_mode3(const Tensor3& t);

/// Inverse of rfft_mode3 for a real signal of length n3. Imaginary parts of
/// the self-conjugate slices (0, and n3 / 2 for even n3) are dropped.
Tensor3 irfft_mode3(const CTensor3& half, Index n3);

/// Number of slices in the half spectrum of a length-n3 signal.
inline Index half_spectrum_size(Index n3) { return n3 / 2 + 1; }

/// Multiplicity of half-spectrum slice k inside the full spectrum (1 for
/// self-conjugate slices, 2 otherwise).
inline int spectrum_weight(Index k, Index n3) {
  return (k == 0 || (n3 % 2 == 0 && k == n3 / 2)) ? 1 : 2;
}

}  // namespace etlmsc
