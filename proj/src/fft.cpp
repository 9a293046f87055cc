#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "etlmsc/tensor.hpp"

namespace etlmsc {
namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw Error(ErrorCode::kInvalidArgument, "FFTW failed to create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

CTensor3 rfft_mode3(const Tensor3& t) {
  const auto [n1, n2, n3] = t.dims();
  const int n = static_cast<int>(n3);
  const int howmany = static_cast<int>(n1 * n2);
  const Index half = half_spectrum_size(n3);

  // FFTW_ESTIMATE never touches the arrays, so planning on the real buffers is safe.
  std::vector<double> in(t.data().begin(), t.data().end());
  CTensor3 out(n1, n2, half);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_many_dft_r2c(1, &n, howmany, in.data(), nullptr, howmany, 1,
                                 as_fftw(out.data().data()), nullptr, howmany, 1, FFTW_ESTIMATE);
  }
  Plan plan(raw);
  plan.execute();
  return out;
}

Tensor3 irfft_mode3(const CTensor3& half, Index n3) {
  const auto [n1, n2, h] = half.dims();
  if (h != half_spectrum_size(n3)) {
    throw Error(ErrorCode::kShapeMismatch, "half spectrum length does not match n3");
  }
  const int n = static_cast<int>(n3);
  const int howmany = static_cast<int>(n1 * n2);

  // c2r overwrites its input.
  CTensor3 in = half;
  Tensor3 out(n1, n2, n3);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_many_dft_c2r(1, &n, howmany, as_fftw(in.data().data()), nullptr, howmany, 1,
                                 out.data().data(), nullptr, howmany, 1, FFTW_ESTIMATE);
  }
  Plan plan(raw);
  plan.execute();
  out *= 1.0 / static_cast<double>(n3);
  return out;
}

CTensor3 fft_mode3(const Tensor3& t) {
  const auto [n1, n2, n3] = t.dims();
  const CTensor3 half = rfft_mode3(t);
  CTensor3 full(n1, n2, n3);
  const Index h = half.n3();
  for (Index k = 0; k < h; ++k) full.frontal_slice(k) = half.frontal_slice(k);
  for (Index k = h; k < n3; ++k) full.frontal_slice(k) = half.frontal_slice(n3 - k).conjugate();
  return full;
}

Tensor3 ifft_mode3(const CTensor3& f) {
  const auto [n1, n2, n3] = f.dims();
  const int n = static_cast<int>(n3);
  const int howmany = static_cast<int>(n1 * n2);

  CTensor3 in = f;
  CTensor3 out(n1, n2, n3);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_many_dft(1, &n, howmany, as_fftw(in.data().data()), nullptr, howmany, 1,
                             as_fftw(out.data().data()), nullptr, howmany, 1, FFTW_BACKWARD,
                             FFTW_ESTIMATE);
  }
  Plan plan(raw);
  plan.execute();

  double max_abs = 0;
  for (const Complex& z : f.data()) max_abs = std::max(max_abs, std::abs(z));
  const double scale = 1.0 / static_cast<double>(n3);
  double max_imag = 0;
  Tensor3 real(n1, n2, n3);
  auto dst = real.data();
  auto src = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i].real() * scale;
    max_imag = std::max(max_imag, std::abs(src[i].imag()) * scale);
  }
  if (max_imag > 1e-8 * max_abs) {
    std::ostringstream msg;
    msg << "inverse FFT has imaginary residual " << max_imag << " (max |F| = " << max_abs << ")";
    throw Error(ErrorCode::kIfftNotReal, msg.str());
  }
  return real;
}

}  // namespace etlmsc
