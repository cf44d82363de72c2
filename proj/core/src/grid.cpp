#include "kglab/grid.hpp"

namespace kglab {

Fft::Fft(int n) : n_(n) {
  ArrayXc scratch_in = ArrayXc::Zero(n);
  ArrayXc scratch_out = ArrayXc::Zero(n);
  auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
  // FFTW_UNALIGNED so the plans run on any Eigen buffer of matching size.
  fwd_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_ || !bwd_) throw std::runtime_error("Fft: plan creation failed");
}

Fft::~Fft() {
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
}

void Fft::forward(const ArrayXc& in, ArrayXc& out) const {
  if (in.size() != n_) throw std::invalid_argument("Fft::forward: size mismatch");
  out.resize(n_);
  fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void Fft::inverse(const ArrayXc& in, ArrayXc& out) const {
  if (in.size() != n_) throw std::invalid_argument("Fft::inverse: size mismatch");
  out.resize(n_);
  fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  out /= static_cast<Real>(n_);
}

ArrayXc Fft::derivative(const ArrayXc& physical, const Grid1D& grid) const {
  ArrayXc hat = forward(physical);
  for (int j = 0; j < n_; ++j) hat(j) *= I * grid.freq(j);
  return inverse(hat);
}

Real quintic_bump(Real r, Real r_inner, Real r_outer) {
  const Real a = std::abs(r);
  if (a <= r_inner) return 1.0;
  if (a >= r_outer) return 0.0;
  const Real s = (a - r_inner) / (r_outer - r_inner);
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

}  // namespace kglab
