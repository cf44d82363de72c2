#pragma once

#include "kglab/types.hpp"

#include <fftw3.h>

#include <memory>
#include <stdexcept>

namespace kglab {

/// Periodic grid on [-X/2, X/2) with a power-of-two point count, so the dual
/// frequencies 2*pi*m/X are exactly representable.
struct Grid1D {
  Real length = 8.0;
  int n_points = 4096;

  void validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("Grid1D: length must be positive");
    if (n_points < 2 || (n_points & (n_points - 1)) != 0)
      throw std::invalid_argument("Grid1D: n_points must be a power of two");
  }

  Real dx() const { return length / n_points; }
  Real x(int i) const { return -0.5 * length + i * dx(); }
  ArrayXr points() const {
    ArrayXr xs(n_points);
    for (int i = 0; i < n_points; ++i) xs(i) = x(i);
    return xs;
  }
  /// Signed mode index of FFT bin j.
  int mode(int j) const { return j < n_points / 2 ? j : j - n_points; }
  /// Dual frequency of FFT bin j.
  Real freq(int j) const { return 2.0 * M_PI * mode(j) / length; }
  ArrayXr freqs() const {
    ArrayXr f(n_points);
    for (int j = 0; j < n_points; ++j) f(j) = freq(j);
    return f;
  }
};

/// Thin RAII wrapper around FFTW complex transforms. Plans are created with
/// FFTW_ESTIMATE for reproducible output and may be executed on any buffer of
/// the planned size.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }

  /// Unnormalized forward transform (sum convention).
  void forward(const ArrayXc& in, ArrayXc& out) const;
  /// Inverse transform normalized by 1/n.
  void inverse(const ArrayXc& in, ArrayXc& out) const;

  ArrayXc forward(const ArrayXc& in) const {
    ArrayXc out(n_);
    forward(in, out);
    return out;
  }
  ArrayXc inverse(const ArrayXc& in) const {
    ArrayXc out(n_);
    inverse(in, out);
    return out;
  }

  /// Spectral derivative: multiply by i*freq per mode.
  ArrayXc derivative(const ArrayXc& physical, const Grid1D& grid) const;

 private:
  int n_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

/// C^2 bump built from the quintic smoothstep: identically 1 for
/// |r| <= r_inner, identically 0 for |r| >= r_outer, monotone in between.
Real quintic_bump(Real r, Real r_inner, Real r_outer);

}  // namespace kglab
