#pragma once

#include "kglab/field.hpp"
#include "kglab/grid.hpp"
#include "kglab/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kglab::solver {

using model::ModelParams;

/// Real 6-component grid field of the coupled system.
struct FieldState {
  RealField3 u, v;
  Real t = 0.0;

  Real l2_norm(Real dx) const;
  Real linf_norm() const;
};

struct SolverConfig {
  Grid1D grid;
  Real dt = 0.0;           // defaults to c_dt * epsilon when zero
  Real c_dt = 0.1;
  Real t_end = 1.0;
  bool dealias = true;
  bool nonlinear = true;
  Real blowup_guard = 1e8;
};

/// Exact one-mode propagator of the stiff linear part: the matrix exponential
/// exp(-dt * (A0/eps + i*xi_phys*A)) evaluated through the spectral
/// decomposition at eta = eps*xi_phys. Unitary.
Mat3c linear_propagator(Family family, Real xi_phys, Real dt, const ModelParams& params);

struct Observation {
  Real t;
  Real l2;
  Real linf;
  Real deviation;           // vs. reference callback, -1 when absent
  Real deviation_window;    // spectral window norm, -1 when absent
};

struct RunResult {
  std::vector<FieldState> snapshots;
  std::vector<Observation> series;
  bool completed = true;
  std::string failure;
};

/// Spectral-window deviation options: measures the L2 content of the
/// deviation restricted to modes within +-half_width of +-center_freq.
struct SpectralWindow {
  Real center_freq = 0.0;
  Real half_width = 0.0;
};

class KgSolver {
 public:
  KgSolver(const Grid1D& grid, const ModelParams& params);

  /// One Lawson-RK4 step of length dt.
  void step(FieldState& state, Real dt, bool nonlinear = true, bool dealias = true);

  /// Advance to config.t_end, recording observables every record_stride steps.
  /// `reference` (optional) supplies the comparison field at time t.
  RunResult run(FieldState initial, const SolverConfig& config, int record_stride,
                const std::function<FieldState(Real)>* reference = nullptr,
                std::optional<SpectralWindow> window = std::nullopt,
                int snapshot_stride = 0);

  const Grid1D& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }

 private:
  struct StagePropagators;
  void ensure_propagators(Real dt);
  void nonlinearity(const std::vector<ArrayXc>& what, std::vector<ArrayXc>& nhat, bool dealias);

  Grid1D grid_;
  ModelParams params_;
  Fft fft_;
  Real cached_dt_ = -1.0;
  // Per-mode 3x3 propagators for dt and dt/2, both families.
  std::vector<Mat3c> eu_full_, eu_half_, ev_full_, ev_half_;
  ArrayXr dealias_mask_;
};

/// Scalar degenerate model d_t w + i*t*eps^{-1/2} d_x w = 0: per Fourier mode
/// the amplitude obeys w' = (t*xi/sqrt(eps)) w, growing like
/// exp(t^2 xi / (2 sqrt(eps))). `toy_run` integrates each mode with the RK4
/// core; `toy_exact` evaluates the closed form.
ArrayXc toy_run(const Grid1D& grid, Real eps, const ArrayXc& w0, Real t_end, Real dt);
ArrayXc toy_exact(const Grid1D& grid, Real eps, const ArrayXc& w0, Real t);

}  // namespace kglab::solver
