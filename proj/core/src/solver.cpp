#include "kglab/solver.hpp"

#include <cmath>

namespace kglab::solver {

using model::projector;

Real FieldState::l2_norm(Real dx) const {
  const Real s = u.c0.square().sum() + u.c1.square().sum() + u.c2.square().sum() +
                 v.c0.square().sum() + v.c1.square().sum() + v.c2.square().sum();
  return std::sqrt(s * dx);
}

Real FieldState::linf_norm() const {
  return std::max({u.c0.abs().maxCoeff(), u.c1.abs().maxCoeff(), u.c2.abs().maxCoeff(),
                   v.c0.abs().maxCoeff(), v.c1.abs().maxCoeff(), v.c2.abs().maxCoeff()});
}

Mat3c linear_propagator(Family family, Real xi_phys, Real dt, const ModelParams& params) {
  const Real eta = params.epsilon * xi_phys;
  const Real lam = model::dispersion(family, eta, params);
  const Real phi = dt * lam / params.epsilon;
  const Mat3c Pp = projector({family, Branch::Plus}, -eta, params);
  const Mat3c Pm = projector({family, Branch::Minus}, -eta, params);
  const Mat3c P0 = projector({family, Branch::Zero}, -eta, params);
  return P0 + std::exp(-I * phi) * Pp + std::exp(I * phi) * Pm;
}

KgSolver::KgSolver(const Grid1D& grid, const ModelParams& params)
    : grid_(grid), params_(params), fft_(grid.n_points) {
  grid_.validate();
  params_.validate();
  dealias_mask_ = ArrayXr::Ones(grid_.n_points);
  for (int j = 0; j < grid_.n_points; ++j)
    if (std::abs(grid_.mode(j)) > grid_.n_points / 3) dealias_mask_(j) = 0.0;
}

void KgSolver::ensure_propagators(Real dt) {
  if (dt == cached_dt_) return;
  const int n = grid_.n_points;
  eu_full_.resize(n);
  eu_half_.resize(n);
  ev_full_.resize(n);
  ev_half_.resize(n);
  for (int j = 0; j < n; ++j) {
    const Real xi = grid_.freq(j);
    eu_full_[j] = linear_propagator(Family::L, xi, dt, params_);
    eu_half_[j] = linear_propagator(Family::L, xi, 0.5 * dt, params_);
    ev_full_[j] = linear_propagator(Family::M, xi, dt, params_);
    ev_half_[j] = linear_propagator(Family::M, xi, 0.5 * dt, params_);
  }
  cached_dt_ = dt;
}

namespace {

// Fourier-space state layout: components 0..2 are u, 3..5 are v.
void apply_block(const std::vector<Mat3c>& E, std::vector<ArrayXc>& w, int offset) {
  const int n = static_cast<int>(w[0].size());
  for (int j = 0; j < n; ++j) {
    const Vec3c in(w[offset + 0](j), w[offset + 1](j), w[offset + 2](j));
    const Vec3c out = E[j] * in;
    w[offset + 0](j) = out(0);
    w[offset + 1](j) = out(1);
    w[offset + 2](j) = out(2);
  }
}

std::vector<ArrayXc> axpy(const std::vector<ArrayXc>& a, Real s, const std::vector<ArrayXc>& b) {
  std::vector<ArrayXc> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
  return out;
}

}  // namespace

void KgSolver::nonlinearity(const std::vector<ArrayXc>& what, std::vector<ArrayXc>& nhat,
                            bool dealias) {
  const Real amp = 1.0 / std::sqrt(params_.epsilon);
  ArrayXc u1 = fft_.inverse(what[1]);
  ArrayXc u2 = fft_.inverse(what[2]);
  ArrayXc v1 = fft_.inverse(what[4]);
  ArrayXc v2 = fft_.inverse(what[5]);

  // u-block source: (u3 + v3) v3; v-block source: v2^2 - u2^2.
  ArrayXc pu = (u2 + v2) * v2 * amp;
  ArrayXc pv = (v1 * v1 - u1 * u1) * amp;

  const Eigen::Index n = what[0].size();
  for (auto& c : nhat) c = ArrayXc::Zero(n);
  nhat[1] = fft_.forward(pu);
  nhat[4] = fft_.forward(pv);
  if (dealias) {
    nhat[1] *= dealias_mask_;
    nhat[4] *= dealias_mask_;
  }
}

void KgSolver::step(FieldState& state, Real dt, bool nonlinear, bool dealias) {
  ensure_propagators(dt);
  const int n = grid_.n_points;

  std::vector<ArrayXc> w(6);
  w[0] = fft_.forward(state.u.c0.cast<Complex>());
  w[1] = fft_.forward(state.u.c1.cast<Complex>());
  w[2] = fft_.forward(state.u.c2.cast<Complex>());
  w[3] = fft_.forward(state.v.c0.cast<Complex>());
  w[4] = fft_.forward(state.v.c1.cast<Complex>());
  w[5] = fft_.forward(state.v.c2.cast<Complex>());

  auto apply_E = [&](std::vector<ArrayXc>& s, bool half) {
    apply_block(half ? eu_half_ : eu_full_, s, 0);
    apply_block(half ? ev_half_ : ev_full_, s, 3);
  };

  if (!nonlinear) {
    apply_E(w, false);
  } else {
    std::vector<ArrayXc> b1(6), b2(6), b3(6), b4(6);
    nonlinearity(w, b1, dealias);

    std::vector<ArrayXc> s2 = axpy(w, 0.5 * dt, b1);
    apply_E(s2, true);
    nonlinearity(s2, b2, dealias);

    std::vector<ArrayXc> wh = w;
    apply_E(wh, true);
    std::vector<ArrayXc> s3 = axpy(wh, 0.5 * dt, b2);
    nonlinearity(s3, b3, dealias);

    std::vector<ArrayXc> b3h = b3;
    apply_block(eu_half_, b3h, 0);
    apply_block(ev_half_, b3h, 3);
    std::vector<ArrayXc> wf = w;
    apply_E(wf, false);
    std::vector<ArrayXc> s4 = axpy(wf, dt, b3h);
    nonlinearity(s4, b4, dealias);

    apply_E(b1, false);  // E1 * b1
    apply_block(eu_half_, b2, 0);
    apply_block(ev_half_, b2, 3);
    apply_block(eu_half_, b3, 0);
    apply_block(ev_half_, b3, 3);

    for (int c = 0; c < 6; ++c)
      w[c] = wf[c] + (dt / 6.0) * (b1[c] + 2.0 * b2[c] + 2.0 * b3[c] + b4[c]);
  }

  state.u.c0 = fft_.inverse(w[0]).real();
  state.u.c1 = fft_.inverse(w[1]).real();
  state.u.c2 = fft_.inverse(w[2]).real();
  state.v.c0 = fft_.inverse(w[3]).real();
  state.v.c1 = fft_.inverse(w[4]).real();
  state.v.c2 = fft_.inverse(w[5]).real();
  state.t += dt;

  const Real m = state.linf_norm();
  if (!std::isfinite(m)) throw std::runtime_error("KgSolver::step: NaN guard tripped");
  if (m > 1e8) throw std::runtime_error("KgSolver::step: blow-up guard tripped");
  (void)n;
}

namespace {

Real window_deviation(const Fft& fft, const Grid1D& grid, const FieldState& a,
                      const FieldState& b, const SpectralWindow& win) {
  auto comp = [&](const ArrayXr& pa, const ArrayXr& pb) {
    ArrayXc hat = fft.forward((pa - pb).cast<Complex>());
    Real s = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
      const Real f = grid.freq(j);
      if (std::abs(std::abs(f) - win.center_freq) <= win.half_width) s += std::norm(hat(j));
    }
    return s;
  };
  Real s = comp(a.u.c0, b.u.c0) + comp(a.u.c1, b.u.c1) + comp(a.u.c2, b.u.c2) +
           comp(a.v.c0, b.v.c0) + comp(a.v.c1, b.v.c1) + comp(a.v.c2, b.v.c2);
  // Parseval: grid L2 norm = sqrt(sum |hat|^2 * dx / n).
  return std::sqrt(s * grid.dx() / grid.n_points);
}

}  // namespace

RunResult KgSolver::run(FieldState initial, const SolverConfig& config, int record_stride,
                        const std::function<FieldState(Real)>* reference,
                        std::optional<SpectralWindow> window, int snapshot_stride) {
  RunResult result;
  FieldState state = std::move(initial);
  const Real dt = config.dt > 0.0 ? config.dt : config.c_dt * params_.epsilon;
  const long n_steps = std::lround(std::ceil(config.t_end / dt - 1e-12));

  auto record = [&]() {
    Observation obs;
    obs.t = state.t;
    obs.l2 = state.l2_norm(grid_.dx());
    obs.linf = state.linf_norm();
    obs.deviation = -1.0;
    obs.deviation_window = -1.0;
    if (reference) {
      const FieldState ref = (*reference)(state.t);
      FieldState diff = state;
      diff.u.c0 -= ref.u.c0;
      diff.u.c1 -= ref.u.c1;
      diff.u.c2 -= ref.u.c2;
      diff.v.c0 -= ref.v.c0;
      diff.v.c1 -= ref.v.c1;
      diff.v.c2 -= ref.v.c2;
      obs.deviation = diff.l2_norm(grid_.dx());
      if (window) obs.deviation_window = window_deviation(fft_, grid_, state, ref, *window);
    }
    result.series.push_back(obs);
  };

  record();
  try {
    for (long i = 0; i < n_steps; ++i) {
      step(state, dt, config.nonlinear, config.dealias);
      if (record_stride > 0 && ((i + 1) % record_stride == 0 || i + 1 == n_steps)) record();
      if (snapshot_stride > 0 && (i + 1) % snapshot_stride == 0) result.snapshots.push_back(state);
    }
  } catch (const std::exception& e) {
    result.completed = false;
    result.failure = e.what();
  }
  if (result.snapshots.empty() || result.completed) result.snapshots.push_back(state);
  return result;
}

ArrayXc toy_run(const Grid1D& grid, Real eps, const ArrayXc& w0, Real t_end, Real dt) {
  Fft fft(grid.n_points);
  ArrayXc hat = fft.forward(w0);
  const Real se = std::sqrt(eps);
  const long n_steps = std::lround(std::ceil(t_end / dt - 1e-12));
  // Modewise RK4 on w' = (t*xi/sqrt(eps)) w.
  for (int j = 0; j < grid.n_points; ++j) {
    const Real c = grid.freq(j) / se;
    Complex w = hat(j);
    Real t = 0.0;
    for (long i = 0; i < n_steps; ++i) {
      const Complex k1 = c * t * w;
      const Complex k2 = c * (t + 0.5 * dt) * (w + 0.5 * dt * k1);
      const Complex k3 = c * (t + 0.5 * dt) * (w + 0.5 * dt * k2);
      const Complex k4 = c * (t + dt) * (w + dt * k3);
      w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += dt;
    }
    hat(j) = w;
  }
  return fft.inverse(hat);
}

ArrayXc toy_exact(const Grid1D& grid, Real eps, const ArrayXc& w0, Real t) {
  Fft fft(grid.n_points);
  ArrayXc hat = fft.forward(w0);
  for (int j = 0; j < grid.n_points; ++j)
    hat(j) *= std::exp(t * t * grid.freq(j) / (2.0 * std::sqrt(eps)));
  return fft.inverse(hat);
}

}  // namespace kglab::solver
