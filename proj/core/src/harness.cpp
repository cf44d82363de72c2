#include "kglab/harness.hpp"

#include <algorithm>
#include <cmath>

namespace kglab::harness {

using interaction::polarization_vector;
using interaction::select_xi0;
using model::solve_phase;

Vec3Grid build_v0(const V0Spec& spec, const Grid1D& grid, const Phase& phase,
                  const ModelParams& params) {
  const Vec3c e1 = polarization_vector(1, phase, params);
  ArrayXc f0(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const Real s = (grid.x(i) - spec.center) / spec.width;
    f0(i) = spec.height * std::exp(-s * s);
  }
  return outer(f0, e1);
}

Perturbation build_perturbation(const ExperimentConfig& cfg, Real eps_eff, const Phase& phase,
                                const interaction::Xi0Selection& sel, const ArrayXc& dtg0,
                                Real carrier_shift, bool kernel_orthogonal) {
  const Grid1D& grid = cfg.grid;
  Perturbation pert;

  // x0 maximizes |dt_g(0,.)| over the grid.
  Eigen::Index imax = 0;
  dtg0.abs().maxCoeff(&imax);
  pert.x0 = grid.x(static_cast<int>(imax));

  // Psi must sit inside the phi1 plateau.
  if (cfg.psi.radius > 0.5 * cfg.phi1_radius)
    throw std::invalid_argument("build_perturbation: Psi support exceeds the phi1 plateau");

  const Real xi_target = sel.xi0 + 3.0 * phase.k + carrier_shift;
  const Real kappa_exact = xi_target / eps_eff;
  const long m = std::lround(kappa_exact * grid.length / (2.0 * M_PI));
  pert.carrier = 2.0 * M_PI * m / grid.length;
  if (std::abs(pert.carrier) >= 2.0 * M_PI * (grid.n_points / 3) / grid.length)
    throw std::invalid_argument("build_perturbation: carrier exceeds the dealiased band");

  Vec3c e0 = model::kernel_vector(Family::L, Branch::Plus, sel.xi0 + 3.0 * phase.k, cfg.params);
  if (kernel_orthogonal)
    e0 = model::kernel_vector(Family::L, Branch::Minus, sel.xi0 + 3.0 * phase.k, cfg.params);
  e0.normalize();
  pert.e0 = e0;

  pert.delta.u.setZero(grid.n_points);
  pert.delta.v.setZero(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const Real x = grid.x(i);
    const Real psi = quintic_bump(x - pert.x0, 0.5 * cfg.psi.radius, cfg.psi.radius);
    if (psi == 0.0) continue;
    const Complex c = psi * std::exp(I * pert.carrier * x);
    pert.delta.u.c0(i) = (c * e0(0)).real();
    pert.delta.u.c1(i) = (c * e0(1)).real();
    pert.delta.u.c2(i) = (c * e0(2)).real();
  }
  pert.norm = pert.delta.l2_norm(grid.dx());
  return pert;
}

RateFit fit_rate(const std::vector<TimePoint>& series, Real eps, Real horizon, Real lo, Real hi,
                 Real saturation_threshold) {
  RateFit fit;
  fit.window_lo = lo * horizon;
  fit.window_hi = hi * horizon;

  // Shrink the window from the right while the tail is saturated.
  Real hi_t = fit.window_hi;
  for (const auto& p : series)
    if (p.t >= fit.window_lo && p.t <= hi_t && p.deviation > saturation_threshold) {
      hi_t = std::min(hi_t, p.t);
      fit.saturated = true;
    }
  fit.window_hi = hi_t;

  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  const Real se = std::sqrt(eps);
  for (const auto& p : series) {
    if (p.t < fit.window_lo || p.t > fit.window_hi) continue;
    if (!(p.deviation > 0.0)) continue;
    const Real x = p.t * p.t / (2.0 * se);
    const Real y = std::log(p.deviation);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2) {
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  return fit;
}

Prediction predict(const ExperimentConfig& cfg) {
  Prediction pr;
  pr.phase = solve_phase(cfg.params);
  pr.sel = select_xi0(pr.phase, cfg.params);
  const Vec3Grid v0 = build_v0(cfg.v0, cfg.grid, pr.phase, cfg.params);
  const ArrayXc dtg0 = interaction::dt_g_at_zero(v0, pr.phase, cfg.params);
  pr.Gamma1 = interaction::Gamma1(dtg0, pr.phase, cfg.params);
  Eigen::Index imax = 0;
  dtg0.abs().maxCoeff(&imax);
  pr.x0 = cfg.grid.x(static_cast<int>(imax));
  pr.T0_star = std::sqrt(2.0 * (cfg.K - 0.75) / pr.Gamma1);
  return pr;
}

namespace {

struct PreparedRun {
  ModelParams params;          // with effective epsilon
  Phase phase;
  interaction::Xi0Selection sel;
  wkb::WKBSolution wkb0;
  ArrayXc dtg0;
  Real Gamma1 = 0.0;
  Real horizon = 0.0;          // physical time
  Real T0_star = 0.0;
};

PreparedRun prepare(const ExperimentConfig& cfg, Real eps_nominal) {
  PreparedRun pre;
  pre.params = cfg.params;
  pre.phase = solve_phase(cfg.params);
  pre.params.epsilon = wkb::snap_epsilon(eps_nominal, pre.phase, cfg.grid);
  pre.sel = select_xi0(pre.phase, pre.params);

  const Vec3Grid v0 = build_v0(cfg.v0, cfg.grid, pre.phase, pre.params);
  pre.wkb0 = wkb::cascade_init(cfg.grid, pre.params, pre.phase, v0);
  pre.dtg0 = interaction::dt_g_at_zero(v0, pre.phase, pre.params);
  pre.Gamma1 = interaction::Gamma1(pre.dtg0, pre.phase, pre.params);
  pre.T0_star = std::sqrt(2.0 * (cfg.K - 0.75) / pre.Gamma1);
  const Real eps = pre.params.epsilon;
  pre.horizon = cfg.T0_factor * pre.T0_star * std::pow(eps, 0.25) *
                std::sqrt(std::abs(std::log(eps)));
  return pre;
}

// Advances a WKB reference lazily so the solver can query it at any time.
class WkbReference {
 public:
  WkbReference(wkb::WKBSolution sol, int levels)
      : sol_(std::move(sol)), levels_(levels) {
    const Real vmax =
        std::max(std::abs(model::group_velocity(Family::L, 3.0 * sol_.phase.k, sol_.params)),
                 std::abs(model::group_velocity(Family::M, sol_.phase.k, sol_.params)));
    dt_cfl_ = 0.5 * sol_.grid.dx() / vmax;
  }

  solver::FieldState operator()(Real t) {
    if (t > sol_.t + 1e-14) {
      const Real span = t - sol_.t;
      const int n = std::max(1, static_cast<int>(std::ceil(span / dt_cfl_)));
      wkb::transport_advance(sol_, span / n, n);
      sol_.t = t;  // absorb roundoff drift
    }
    return wkb::evaluate_wkb(sol_, sol_.params.epsilon, levels_);
  }

  const wkb::WKBSolution& state() const { return sol_; }

 private:
  wkb::WKBSolution sol_;
  int levels_;
  Real dt_cfl_;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, Real eps_nominal,
                                Real carrier_shift, bool kernel_orthogonal, bool twin_metric,
                                Real perturbation_scale = 1.0) {
  PreparedRun pre = prepare(cfg, eps_nominal);
  const Real eps = pre.params.epsilon;

  Perturbation pert = build_perturbation(cfg, eps, pre.phase, pre.sel, pre.dtg0, carrier_shift,
                                         kernel_orthogonal);
  const Real amp = perturbation_scale * std::pow(eps, cfg.K);

  solver::FieldState init = wkb::evaluate_wkb(pre.wkb0, eps, cfg.wkb_levels);
  init.t = 0.0;
  solver::FieldState perturbed = init;
  perturbed.u.c0 += amp * pert.delta.u.c0;
  perturbed.u.c1 += amp * pert.delta.u.c1;
  perturbed.u.c2 += amp * pert.delta.u.c2;

  solver::SolverConfig scfg;
  scfg.grid = cfg.grid;
  scfg.c_dt = cfg.c_dt;
  scfg.t_end = pre.horizon;
  scfg.dealias = cfg.dealias;
  const Real dt = scfg.c_dt * eps;
  const long n_steps = std::lround(std::ceil(pre.horizon / dt - 1e-12));
  const int stride = std::max(1L, n_steps / std::max(1, cfg.record_count));

  solver::KgSolver ks(cfg.grid, pre.params);
  solver::SpectralWindow win;
  win.center_freq = std::abs(pert.carrier);
  win.half_width = symflow::make_window(symflow::FlowKind::PlusPlus, pre.sel, pre.phase,
                                        cfg.h_factor)
                       .radius /
                   eps;

  ExperimentResult result;
  result.x0 = pert.x0;
  result.xi0 = pre.sel.xi0;

  solver::RunResult run;
  if (twin_metric) {
    // Reference = the unperturbed direct solve; cancels the WKB model error.
    std::vector<solver::FieldState> base_states;
    base_states.push_back(init);
    {
      solver::FieldState s = init;
      solver::KgSolver ks2(cfg.grid, pre.params);
      for (long i = 0; i < n_steps; ++i) {
        ks2.step(s, dt, scfg.nonlinear, scfg.dealias);
        if ((i + 1) % stride == 0 || i + 1 == n_steps) base_states.push_back(s);
      }
    }
    std::size_t cursor = 0;
    std::function<solver::FieldState(Real)> ref = [&](Real t) {
      // Records occur at the same stride; match by time.
      for (std::size_t i = cursor; i < base_states.size(); ++i)
        if (std::abs(base_states[i].t - t) < 0.25 * dt) {
          cursor = i;
          return base_states[i];
        }
      return base_states.back();
    };
    run = ks.run(perturbed, scfg, stride, &ref, win);
    result.fit.metric = "twin";
  } else {
    WkbReference ref(pre.wkb0, cfg.wkb_levels);
    std::function<solver::FieldState(Real)> fn = [&ref](Real t) { return ref(t); };
    run = ks.run(perturbed, scfg, stride, &fn, win);
    result.fit.metric = "vs_wkb";
  }

  for (const auto& o : run.series)
    result.series.push_back({o.t, o.deviation, o.deviation_window, o.l2});
  result.d0 = result.series.front().deviation;

  const Real saturation = std::pow(eps, 0.25);
  const RateFit fit = fit_rate(result.series, eps, pre.horizon, cfg.fit_lo, cfg.fit_hi,
                               saturation);
  result.fit.epsilon = eps;
  result.fit.epsilon_nominal = eps_nominal;
  result.fit.Gamma1_predicted = pre.Gamma1;
  result.fit.slope_fitted = fit.slope;
  result.fit.intercept = fit.intercept;
  result.fit.fit_window_lo = fit.window_lo;
  result.fit.fit_window_hi = fit.window_hi;
  result.fit.saturated = fit.saturated;
  result.fit.horizon = pre.horizon;

  Real dmax = 0.0;
  for (const auto& p : result.series) dmax = std::max(dmax, p.deviation);
  result.fit.amplification_factor = result.d0 > 0.0 ? dmax / result.d0 : 0.0;
  result.fit.verdict = result.fit.slope_fitted >= cfg.slope_band_lo * pre.Gamma1 &&
                       result.fit.slope_fitted <= cfg.slope_band_hi * pre.Gamma1 &&
                       result.fit.amplification_factor >= cfg.min_amplification;
  return result;
}

}  // namespace

ExperimentResult instability_experiment(const ExperimentConfig& cfg, Real eps_nominal) {
  return run_experiment(cfg, eps_nominal, 0.0, false, cfg.twin_reference);
}

ControlResult control_experiment(const ExperimentConfig& cfg, Real eps_nominal,
                                 ControlKind kind) {
  ControlResult out;
  out.kind = kind;
  switch (kind) {
    case ControlKind::OffResonance: {
      // Move the carrier until it clears every resonance window by > 2h.
      PreparedRun pre = prepare(cfg, eps_nominal);
      const auto win =
          symflow::make_window(symflow::FlowKind::PlusPlus, pre.sel, pre.phase, cfg.h_factor);
      const Real h = win.radius;
      const std::vector<Real> pts = {-6.0 * pre.phase.k, 6.0 * pre.phase.k, pre.sel.xi2,
                                     pre.sel.xi3,        -pre.sel.xi2,      -pre.sel.xi3};
      Real shift = 5.0 * h;
      auto clear = [&](Real s) {
        const Real xi = pre.sel.xi0 + s;
        for (Real p : pts)
          if (std::abs(xi - p) <= 2.0 * h) return false;
        return true;
      };
      while (!clear(shift)) shift += h;
      out.run = run_experiment(cfg, eps_nominal, shift, false, true);
      out.pass = out.run.fit.amplification_factor < 2.0;
      break;
    }
    case ControlKind::KernelOrthogonal: {
      out.run = run_experiment(cfg, eps_nominal, 0.0, true, true);
      const ExperimentResult main = run_experiment(cfg, eps_nominal, 0.0, false, true);
      out.pass = out.run.fit.slope_fitted < main.fit.slope_fitted;
      break;
    }
    case ControlKind::ZeroPerturbation: {
      out.run = run_experiment(cfg, eps_nominal, 0.0, false, true, 0.0);
      Real dmax = 0.0;
      for (const auto& p : out.run.series) dmax = std::max(dmax, p.deviation);
      out.pass = dmax < 1e-10;
      break;
    }
  }
  return out;
}

SweepResult epsilon_sweep(const ExperimentConfig& cfg, std::vector<Real> epsilons) {
  if (epsilons.empty()) throw std::invalid_argument("epsilon_sweep: empty epsilon list");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<Real>());

  SweepResult sweep;
  sweep.all_verdicts = true;
  for (Real e : epsilons) {
    const ExperimentResult r = instability_experiment(cfg, e);
    sweep.reports.push_back(r.fit);
    sweep.all_verdicts = sweep.all_verdicts && r.fit.verdict;
  }
  sweep.trend_ok = true;
  if (sweep.reports.size() >= 2) {
    for (std::size_t i = 1; i < sweep.reports.size(); ++i) {
      const Real g = sweep.reports[i].Gamma1_predicted;
      const Real prev = std::abs(sweep.reports[i - 1].slope_fitted - g);
      const Real cur = std::abs(sweep.reports[i].slope_fitted - g);
      if (cur > prev + 0.10 * g) sweep.trend_ok = false;
    }
  }
  return sweep;
}

}  // namespace kglab::harness
