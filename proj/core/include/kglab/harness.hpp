#pragma once

#include "kglab/solver.hpp"
#include "kglab/symflow.hpp"
#include "kglab/wkb.hpp"

#include <string>
#include <vector>

namespace kglab::harness {

using interaction::Phase;
using model::ModelParams;

/// Gaussian amplitude profile for v0, polarized along e1.
struct V0Spec {
  Real height = 1.0;
  Real width = 1.0;
  Real center = 0.0;
};

struct PsiSpec {
  Real radius = 0.5;  // quintic bump, identically 1 within radius/2
};

struct ExperimentConfig {
  ModelParams params;
  Grid1D grid;
  V0Spec v0;
  Real K = 1.45;         // perturbation exponent: amplitude eps^K
  int wkb_levels = 2;    // expansion depth of the reference evaluator
  Real T0_factor = 0.9;  // fraction of T0* for the horizon
  PsiSpec psi;
  Real phi1_radius = 2.5;
  Real h_factor = 0.1;
  Real c_dt = 0.1;
  int record_count = 160;
  Real fit_lo = 0.3;
  Real fit_hi = 0.9;
  Real slope_band_lo = 0.6;
  Real slope_band_hi = 1.4;
  Real min_amplification = 10.0;
  bool dealias = true;
  bool twin_reference = false;  // diagnostics: deviation vs unperturbed run
};

struct RateFitReport {
  Real epsilon = 0.0;           // effective (carrier-snapped) epsilon
  Real epsilon_nominal = 0.0;
  Real Gamma1_predicted = 0.0;
  Real slope_fitted = 0.0;
  Real intercept = 0.0;
  Real fit_window_lo = 0.0;
  Real fit_window_hi = 0.0;
  Real amplification_factor = 0.0;
  Real horizon = 0.0;
  bool saturated = false;
  bool verdict = false;
  std::string metric = "vs_wkb";
};

struct TimePoint {
  Real t;
  Real deviation;
  Real deviation_window;
  Real l2;
};

struct ExperimentResult {
  RateFitReport fit;
  std::vector<TimePoint> series;
  Real x0 = 0.0;
  Real xi0 = 0.0;
  Real d0 = 0.0;
};

/// v0 amplitude grid from the spec: height * exp(-((x-center)/width)^2) * e1.
Vec3Grid build_v0(const V0Spec& spec, const Grid1D& grid, const Phase& phase,
                  const ModelParams& params);

struct Perturbation {
  solver::FieldState delta;  // the unit-amplitude field increment (u only)
  Real x0 = 0.0;             // argmax |dt_g(0,.)|
  Real carrier = 0.0;        // snapped carrier frequency (xi0+3k)/eps
  Vec3c e0;                  // unit vector spanning Image P+(xi0+3k)
  Real norm = 0.0;           // L2 norm of the increment
};

/// Resonant perturbation Re(e^{i x (xi0+3k)/eps} Psi(x) e0) at unit amplitude;
/// carrier snapped to the grid, carrier_shift moves it off resonance (in the
/// semiclassical xi variable), e0 optionally replaced by a kernel-orthogonal
/// direction.
Perturbation build_perturbation(const ExperimentConfig& cfg, Real eps_eff, const Phase& phase,
                                const interaction::Xi0Selection& sel, const ArrayXc& dtg0,
                                Real carrier_shift = 0.0, bool kernel_orthogonal = false);

/// Least-squares fit of ln(deviation) against t^2/(2 sqrt(eps)) over the
/// window [lo, hi] (fractions of the horizon). Saturated samples
/// (deviation > eps^{1/4}) shrink the window from the right.
struct RateFit {
  Real slope = 0.0;
  Real intercept = 0.0;
  Real window_lo = 0.0;
  Real window_hi = 0.0;
  bool saturated = false;
};
RateFit fit_rate(const std::vector<TimePoint>& series, Real eps, Real horizon, Real lo, Real hi,
                 Real saturation_threshold);

/// The full instability experiment at the given nominal epsilon.
ExperimentResult instability_experiment(const ExperimentConfig& cfg, Real eps_nominal);

enum class ControlKind { OffResonance, KernelOrthogonal, ZeroPerturbation };

struct ControlResult {
  ExperimentResult run;
  ControlKind kind;
  bool pass = false;
};

/// Control runs use the twin metric (perturbed vs unperturbed solve), which
/// isolates the perturbation response: off-resonant carriers and
/// kernel-orthogonal polarizations must not amplify.
ControlResult control_experiment(const ExperimentConfig& cfg, Real eps_nominal,
                                 ControlKind kind);

struct SweepResult {
  std::vector<RateFitReport> reports;
  bool trend_ok = false;   // distance to Gamma1 does not degrade > 10%
  bool all_verdicts = false;
};

SweepResult epsilon_sweep(const ExperimentConfig& cfg, std::vector<Real> epsilons);

/// Predicted index Gamma1 and the horizon pieces for a config.
struct Prediction {
  Phase phase;
  interaction::Xi0Selection sel;
  Real Gamma1 = 0.0;
  Real T0_star = 0.0;
  Real x0 = 0.0;
};
Prediction predict(const ExperimentConfig& cfg);

}  // namespace kglab::harness
