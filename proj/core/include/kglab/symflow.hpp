#pragma once

#include "kglab/grid.hpp"
#include "kglab/interaction.hpp"

#include <array>
#include <vector>

namespace kglab::symflow {

using interaction::Phase;
using model::ModelParams;

/// Union of quintic smoothstep bumps: identically 1 within radius/2 of each
/// center, identically 0 beyond radius. Supports must be pairwise disjoint.
struct CutoffWindow {
  std::vector<Real> centers;
  Real radius = 0.0;

  Real operator()(Real xi) const;
  void validate() const;
};

/// Spatial bump phi_1 around x0.
struct SpaceBump {
  Real center = 0.0;
  Real radius = 1.0;

  Real operator()(Real x) const { return quintic_bump(x - center, 0.5 * radius, radius); }
};

/// Which coupled block the flow describes.
enum class FlowKind { PlusPlus, MinusMinus, PlusZero, MinusZero };

/// Everything needed to evaluate the localized symbol at any (x, xi, t):
/// the phase, the frequency windows, the spatial bump and dt_g(0, .).
struct FlowProblem {
  ModelParams params;
  Phase phase;
  CutoffWindow window;       // windows of the active flow kind
  SpaceBump phi1;
  std::function<Complex(Real)> dtg0;  // dt_g(0, x)
  FlowKind kind = FlowKind::PlusPlus;
};

/// Window layout for every flow kind, radius = h_factor * min pairwise
/// distance of the non-transparent resonance points.
CutoffWindow make_window(FlowKind kind, const interaction::Xi0Selection& sel, const Phase& phase,
                         Real h_factor = 0.1);

/// The 6x6 non-autonomous symbol in block form.
struct FlowMatrix {
  Real lambda1 = 0.0;  // diagonal phase of the first block
  Real mu = 0.0;       // diagonal phase of the second block
  Mat3c b12 = Mat3c::Zero();
  Mat3c b21 = Mat3c::Zero();
  Real epsilon = 0.0;
  Real t = 0.0;

  Mat6c assemble() const;         // M0(t)
  Complex trace_b12_b21() const;  // tr(b12 * b21)
};

FlowMatrix build_M0(const FlowProblem& prob, Real x, Real xi, Real t);

/// Eigenvalues of M0(t) with multiplicities {2, 2, 1, 1}:
/// i*lambda1, i*mu, nu+- = i(lambda1+mu)/2 +- sqrt(4 eps^{3/2} t^2 tr - (lambda1-mu)^2)/2.
std::array<std::pair<Complex, int>, 4> eigvals_M0(const FlowMatrix& fm);

struct FlowState {
  Mat6c S = Mat6c::Identity();
  Real tau = 0.0;
  Real t = 0.0;
};

struct IntegrateOptions {
  Real dt_max = 0.02;
  Real c_osc = 0.2;
  Real rel_tol = 1e-8;
  int max_halvings = 14;
};

/// Integrates d_t S + eps^{-3/4} M0(t) S = 0, S(tau; tau) = Id, in the
/// interaction picture: the constant diagonal phases are removed by an
/// analytic integrating factor and the residual coupled system is advanced
/// by RK4 with step halving until the result is converged to rel_tol.
FlowState integrate_flow(const FlowProblem& prob, Real x, Real xi, Real tau, Real t,
                         IntegrateOptions opt = {});

/// Closed-form resonant flow at lambda1 = mu:
/// exp(-i eps^{-3/4} lambda1 (t - tau)) * exp((t^2 - tau^2) K / 2) with K the
/// constant coupling block.
Mat6c resonant_closed_form(const FlowProblem& prob, Real x, Real xi, Real tau, Real t);

enum class Regime { SmallTrace, NearCoalescence, NearResonance, Away };

struct EnvelopeSample {
  Real x = 0.0;
  Real xi = 0.0;
  Regime regime = Regime::Away;
  Real fitted_quadratic = 0.0;  // a in log|S| ~ a t^2/2 + b t + c
  Real fitted_linear = 0.0;
  bool pass_gamma_plus = false;
  bool pass_rough = false;
};

struct EnvelopeReport {
  std::vector<EnvelopeSample> samples;
  Real gamma_plus = 0.0;
  Real b_plus = 0.0;
  bool all_pass = true;
  std::array<int, 4> regime_counts{0, 0, 0, 0};
};

/// Fits the quadratic growth envelope of |S(0;t)| on [0, T1*sqrt(|ln eps|)]
/// for a stratified sample set and audits a <= gamma_plus (and the rough
/// bound b_plus) with the given slack.
EnvelopeReport growth_envelope_audit(const FlowProblem& prob,
                                     const std::vector<std::pair<Real, Real>>& samples, Real T1,
                                     Real slack = 1e-3, int n_checkpoints = 60,
                                     Real regime_c0 = 0.0);

/// Stratified (x, xi) sample set hitting all regimes.
std::vector<std::pair<Real, Real>> stratified_samples(const FlowProblem& prob, int count);

/// Envelope fit of a single flow trajectory: least squares of log|S(0;t)|
/// against (t^2/2, t, 1) over checkpoints.
std::pair<Real, Real> fit_envelope(const FlowProblem& prob, Real x, Real xi, Real T,
                                   int n_checkpoints, IntegrateOptions opt = {});

/// gamma_plus = |dt_g(0, x0)| * sup over the (+,+) windows of gamma1^(1/2).
Real gamma_plus(const FlowProblem& prob, Real x0);

/// Rough growth bound b_plus = sup (|b12| + |b21|)/2 over the window support.
Real b_plus(const FlowProblem& prob);

}  // namespace kglab::symflow
