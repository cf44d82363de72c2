#include "kglab/symflow.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace kglab::symflow {

using interaction::interaction_coefficient;
using interaction::ResonanceSpec;

Real CutoffWindow::operator()(Real xi) const {
  Real v = 0.0;
  for (Real c : centers) v += quintic_bump(xi - c, 0.5 * radius, radius);
  return std::min(v, 1.0);
}

void CutoffWindow::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("CutoffWindow: radius must be positive");
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if (std::abs(centers[i] - centers[j]) < 2.0 * radius)
        throw std::invalid_argument("CutoffWindow: supports overlap");
}

CutoffWindow make_window(FlowKind kind, const interaction::Xi0Selection& sel, const Phase& phase,
                         Real h_factor) {
  // Non-transparent resonance points of the system.
  const std::vector<Real> all = {-6.0 * phase.k, 6.0 * phase.k, sel.xi2,
                                 sel.xi3,        -sel.xi2,      -sel.xi3};
  Real min_dist = std::numeric_limits<Real>::max();
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      min_dist = std::min(min_dist, std::abs(all[i] - all[j]));

  CutoffWindow w;
  w.radius = h_factor * min_dist;
  switch (kind) {
    case FlowKind::PlusPlus: w.centers = {sel.xi2, sel.xi3}; break;
    case FlowKind::MinusMinus: w.centers = {-sel.xi2, -sel.xi3}; break;
    case FlowKind::PlusZero: w.centers = {-6.0 * phase.k}; break;
    case FlowKind::MinusZero: w.centers = {6.0 * phase.k}; break;
  }
  w.validate();
  return w;
}

Mat6c FlowMatrix::assemble() const {
  Mat6c M = Mat6c::Zero();
  const Real s = std::pow(epsilon, 0.75) * t;
  M.block<3, 3>(0, 0) = I * lambda1 * Mat3c::Identity();
  M.block<3, 3>(3, 3) = I * mu * Mat3c::Identity();
  M.block<3, 3>(0, 3) = -s * b12;
  M.block<3, 3>(3, 0) = -s * b21;
  return M;
}

Complex FlowMatrix::trace_b12_b21() const { return (b12 * b21).trace(); }

FlowMatrix build_M0(const FlowProblem& prob, Real x, Real xi, Real t) {
  const auto& ph = prob.phase;
  const auto& pm = prob.params;
  const Real chi = prob.window(xi);
  const Real phi = prob.phi1(x);
  const Complex dtg = prob.dtg0(x);

  FlowMatrix fm;
  fm.epsilon = pm.epsilon;
  fm.t = t;

  const Complex amp = chi * phi * dtg;
  switch (prob.kind) {
    case FlowKind::PlusPlus: {
      fm.lambda1 = model::dispersion(Family::L, xi + 3.0 * ph.k, pm) - 3.0 * ph.omega;
      fm.mu = model::dispersion(Family::M, xi, pm);
      const ResonanceSpec up{Branch::Plus, Branch::Plus, 3, Family::L, Family::M};
      const ResonanceSpec dn{Branch::Plus, Branch::Plus, -3, Family::M, Family::L};
      fm.b12 = amp * interaction_coefficient(up, BilinearId::F, xi, ph, pm);
      fm.b21 = 2.0 * std::conj(dtg) * chi * phi *
               interaction_coefficient(dn, BilinearId::G, xi + 3.0 * ph.k, ph, pm);
      break;
    }
    case FlowKind::MinusMinus: {
      fm.lambda1 = -model::dispersion(Family::L, xi - 3.0 * ph.k, pm) + 3.0 * ph.omega;
      fm.mu = -model::dispersion(Family::M, xi, pm);
      const ResonanceSpec up{Branch::Minus, Branch::Minus, -3, Family::L, Family::M};
      const ResonanceSpec dn{Branch::Minus, Branch::Minus, 3, Family::M, Family::L};
      fm.b12 = std::conj(dtg) * chi * phi *
               interaction_coefficient(up, BilinearId::F, xi, ph, pm);
      fm.b21 = 2.0 * amp * interaction_coefficient(dn, BilinearId::G, xi - 3.0 * ph.k, ph, pm);
      break;
    }
    case FlowKind::PlusZero: {
      fm.lambda1 = model::dispersion(Family::L, xi + 3.0 * ph.k, pm) - 3.0 * ph.omega;
      fm.mu = 0.0;
      const ResonanceSpec up{Branch::Plus, Branch::Zero, 3, Family::L, Family::M};
      fm.b12 = amp * interaction_coefficient(up, BilinearId::F, xi, ph, pm);
      fm.b21 = Mat3c::Zero();
      break;
    }
    case FlowKind::MinusZero: {
      fm.lambda1 = -model::dispersion(Family::L, xi - 3.0 * ph.k, pm) + 3.0 * ph.omega;
      fm.mu = 0.0;
      const ResonanceSpec up{Branch::Minus, Branch::Zero, -3, Family::L, Family::M};
      fm.b12 = std::conj(dtg) * chi * phi *
               interaction_coefficient(up, BilinearId::F, xi, ph, pm);
      fm.b21 = Mat3c::Zero();
      break;
    }
  }
  return fm;
}

std::array<std::pair<Complex, int>, 4> eigvals_M0(const FlowMatrix& fm) {
  const Real s = std::pow(fm.epsilon, 1.5) * fm.t * fm.t;
  const Complex tr = fm.trace_b12_b21();
  const Real dl = fm.lambda1 - fm.mu;
  const Complex rad = std::sqrt(Complex(4.0 * s * tr.real() - dl * dl, 4.0 * s * tr.imag()));
  const Complex half_sum = 0.5 * I * (fm.lambda1 + fm.mu);
  return {std::make_pair(I * fm.lambda1, 2), std::make_pair(I * fm.mu, 2),
          std::make_pair(half_sum + 0.5 * rad, 1), std::make_pair(half_sum - 0.5 * rad, 1)};
}

namespace {

// Interaction-picture right-hand side: Y' = t * conj-rotated coupling * Y.
struct RotatedSystem {
  Mat3c b12, b21;
  Real delta_rate = 0.0;  // (lambda1 - mu) / eps^{3/4}
  Real tau = 0.0;

  Mat6c rhs(Real t, const Mat6c& Y) const {
    const Complex ph = std::exp(I * delta_rate * (t - tau));
    Mat6c K = Mat6c::Zero();
    K.block<3, 3>(0, 3) = ph * b12;
    K.block<3, 3>(3, 0) = std::conj(ph) * b21;
    return t * (K * Y);
  }
};

Mat6c rk4_integrate(const RotatedSystem& sys, Real tau, Real t, Real dt) {
  Mat6c Y = Mat6c::Identity();
  const long n = std::max<long>(1, std::lround(std::ceil((t - tau) / dt - 1e-12)));
  const Real h = (t - tau) / n;
  Real s = tau;
  for (long i = 0; i < n; ++i) {
    const Mat6c k1 = sys.rhs(s, Y);
    const Mat6c k2 = sys.rhs(s + 0.5 * h, Y + 0.5 * h * k1);
    const Mat6c k3 = sys.rhs(s + 0.5 * h, Y + 0.5 * h * k2);
    const Mat6c k4 = sys.rhs(s + h, Y + h * k3);
    Y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += h;
  }
  return Y;
}

}  // namespace

FlowState integrate_flow(const FlowProblem& prob, Real x, Real xi, Real tau, Real t,
                         IntegrateOptions opt) {
  if (t < tau) throw std::invalid_argument("integrate_flow: t < tau");
  const FlowMatrix fm = build_M0(prob, x, xi, tau);
  const Real e34 = std::pow(prob.params.epsilon, 0.75);

  RotatedSystem sys;
  sys.b12 = fm.b12;
  sys.b21 = fm.b21;
  sys.delta_rate = (fm.lambda1 - fm.mu) / e34;
  sys.tau = tau;

  FlowState out;
  out.tau = tau;
  out.t = t;

  if (t == tau) return out;

  Real dt = std::min(opt.dt_max, opt.c_osc / std::max(std::abs(sys.delta_rate), 1.0));
  Mat6c Y = rk4_integrate(sys, tau, t, dt);
  for (int halving = 0; halving < opt.max_halvings; ++halving) {
    const Mat6c Y2 = rk4_integrate(sys, tau, t, 0.5 * dt);
    const Real err = (Y2 - Y).norm() / std::max(Y2.norm(), 1e-300);
    Y = Y2;
    dt *= 0.5;
    if (err <= opt.rel_tol) break;
    if (halving + 1 == opt.max_halvings)
      throw std::runtime_error("integrate_flow: step underflow before convergence");
  }

  Mat6c E = Mat6c::Identity();
  const Complex phase_u = std::exp(-I * fm.lambda1 * (t - tau) / e34);
  const Complex phase_v = std::exp(-I * fm.mu * (t - tau) / e34);
  E.block<3, 3>(0, 0) *= phase_u;
  E.block<3, 3>(3, 3) *= phase_v;
  out.S = E * Y;
  return out;
}

Mat6c resonant_closed_form(const FlowProblem& prob, Real x, Real xi, Real tau, Real t) {
  const FlowMatrix fm = build_M0(prob, x, xi, tau);
  Mat6c K = Mat6c::Zero();
  K.block<3, 3>(0, 3) = fm.b12;
  K.block<3, 3>(3, 0) = fm.b21;
  const Mat6c grow = (0.5 * (t * t - tau * tau) * K).exp();
  const Real e34 = std::pow(prob.params.epsilon, 0.75);
  return std::exp(-I * fm.lambda1 * (t - tau) / e34) * grow;
}

std::pair<Real, Real> fit_envelope(const FlowProblem& prob, Real x, Real xi, Real T,
                                   int n_checkpoints, IntegrateOptions opt) {
  Mat6c S = Mat6c::Identity();
  Eigen::MatrixXd A(n_checkpoints + 1, 3);
  Eigen::VectorXd y(n_checkpoints + 1);
  Real t_prev = 0.0;
  for (int i = 0; i <= n_checkpoints; ++i) {
    const Real ti = T * i / n_checkpoints;
    if (i > 0) {
      const FlowState seg = integrate_flow(prob, x, xi, t_prev, ti, opt);
      S = seg.S * S;
      t_prev = ti;
    }
    const Real nrm = Eigen::JacobiSVD<Mat6c>(S).singularValues()(0);
    A(i, 0) = 0.5 * ti * ti;
    A(i, 1) = ti;
    A(i, 2) = 1.0;
    y(i) = std::log(std::max(nrm, 1e-300));
  }
  const Eigen::Vector3d coef = (A.transpose() * A).ldlt().solve(A.transpose() * y);
  return {coef(0), coef(1)};
}

Real gamma_plus(const FlowProblem& prob, Real x0) {
  const Complex d = prob.dtg0(x0);
  Real sup = 0.0;
  for (Real c : prob.window.centers) {
    for (int i = -400; i <= 400; ++i) {
      const Real xi = c + prob.window.radius * i / 400.0;
      if (prob.window(xi) <= 0.0) continue;
      sup = std::max(sup, interaction::gamma1(xi, prob.phase, prob.params));
    }
  }
  return std::abs(d) * std::sqrt(sup);
}

Real b_plus(const FlowProblem& prob) {
  Real sup = 0.0;
  for (Real c : prob.window.centers) {
    for (int i = -80; i <= 80; ++i) {
      const Real xi = c + prob.window.radius * i / 80.0;
      for (int j = -80; j <= 80; ++j) {
        const Real x = prob.phi1.center + prob.phi1.radius * j / 80.0;
        const FlowMatrix fm = build_M0(prob, x, xi, 0.0);
        const Real n12 = Eigen::JacobiSVD<Mat3c>(fm.b12).singularValues()(0);
        const Real n21 = Eigen::JacobiSVD<Mat3c>(fm.b21).singularValues()(0);
        sup = std::max(sup, 0.5 * (n12 + n21));
      }
    }
  }
  return sup;
}

std::vector<std::pair<Real, Real>> stratified_samples(const FlowProblem& prob, int count) {
  const Real e34 = std::pow(prob.params.epsilon, 0.75);
  const Real h = prob.window.radius;
  std::vector<Real> xi_offsets = {0.0,       0.5 * e34,  -0.5 * e34, 2.0 * e34, -2.0 * e34,
                                  8.0 * e34, -8.0 * e34, 0.12 * h,   -0.12 * h, 0.3 * h,
                                  0.45 * h,  -0.45 * h,  0.7 * h,    0.9 * h};
  std::vector<Real> x_offsets = {0.0, 0.2, -0.2, 0.45, -0.45, 0.9, 1.5};
  std::vector<std::pair<Real, Real>> out;
  for (Real c : prob.window.centers)
    for (Real dxi : xi_offsets)
      for (Real dx : x_offsets) {
        out.emplace_back(prob.phi1.center + dx * prob.phi1.radius, c + dxi);
        if (static_cast<int>(out.size()) >= count) return out;
      }
  return out;
}

EnvelopeReport growth_envelope_audit(const FlowProblem& prob,
                                     const std::vector<std::pair<Real, Real>>& samples, Real T1,
                                     Real slack, int n_checkpoints, Real regime_c0) {
  EnvelopeReport rep;
  const Real T = T1 * std::sqrt(std::abs(std::log(prob.params.epsilon)));
  const Real e34 = std::pow(prob.params.epsilon, 0.75);

  // x0 = argmax over the samples of |dt_g|; the bound uses the global max.
  Real x0 = prob.phi1.center;
  Real best = 0.0;
  for (auto& [x, xi] : samples) {
    const Real a = std::abs(prob.dtg0(x));
    if (a > best) {
      best = a;
      x0 = x;
    }
  }
  rep.gamma_plus = gamma_plus(prob, x0);
  rep.b_plus = b_plus(prob);

  Real c0 = regime_c0;
  if (c0 <= 0.0) {
    Real tr_max = 0.0;
    for (auto& [x, xi] : samples)
      tr_max = std::max(tr_max, build_M0(prob, x, xi, 0.0).trace_b12_b21().real());
    c0 = 0.25 * tr_max;
  }

  const Real t_mid = 0.5 * T;
  for (auto& [x, xi] : samples) {
    EnvelopeSample s;
    s.x = x;
    s.xi = xi;
    const FlowMatrix fm = build_M0(prob, x, xi, t_mid);
    const Real tr = fm.trace_b12_b21().real();
    const Real gap = std::abs(fm.lambda1 - fm.mu);
    if (tr < c0)
      s.regime = Regime::SmallTrace;
    else if (std::abs(gap - 2.0 * e34 * t_mid * std::sqrt(std::max(tr, 0.0))) <=
             c0 * e34 * t_mid)
      s.regime = Regime::NearCoalescence;
    else if (gap <= c0 * e34 * t_mid)
      s.regime = Regime::NearResonance;
    else
      s.regime = Regime::Away;
    rep.regime_counts[static_cast<int>(s.regime)]++;

    const auto [a, b] = fit_envelope(prob, x, xi, T, n_checkpoints);
    s.fitted_quadratic = a;
    s.fitted_linear = b;
    s.pass_gamma_plus = a <= rep.gamma_plus * (1.0 + slack) + 1e-12;
    s.pass_rough = a <= rep.b_plus * (1.0 + slack) + 1e-12;
    rep.all_pass = rep.all_pass && s.pass_gamma_plus && s.pass_rough;
    rep.samples.push_back(s);
  }
  return rep;
}

}  // namespace kglab::symflow
