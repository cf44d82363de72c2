#include "kglab/model.hpp"

#include <cmath>

namespace kglab::model {

void ModelParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("ModelParams: epsilon must lie in (0,1)");
  if (allow_outside_regime) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("ModelParams: omega0 must be positive");
    return;
  }
  if (!(theta0 > 0.0 && theta0 < 1.0))
    throw std::invalid_argument("ModelParams: theta0 must lie in (0,1)");
  if (!(alpha0 > 2.5 && alpha0 < 3.0))
    throw std::invalid_argument("ModelParams: alpha0 must lie in (2.5,3)");
  if (!(omega0 > 0.0)) throw std::invalid_argument("ModelParams: omega0 must be positive");
}

Real dispersion(Family family, Real xi, const ModelParams& p) {
  if (family == Family::L) return std::hypot(p.alpha0 * p.omega0, xi);
  return std::hypot(p.omega0, p.theta0 * xi);
}

Real branch_value(Family family, Branch branch, Real xi, const ModelParams& p) {
  return branch_sign(branch) * dispersion(family, xi, p);
}

Real group_velocity(Family family, Real xi, const ModelParams& p) {
  if (family == Family::L) return xi / dispersion(Family::L, xi, p);
  return p.theta0 * p.theta0 * xi / dispersion(Family::M, xi, p);
}

Real branch_velocity(Family family, Branch branch, Real xi, const ModelParams& p) {
  return branch_sign(branch) * group_velocity(family, xi, p);
}

Phase solve_phase(const ModelParams& p) {
  if (!(p.alpha0 > 2.5 && p.alpha0 < 3.0))
    throw std::invalid_argument("solve_phase: alpha0 must lie in (2.5,3) for the phase to exist");
  if (!(p.theta0 > 0.0 && p.theta0 < 1.0))
    throw std::invalid_argument("solve_phase: theta0 must lie in (0,1)");
  const Real a2over9 = p.alpha0 * p.alpha0 / 9.0;
  const Real k2 = (1.0 - a2over9) / (1.0 - p.theta0 * p.theta0) * p.omega0 * p.omega0;
  Phase ph;
  ph.k = std::sqrt(k2);
  ph.omega = std::sqrt(k2 + a2over9 * p.omega0 * p.omega0);
  return ph;
}

Mat3c char_matrix(Family family, Real tau, Real xi, const ModelParams& p) {
  const Real c = family == Family::L ? 1.0 : p.theta0;
  const Real m = family == Family::L ? p.alpha0 * p.omega0 : p.omega0;
  Mat3c A = Mat3c::Zero();
  A(0, 0) = -I * tau;
  A(1, 1) = -I * tau;
  A(2, 2) = -I * tau;
  A(0, 1) = -I * c * xi;
  A(1, 0) = -I * c * xi;
  A(1, 2) = m;
  A(2, 1) = -m;
  return A;
}

Vec3c kernel_vector(Family family, Branch branch, Real xi, const ModelParams& p) {
  const Real c = family == Family::L ? 1.0 : p.theta0;
  const Real m = family == Family::L ? p.alpha0 * p.omega0 : p.omega0;
  Vec3c v;
  if (branch == Branch::Zero) {
    v << Complex(1.0, 0.0), Complex(0.0, 0.0), I * c * xi / m;
    return v;
  }
  const Real lam = branch_value(family, branch, xi, p);
  v << Complex(-c * xi / lam, 0.0), Complex(1.0, 0.0), I * m / lam;
  return v;
}

Mat3c projector(const ModeSpec& spec, Real xi, const ModelParams& p) {
  const Vec3c omega = kernel_vector(spec.family, spec.branch, xi, p);
  return omega * omega.adjoint() / omega.squaredNorm();
}

bool is_characteristic(Family family, int p, const Phase& phase, const ModelParams& params) {
  if (p == 0) return true;
  const Real lam = dispersion(family, p * phase.k, params);
  const Real target = std::abs(p) * phase.omega;
  const Real scale = std::max(lam, target);
  return std::abs(lam - target) < 1e-9 * scale;
}

namespace {

Branch kernel_branch(Family family, int p, const Phase& phase, const ModelParams& params) {
  if (p == 0) return Branch::Zero;
  return p > 0 ? Branch::Plus : Branch::Minus;
}

}  // namespace

Mat3c harmonic_projector(Family family, int p, const Phase& phase, const ModelParams& params) {
  if (!is_characteristic(family, p, phase, params)) return Mat3c::Zero();
  const Branch b = kernel_branch(family, p, phase, params);
  return projector({family, b}, p * phase.k, params);
}

Mat3c partial_inverse(Family family, int p, const Phase& phase, const ModelParams& params) {
  // char_matrix(F, p*omega, p*k) = i * sum_j (lambda_j(p k) - p*omega) Pi_j(p k),
  // so invert branch-wise, dropping near-kernel branches.
  const Real xi = p * phase.k;
  const Real tau = p * phase.omega;
  const Real lam = dispersion(family, xi, params);
  Mat3c inv = Mat3c::Zero();
  const Real scale = std::max({lam, std::abs(tau), params.omega0});
  for (Branch b : {Branch::Plus, Branch::Minus, Branch::Zero}) {
    const Real ev = branch_sign(b) * lam - tau;
    if (std::abs(ev) < 1e-9 * scale) continue;
    inv += projector({family, b}, xi, params) / (I * ev);
  }
  return inv;
}

}  // namespace kglab::model
