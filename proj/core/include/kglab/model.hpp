#pragma once

#include "kglab/types.hpp"

#include <stdexcept>

namespace kglab::model {

/// Physical constants of the coupled Klein-Gordon system.
///
/// theta0 is the velocity ratio of the two wave operators, alpha0 the mass
/// ratio, omega0 the reference angular frequency and epsilon the semiclassical
/// wavelength parameter.
struct ModelParams {
  Real theta0 = 0.5;
  Real alpha0 = 2.7;
  Real omega0 = 1.0;
  Real epsilon = 1e-2;

  /// Permits parameters outside the open box (0,1)x(2.5,3)x(0,inf)x(0,1)
  /// for exploratory runs. Phase selection still requires alpha0 < 3.
  bool allow_outside_regime = false;

  void validate() const;
};

/// The selected characteristic pair: mu(k) = omega and lambda(3k) = 3*omega.
struct Phase {
  Real omega = 0.0;
  Real k = 0.0;
};

struct ModeSpec {
  Family family;
  Branch branch;
};

/// lambda(xi) for L, mu(xi) for M. Strictly positive.
Real dispersion(Family family, Real xi, const ModelParams& p);

/// Signed branch value: +dispersion, -dispersion or 0.
Real branch_value(Family family, Branch branch, Real xi, const ModelParams& p);

/// d(dispersion)/dxi: xi/lambda for L, theta0^2*xi/mu for M.
Real group_velocity(Family family, Real xi, const ModelParams& p);

/// Signed branch group velocity.
Real branch_velocity(Family family, Branch branch, Real xi, const ModelParams& p);

/// Solves the phase equations for the positive-root pair (omega, k).
/// Rejects parameters outside the admissible box.
Phase solve_phase(const ModelParams& p);

/// Frequency-space symbol of the family operator at (tau, xi):
/// -i*tau*Id plus the constant-coefficient block with the spatial
/// derivative evaluated on the carrier convention used throughout
/// (plane waves exp(i*(k*x - omega*t)) annihilated at (omega, k)).
Mat3c char_matrix(Family family, Real tau, Real xi, const ModelParams& p);

/// Kernel vector of char_matrix(family, branch*dispersion(xi), xi).
/// For the +/- branches the vector has squared norm exactly 2.
Vec3c kernel_vector(Family family, Branch branch, Real xi, const ModelParams& p);

/// Rank-one orthogonal eigenprojector built from the explicit kernel vector.
Mat3c projector(const ModeSpec& spec, Real xi, const ModelParams& p);

/// Projector onto ker char_matrix(family, p*omega, p*k); zero when p*phase
/// is non-characteristic.
Mat3c harmonic_projector(Family family, int p, const Phase& phase, const ModelParams& params);

/// Pseudoinverse of char_matrix(family, p*omega, p*k): zero on the kernel,
/// inverse on the orthogonal complement.
Mat3c partial_inverse(Family family, int p, const Phase& phase, const ModelParams& params);

/// True when p*(omega,k) lies on the characteristic variety of the family.
bool is_characteristic(Family family, int p, const Phase& phase, const ModelParams& params);

}  // namespace kglab::model
