#pragma once

#include "kglab/bilinear.hpp"
#include "kglab/field.hpp"
#include "kglab/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kglab::interaction {

using model::ModelParams;
using model::Phase;

/// Index tuple (i, j, p, delta, sigma) of a resonance family: the resonant
/// phase is lambda_i^delta(xi + p k) - p*omega - lambda_j^sigma(xi).
struct ResonanceSpec {
  Branch i;
  Branch j;
  int p;
  Family delta;
  Family sigma;

  std::string label() const;
};

enum class Verdict { Transparent, NonTransparent, EmptySet };

struct TransparencyReport {
  ResonanceSpec spec;
  BilinearId bilinear;
  std::vector<Real> points;
  std::vector<Real> coefficient_norms_at_points;
  Verdict verdict = Verdict::EmptySet;
};

/// Polarization vector e_p for p in {-3,-1,1,3}: the kernel direction the
/// leading harmonics are proportional to. e_{-p} = conj(e_p).
Vec3c polarization_vector(int p, const Phase& phase, const ModelParams& params);

Real resonant_phase(const ResonanceSpec& spec, Real xi, const Phase& phase,
                    const ModelParams& params);

struct RootFindOptions {
  Real xi_min = 0.0;   // ignored unless use_window
  Real xi_max = 0.0;
  bool use_window = false;
  int scan_points = 20000;
  Real bisect_tol = 1e-12;
  Real collision_tol = 1e-8;
};

/// All sign-change roots of the resonant phase in the window, refined by
/// bisection. Throws on tangential (non-sign-changing) zeros and on root
/// collisions.
std::vector<Real> find_resonances(const ResonanceSpec& spec, const Phase& phase,
                                  const ModelParams& params, RootFindOptions opt = {});

/// Pi_i^delta(xi + p k) * B(e_p) * Pi_j^sigma(xi).
Mat3c interaction_coefficient(const ResonanceSpec& spec, BilinearId B, Real xi,
                              const Phase& phase, const ModelParams& params);

TransparencyReport classify_transparency(const ResonanceSpec& spec, BilinearId B,
                                         const Phase& phase, const ModelParams& params,
                                         Real tol_zero = 1e-12, RootFindOptions opt = {});

/// One entry of the coupled system's singular source structure: which bilinear
/// form acts between which families at which harmonics.
struct CouplingChannel {
  Family delta;
  Family sigma;
  BilinearId bilinear;
  std::vector<int> harmonics;
};

/// The five coupling channels realized by the perturbation equations.
std::vector<CouplingChannel> coupling_channels();

/// Full classification sweep over every (i,j,p,delta,sigma,B) realized by the
/// coupling channels.
std::vector<TransparencyReport> classify_all(const Phase& phase, const ModelParams& params,
                                             Real tol_zero = 1e-12);

struct WeakTransparencyResult {
  bool satisfied = true;
  Real max_residual = 0.0;
  int worst_p = 0;
  int worst_basis_u = 0;
  int worst_basis_v = 0;
};

/// Checks the compatibility condition behind the WKB cascade: for |p| <= pmax
/// and all canonical basis pairs, the kernel-projected harmonic sums of the
/// quadratic sources vanish. The bilinear triple (Fb, Gb, Hb) is replaceable
/// so mutated forms can serve as negative controls.
WeakTransparencyResult weak_transparency_audit(int pmax, const Phase& phase,
                                               const ModelParams& params,
                                               const BilinearForm& Fb, const BilinearForm& Gb,
                                               const BilinearForm& Hb, Real tol = 1e-12);

WeakTransparencyResult weak_transparency_audit(int pmax, const Phase& phase,
                                               const ModelParams& params, Real tol = 1e-12);

/// gamma1(xi) = 2 tr(P+(xi+3k) F(e3) Q+(xi) G(e-3) P+(xi+3k)); always positive.
Real gamma1(Real xi, const Phase& phase, const ModelParams& params);

/// Mirror quantity at the (-,-) family; gamma2(-xi) = gamma1(xi).
Real gamma2(Real xi, const Phase& phase, const ModelParams& params);

/// Closed form alpha0*omega0^2 / (6*omega*mu(xi)) both traces reduce to.
Real gamma1_closed_form(Real xi, const Phase& phase, const ModelParams& params);

struct Xi0Selection {
  Real xi0 = 0.0;   // the point of {xi2, xi3} with the smaller mu
  Real xi0r = 0.0;  // the other one
  Real xi2 = 0.0;   // root of smaller magnitude
  Real xi3 = 0.0;
};

/// Finds {xi2, xi3} (the (+,+) resonance pair) and orders them by mu.
/// Throws if mu(xi2) and mu(xi3) collide.
Xi0Selection select_xi0(const Phase& phase, const ModelParams& params);

/// Initial growth of the third harmonic, evaluated from data and symbols
/// alone: the t=0 value of the transport source feeding u_{0,3}, i.e.
///   2 P(3b) F(M(2ib)^{-1} H(v0,v0), v0) + P(3b) F(L(2ib)^{-1} F(v0,v0), v0).
/// Requires the polarization Q(b) v0 = v0 pointwise.
Vec3Grid dt_u03_at_zero(const Vec3Grid& v0, const Phase& phase, const ModelParams& params,
                        Real polarization_tol = 1e-10);

/// e3-coordinate of dt_u03_at_zero: <dt_u03, e3>/|e3|^2 pointwise.
ArrayXc dt_g_at_zero(const Vec3Grid& v0, const Phase& phase, const ModelParams& params,
                     Real polarization_tol = 1e-10);

/// Gamma1 = max_x |dt_g(0,x)| * gamma1(xi0)^(1/2).
Real Gamma1(const ArrayXc& dtg0, const Phase& phase, const ModelParams& params);

/// First-order stability index: sup over the non-transparent index set of
/// |g_p(0, x_p)|^2 * sup_xi tr(...). The leading third harmonics vanish at
/// t=0, so this evaluates to zero for the system's prepared data.
Real Gamma(const ArrayXc& g3_at_t0, const Phase& phase, const ModelParams& params);

/// Serializable audit document: phase, resonance points, transparency table,
/// stability indices.
struct ResonanceAudit {
  Phase phase;
  Xi0Selection xi0;
  std::vector<TransparencyReport> table;
  Real gamma1_xi0 = 0.0;
  Real Gamma = 0.0;
  Real Gamma1 = 0.0;
  Real max_weak_residual = 0.0;
  bool weak_transparency = false;
  bool matches_expected_classification = false;
};

/// Runs the full audit for a given initial amplitude profile.
ResonanceAudit run_audit(const Vec3Grid& v0, const ArrayXc& g3_at_t0, const Phase& phase,
                         const ModelParams& params, Real tol_zero = 1e-12,
                         Real nonzero_threshold = 1e-3);

}  // namespace kglab::interaction
