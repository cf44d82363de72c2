#pragma once

#include "kglab/grid.hpp"
#include "kglab/interaction.hpp"
#include "kglab/profile.hpp"
#include "kglab/solver.hpp"

#include <utility>

namespace kglab::wkb {

using interaction::Phase;
using model::ModelParams;

/// Leading-order WKB state: the scalar amplitudes of the polarized leading
/// harmonics, u_{0,3} = g*e3 and v_{0,1} = f*e1, plus the machinery to
/// rebuild every stored corrector level from them.
struct WKBSolution {
  Grid1D grid;
  ModelParams params;
  Phase phase;
  Real t = 0.0;
  Real T = 1.0;  // validity horizon in slow time
  int cutoff = 6;
  ArrayXc g, f;
};

/// Profile levels 0 and 1 of the expansion.
struct ProfileSet {
  Profile u0, v0, u1, v1;
};

struct Level2 {
  Profile u2, v2;
};

/// Effective epsilon nearest to eps_nominal for which the fundamental
/// carrier k/eps falls exactly on a dual grid frequency. Keeping the phase
/// pair exact and nudging epsilon keeps every harmonic carrier on-grid.
Real snap_epsilon(Real eps_nominal, const Phase& phase, const Grid1D& grid);

/// Carrier mode index of k/eps on the grid (must be exact after snapping).
int carrier_mode(Real eps, const Phase& phase, const Grid1D& grid);

/// Initializes the WKB state at t=0 from a polarized amplitude v0.
WKBSolution cascade_init(const Grid1D& grid, const ModelParams& params, const Phase& phase,
                         const Vec3Grid& v0, Real polarization_tol = 1e-10);

/// Leading profiles from the scalar amplitudes.
ProfileSet assemble_level1(const WKBSolution& sol);

/// Transport sources: S_g = <P(3b)(F1)_3, e3>/|e3|^2 and the v-mirror,
/// assembled from profile products of the given levels.
struct Sources {
  ArrayXc Sg, Sf;
};
Sources transport_sources(const WKBSolution& sol, const ProfileSet& ps);

/// Time derivatives of the leading amplitudes implied by the transport system.
std::pair<ArrayXc, ArrayXc> dt_leading(const WKBSolution& sol);

/// Second correctors, needed for the full O(eps^0) cascade and the residual
/// measurement. Output truncated at the solution cutoff.
Level2 assemble_level2(const WKBSolution& sol, const ProfileSet& ps);

/// Advances (g, f) by the coupled transport system with exact spectral
/// advection and RK4 on the sources. Correctors are refreshed from the
/// current amplitudes at every stage. Throws on CFL violation and on
/// amplitude blow-up (1e6 guard).
void transport_advance(WKBSolution& sol, Real dt, int n_steps, bool enable_sources = true);

/// Real fields (u^a, v^a) on the grid at the solution's current time.
/// levels selects the included expansion depth: 0 leading only, 1 adds the
/// sqrt(eps) correctors, 2 adds the eps ones. Throws if the carriers are not
/// representable on the grid.
solver::FieldState evaluate_wkb(const WKBSolution& sol, Real eps, int levels = 2);

/// L2 norm of the pair (g, f).
Real leading_l2(const WKBSolution& sol);

struct ResidualOrderResult {
  std::vector<Real> epsilons;
  std::vector<Real> residuals;
  Real slope = 0.0;
};

/// Substitutes the WKB fields into the discrete evolution: one solver step of
/// length c_dt*eps at time t_star measures the PDE defect. Returns the
/// least-squares slope of log-residual against log-eps.
ResidualOrderResult residual_order(const Grid1D& grid, const ModelParams& base,
                                   const Phase& phase, const Vec3Grid& v0,
                                   const std::vector<Real>& eps_list, Real t_star = 0.25,
                                   int levels = 2, Real c_dt = 0.1);

}  // namespace kglab::wkb
