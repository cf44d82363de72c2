#include "kglab/wkb.hpp"

#include <cmath>

namespace kglab::wkb {

using interaction::polarization_vector;
using model::branch_velocity;
using model::group_velocity;
using model::harmonic_projector;
using model::partial_inverse;

namespace {

Eigen::Matrix3d advection_matrix(Family f, const ModelParams& params) {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  const Real c = f == Family::L ? 1.0 : params.theta0;
  A(0, 1) = c;
  A(1, 0) = c;
  return A;
}

Profile add_profiles(const Profile& a, const Profile& b) {
  const int cut = std::max(a.cutoff(), b.cutoff());
  Profile out(cut, a.n_points());
  for (int p = -cut; p <= cut; ++p) {
    if (a.has(p)) out.add(p, a.at(p));
    if (b.has(p)) out.add(p, b.at(p));
  }
  return out;
}

Profile scale_profile(Profile p, Complex s) {
  Profile out(p.cutoff(), p.n_points());
  for (int q = -p.cutoff(); q <= p.cutoff(); ++q)
    if (p.has(q)) out.set(q, p.at(q) * s);
  return out;
}

ArrayXc dot_coordinate(const Vec3Grid& w, const Vec3c& e) {
  // <w, e>/|e|^2 pointwise; the kernel vectors have |e|^2 = 2.
  const Vec3c ec = e.conjugate();
  return (ec(0) * w.c0 + ec(1) * w.c1 + ec(2) * w.c2) / e.squaredNorm();
}

}  // namespace

Real snap_epsilon(Real eps_nominal, const Phase& phase, const Grid1D& grid) {
  const long m = std::max<long>(1, std::lround(phase.k * grid.length / (2.0 * M_PI * eps_nominal)));
  return phase.k * grid.length / (2.0 * M_PI * m);
}

int carrier_mode(Real eps, const Phase& phase, const Grid1D& grid) {
  const Real exact = phase.k * grid.length / (2.0 * M_PI * eps);
  const long m = std::lround(exact);
  if (std::abs(exact - m) > 1e-6)
    throw std::invalid_argument("carrier_mode: k/eps is not a dual grid frequency (unsnapped carrier)");
  return static_cast<int>(m);
}

WKBSolution cascade_init(const Grid1D& grid, const ModelParams& params, const Phase& phase,
                         const Vec3Grid& v0, Real polarization_tol) {
  grid.validate();
  const Mat3c Q1 = harmonic_projector(Family::M, 1, phase, params);
  Real worst = 0.0, scale = 0.0;
  for (Eigen::Index i = 0; i < v0.size(); ++i) {
    const Vec3c v = v0.at(i);
    worst = std::max(worst, (Q1 * v - v).norm());
    scale = std::max(scale, v.norm());
  }
  if (worst > polarization_tol * (scale + 1.0))
    throw std::invalid_argument("cascade_init: v0 violates the polarization condition");

  WKBSolution sol;
  sol.grid = grid;
  sol.params = params;
  sol.phase = phase;
  const Vec3c e1 = polarization_vector(1, phase, params);
  sol.f = dot_coordinate(v0, e1);
  sol.g = ArrayXc::Zero(grid.n_points);
  return sol;
}

ProfileSet assemble_level1(const WKBSolution& sol) {
  const Eigen::Index n = sol.grid.n_points;
  const Vec3c e1 = polarization_vector(1, sol.phase, sol.params);
  const Vec3c e3 = polarization_vector(3, sol.phase, sol.params);

  ProfileSet ps;
  ps.u0 = Profile(3, n);
  ps.v0 = Profile(1, n);
  ps.u0.set(3, outer(sol.g, e3));
  ps.u0.set(-3, outer(sol.g.conjugate(), e3.conjugate()));
  ps.v0.set(1, outer(sol.f, e1));
  ps.v0.set(-1, outer(sol.f.conjugate(), e1.conjugate()));

  const Profile a0 = add_profiles(ps.u0, ps.v0);
  const Profile F0 = profile_bilinear(BilinearId::F, a0, ps.v0, 4);
  const Profile G0 = profile_bilinear(BilinearId::G, ps.u0, ps.u0, 6);
  const Profile H0 = profile_bilinear(BilinearId::H, ps.v0, ps.v0, 6);
  const Profile GH0 = add_profiles(G0, H0);

  ps.u1 = Profile(4, n);
  for (int p = -4; p <= 4; ++p) {
    if (!F0.has(p) || F0.at(p).isZero()) continue;
    ps.u1.set(p, apply_matrix(partial_inverse(Family::L, p, sol.phase, sol.params), F0.at(p)));
  }
  ps.v1 = Profile(6, n);
  for (int p = -6; p <= 6; ++p) {
    if (!GH0.has(p) || GH0.at(p).isZero()) continue;
    ps.v1.set(p, apply_matrix(partial_inverse(Family::M, p, sol.phase, sol.params), GH0.at(p)));
  }
  return ps;
}

namespace {

// F1 = F(a0, v1) + F(a1, v0); GH1 = 2 G(u0, u1) + 2 H(v0, v1).
struct Level1Products {
  Profile F1, GH1;
};

Level1Products level1_products(const ProfileSet& ps) {
  const Profile a0 = add_profiles(ps.u0, ps.v0);
  const Profile a1 = add_profiles(ps.u1, ps.v1);
  Level1Products lp;
  lp.F1 = add_profiles(profile_bilinear(BilinearId::F, a0, ps.v1, 9),
                       profile_bilinear(BilinearId::F, a1, ps.v0, 7));
  lp.GH1 = add_profiles(scale_profile(profile_bilinear(BilinearId::G, ps.u0, ps.u1, 7), 2.0),
                        scale_profile(profile_bilinear(BilinearId::H, ps.v0, ps.v1, 7), 2.0));
  return lp;
}

}  // namespace

Sources transport_sources(const WKBSolution& sol, const ProfileSet& ps) {
  const Level1Products lp = level1_products(ps);
  const Vec3c e1 = polarization_vector(1, sol.phase, sol.params);
  const Vec3c e3 = polarization_vector(3, sol.phase, sol.params);
  Sources s;
  s.Sg = lp.F1.has(3) ? dot_coordinate(lp.F1.at(3), e3)
                      : ArrayXc(ArrayXc::Zero(sol.grid.n_points));
  s.Sf = lp.GH1.has(1) ? dot_coordinate(lp.GH1.at(1), e1)
                       : ArrayXc(ArrayXc::Zero(sol.grid.n_points));
  return s;
}

std::pair<ArrayXc, ArrayXc> dt_leading(const WKBSolution& sol) {
  const Sources s = transport_sources(sol, assemble_level1(sol));
  Fft fft(sol.grid.n_points);
  const Real vg = group_velocity(Family::L, 3.0 * sol.phase.k, sol.params);
  const Real vf = group_velocity(Family::M, sol.phase.k, sol.params);
  ArrayXc dtg = s.Sg - vg * fft.derivative(sol.g, sol.grid);
  ArrayXc dtf = s.Sf - vf * fft.derivative(sol.f, sol.grid);
  return {std::move(dtg), std::move(dtf)};
}

Level2 assemble_level2(const WKBSolution& sol, const ProfileSet& ps) {
  const Eigen::Index n = sol.grid.n_points;
  const Level1Products lp = level1_products(ps);
  auto [dtg, dtf] = dt_leading(sol);

  Fft fft(sol.grid.n_points);
  const ArrayXc dxg = fft.derivative(sol.g, sol.grid);
  const ArrayXc dxf = fft.derivative(sol.f, sol.grid);

  const Vec3c e1 = polarization_vector(1, sol.phase, sol.params);
  const Vec3c e3 = polarization_vector(3, sol.phase, sol.params);
  const Vec3c Ae3 = advection_matrix(Family::L, sol.params).cast<Complex>() * e3;
  const Vec3c Ae1 = advection_matrix(Family::M, sol.params).cast<Complex>() * e1;

  // (d_t + A d_x) of the leading profiles.
  Profile Lu0(3, n), Mv0(1, n);
  {
    Vec3Grid w = outer(dtg, e3);
    w += outer(dxg, Ae3);
    Lu0.set(3, w);
    Lu0.set(-3, w.conjugate());
    Vec3Grid wv = outer(dtf, e1);
    wv += outer(dxf, Ae1);
    Mv0.set(1, wv);
    Mv0.set(-1, wv.conjugate());
  }

  Level2 l2;
  l2.u2 = Profile(sol.cutoff, n);
  l2.v2 = Profile(sol.cutoff, n);
  for (int p = -sol.cutoff; p <= sol.cutoff; ++p) {
    Vec3Grid rhs_u;
    bool any_u = false;
    if (lp.F1.has(p) && !lp.F1.at(p).isZero()) {
      rhs_u = lp.F1.at(p);
      any_u = true;
    }
    if (Lu0.has(p)) {
      if (!any_u) rhs_u.setZero(n);
      rhs_u += Lu0.at(p) * Complex(-1.0);
      any_u = true;
    }
    if (any_u)
      l2.u2.set(p, apply_matrix(partial_inverse(Family::L, p, sol.phase, sol.params), rhs_u));

    Vec3Grid rhs_v;
    bool any_v = false;
    if (lp.GH1.has(p) && !lp.GH1.at(p).isZero()) {
      rhs_v = lp.GH1.at(p);
      any_v = true;
    }
    if (Mv0.has(p)) {
      if (!any_v) rhs_v.setZero(n);
      rhs_v += Mv0.at(p) * Complex(-1.0);
      any_v = true;
    }
    if (any_v)
      l2.v2.set(p, apply_matrix(partial_inverse(Family::M, p, sol.phase, sol.params), rhs_v));
  }
  return l2;
}

void transport_advance(WKBSolution& sol, Real dt, int n_steps, bool enable_sources) {
  const Real vg = group_velocity(Family::L, 3.0 * sol.phase.k, sol.params);
  const Real vf = group_velocity(Family::M, sol.phase.k, sol.params);
  const Real vmax = std::max(std::abs(vg), std::abs(vf));
  if (dt * vmax >= sol.grid.dx())
    throw std::invalid_argument("transport_advance: CFL violation, dt*vmax >= dx");

  Fft fft(sol.grid.n_points);
  const int n = sol.grid.n_points;
  ArrayXc eg_full(n), eg_half(n), ef_full(n), ef_half(n);
  for (int j = 0; j < n; ++j) {
    const Real kj = sol.grid.freq(j);
    eg_full(j) = std::exp(-I * kj * vg * dt);
    eg_half(j) = std::exp(-I * kj * vg * (0.5 * dt));
    ef_full(j) = std::exp(-I * kj * vf * dt);
    ef_half(j) = std::exp(-I * kj * vf * (0.5 * dt));
  }

  auto source_hat = [&](const ArrayXc& ghat, const ArrayXc& fhat, ArrayXc& sg, ArrayXc& sf) {
    WKBSolution tmp = sol;
    tmp.g = fft.inverse(ghat);
    tmp.f = fft.inverse(fhat);
    if (!enable_sources) {
      sg = ArrayXc::Zero(n);
      sf = ArrayXc::Zero(n);
      return;
    }
    const Sources s = transport_sources(tmp, assemble_level1(tmp));
    sg = fft.forward(s.Sg);
    sf = fft.forward(s.Sf);
  };

  ArrayXc ghat = fft.forward(sol.g);
  ArrayXc fhat = fft.forward(sol.f);
  for (int step = 0; step < n_steps; ++step) {
    ArrayXc g1(n), f1(n), g2(n), f2(n), g3(n), f3(n), g4(n), f4(n);
    source_hat(ghat, fhat, g1, f1);
    source_hat(eg_half * (ghat + 0.5 * dt * g1), ef_half * (fhat + 0.5 * dt * f1), g2, f2);
    source_hat(eg_half * ghat + 0.5 * dt * g2, ef_half * fhat + 0.5 * dt * f2, g3, f3);
    source_hat(eg_full * ghat + dt * (eg_half * g3), ef_full * fhat + dt * (ef_half * f3), g4,
               f4);
    ghat = eg_full * ghat +
           (dt / 6.0) * (eg_full * g1 + 2.0 * eg_half * g2 + 2.0 * eg_half * g3 + g4);
    fhat = ef_full * fhat +
           (dt / 6.0) * (ef_full * f1 + 2.0 * ef_half * f2 + 2.0 * ef_half * f3 + f4);
    sol.t += dt;
  }
  sol.g = fft.inverse(ghat);
  sol.f = fft.inverse(fhat);
  const Real m = std::max(sol.g.abs().maxCoeff(), sol.f.abs().maxCoeff());
  if (!std::isfinite(m)) throw std::runtime_error("transport_advance: NaN guard tripped");
  if (m > 1e6) throw std::runtime_error("transport_advance: amplitude blow-up guard tripped");
}

solver::FieldState evaluate_wkb(const WKBSolution& sol, Real eps, int levels) {
  const int n = sol.grid.n_points;
  const int m_c = carrier_mode(eps, sol.phase, sol.grid);
  const int max_harm = levels >= 1 ? sol.cutoff : 3;
  if (max_harm * m_c >= n / 2)
    throw std::invalid_argument("evaluate_wkb: carrier harmonics exceed the Nyquist band");

  const ProfileSet ps = assemble_level1(sol);
  Profile total_u = ps.u0;
  Profile total_v = ps.v0;
  if (levels >= 1) {
    const Real se = std::sqrt(eps);
    total_u = add_profiles(total_u, scale_profile(ps.u1, se));
    total_v = add_profiles(total_v, scale_profile(ps.v1, se));
    if (levels >= 2) {
      const Level2 l2 = assemble_level2(sol, ps);
      total_u = add_profiles(total_u, scale_profile(l2.u2, eps));
      total_v = add_profiles(total_v, scale_profile(l2.v2, eps));
    }
  }

  // Carrier exp(i*theta) with theta = kappa_c x - omega t / eps; harmonics are
  // exact powers so every carrier stays on-grid.
  const Real kappa = 2.0 * M_PI * m_c / sol.grid.length;
  ArrayXc c1(n);
  const Real tphase = sol.phase.omega * sol.t / eps;
  for (int i = 0; i < n; ++i) c1(i) = std::exp(I * (kappa * sol.grid.x(i) - tphase));

  solver::FieldState out;
  out.t = sol.t;
  out.u.setZero(n);
  out.v.setZero(n);
  ArrayXc acc_u0 = ArrayXc::Zero(n), acc_u1 = ArrayXc::Zero(n), acc_u2 = ArrayXc::Zero(n);
  ArrayXc acc_v0 = ArrayXc::Zero(n), acc_v1 = ArrayXc::Zero(n), acc_v2 = ArrayXc::Zero(n);
  ArrayXc cp = ArrayXc::Ones(n);
  const int cut = std::max(total_u.cutoff(), total_v.cutoff());
  for (int p = 0; p <= cut; ++p) {
    if (total_u.has(p)) {
      const auto& h = total_u.at(p);
      if (p == 0) {
        acc_u0 += h.c0;
        acc_u1 += h.c1;
        acc_u2 += h.c2;
      } else {
        acc_u0 += h.c0 * cp + (h.c0 * cp).conjugate();
        acc_u1 += h.c1 * cp + (h.c1 * cp).conjugate();
        acc_u2 += h.c2 * cp + (h.c2 * cp).conjugate();
      }
    }
    if (total_v.has(p)) {
      const auto& h = total_v.at(p);
      if (p == 0) {
        acc_v0 += h.c0;
        acc_v1 += h.c1;
        acc_v2 += h.c2;
      } else {
        acc_v0 += h.c0 * cp + (h.c0 * cp).conjugate();
        acc_v1 += h.c1 * cp + (h.c1 * cp).conjugate();
        acc_v2 += h.c2 * cp + (h.c2 * cp).conjugate();
      }
    }
    cp *= c1;
  }
  out.u.c0 = acc_u0.real();
  out.u.c1 = acc_u1.real();
  out.u.c2 = acc_u2.real();
  out.v.c0 = acc_v0.real();
  out.v.c1 = acc_v1.real();
  out.v.c2 = acc_v2.real();
  return out;
}

Real leading_l2(const WKBSolution& sol) {
  const Real s = (sol.g.abs2().sum() + sol.f.abs2().sum()) * sol.grid.dx();
  return std::sqrt(s);
}

ResidualOrderResult residual_order(const Grid1D& grid, const ModelParams& base,
                                   const Phase& phase, const Vec3Grid& v0,
                                   const std::vector<Real>& eps_list, Real t_star, int levels,
                                   Real c_dt) {
  if (eps_list.size() < 3)
    throw std::invalid_argument("residual_order: need at least three epsilons");
  ResidualOrderResult res;
  const Real vmax = std::max(std::abs(group_velocity(Family::L, 3.0 * phase.k, base)),
                             std::abs(group_velocity(Family::M, phase.k, base)));
  const Real dt_cfl = 0.5 * grid.dx() / vmax;

  for (Real eps : eps_list) {
    ModelParams p = base;
    p.epsilon = snap_epsilon(eps, phase, grid);
    WKBSolution sol = cascade_init(grid, p, phase, v0);
    if (t_star > 0.0) {
      const int n1 = static_cast<int>(std::ceil(t_star / dt_cfl));
      transport_advance(sol, t_star / n1, n1);
    }
    const Real dt_s = c_dt * p.epsilon;
    solver::FieldState before = evaluate_wkb(sol, p.epsilon, levels);

    WKBSolution ahead = sol;
    const int n2 = std::max(1, static_cast<int>(std::ceil(dt_s / dt_cfl)));
    transport_advance(ahead, dt_s / n2, n2);
    const solver::FieldState after = evaluate_wkb(ahead, p.epsilon, levels);

    solver::KgSolver ks(grid, p);
    solver::FieldState stepped = before;
    ks.step(stepped, dt_s, true, true);

    solver::FieldState diff = after;
    diff.u.c0 -= stepped.u.c0;
    diff.u.c1 -= stepped.u.c1;
    diff.u.c2 -= stepped.u.c2;
    diff.v.c0 -= stepped.v.c0;
    diff.v.c1 -= stepped.v.c1;
    diff.v.c2 -= stepped.v.c2;
    res.epsilons.push_back(p.epsilon);
    res.residuals.push_back(diff.l2_norm(grid.dx()) / dt_s);
  }

  // Least-squares slope of log-residual against log-eps.
  const int m = static_cast<int>(res.epsilons.size());
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    const Real x = std::log(res.epsilons[i]);
    const Real y = std::log(std::max(res.residuals[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  res.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return res;
}

}  // namespace kglab::wkb
