#include "kglab/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kglab::interaction {

using model::branch_value;
using model::char_matrix;
using model::dispersion;
using model::harmonic_projector;
using model::is_characteristic;
using model::kernel_vector;
using model::partial_inverse;
using model::projector;

std::string ResonanceSpec::label() const {
  std::ostringstream os;
  os << "(" << to_string(i) << "," << to_string(j) << "," << p << "," << to_string(delta)
     << "," << to_string(sigma) << ")";
  return os.str();
}

Vec3c polarization_vector(int p, const Phase& phase, const ModelParams& params) {
  switch (p) {
    case 1: return kernel_vector(Family::M, Branch::Plus, phase.k, params);
    case 3: return kernel_vector(Family::L, Branch::Plus, 3.0 * phase.k, params);
    case -1: return kernel_vector(Family::M, Branch::Plus, phase.k, params).conjugate();
    case -3: return kernel_vector(Family::L, Branch::Plus, 3.0 * phase.k, params).conjugate();
    default: throw std::invalid_argument("polarization_vector: p must be in {-3,-1,1,3}");
  }
}

Real resonant_phase(const ResonanceSpec& spec, Real xi, const Phase& phase,
                    const ModelParams& params) {
  return branch_value(spec.delta, spec.i, xi + spec.p * phase.k, params) -
         spec.p * phase.omega - branch_value(spec.sigma, spec.j, xi, params);
}

namespace {

Real default_half_window(const Phase& phase, const ModelParams& params) {
  const Real xi1 = std::sqrt(9.0 * phase.omega * phase.omega - params.omega0 * params.omega0) /
                   params.theta0;
  return 20.0 * std::max(std::abs(phase.k), xi1);
}

Real bisect(const std::function<Real(Real)>& f, Real a, Real b, Real tol) {
  Real fa = f(a);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    const Real m = 0.5 * (a + b);
    const Real fm = f(m);
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<Real> find_resonances(const ResonanceSpec& spec, const Phase& phase,
                                  const ModelParams& params, RootFindOptions opt) {
  Real lo = opt.xi_min, hi = opt.xi_max;
  if (!opt.use_window) {
    const Real w = default_half_window(phase, params);
    lo = -w;
    hi = w;
  }
  auto f = [&](Real xi) { return resonant_phase(spec, xi, phase, params); };

  const int n = opt.scan_points;
  const Real dx = (hi - lo) / n;
  std::vector<Real> vals(n + 1);
  Real scale = 0.0;
  for (int i = 0; i <= n; ++i) {
    vals[i] = f(lo + i * dx);
    scale = std::max(scale, std::abs(vals[i]));
  }
  if (scale == 0.0) return {};  // identically zero phase: no isolated roots

  std::vector<Real> roots;
  std::vector<bool> near_bracket(n + 1, false);
  for (int i = 0; i < n; ++i) {
    if (vals[i] == 0.0) {
      roots.push_back(lo + i * dx);
      near_bracket[i] = true;
      continue;
    }
    if ((vals[i] < 0.0) != (vals[i + 1] < 0.0)) {
      roots.push_back(bisect(f, lo + i * dx, lo + (i + 1) * dx, opt.bisect_tol));
      near_bracket[i] = near_bracket[i + 1] = true;
      if (i > 0) near_bracket[i - 1] = true;
      if (i + 2 <= n) near_bracket[i + 2] = true;
    }
  }

  // A zero the scan grazes without a sign change cannot be bisected.
  const Real graze_tol = 1e-7 * scale;
  for (int i = 1; i < n; ++i) {
    if (near_bracket[i]) continue;
    if (std::abs(vals[i]) < graze_tol && std::abs(vals[i]) <= std::abs(vals[i - 1]) &&
        std::abs(vals[i]) <= std::abs(vals[i + 1])) {
      throw std::runtime_error("find_resonances: bracket-failure (tangential zero) for " +
                               spec.label());
    }
  }

  std::sort(roots.begin(), roots.end());
  for (std::size_t i = 1; i < roots.size(); ++i) {
    if (roots[i] - roots[i - 1] < opt.collision_tol)
      throw std::runtime_error("find_resonances: root collision for " + spec.label());
  }
  return roots;
}

Mat3c interaction_coefficient(const ResonanceSpec& spec, BilinearId B, Real xi,
                              const Phase& phase, const ModelParams& params) {
  const Mat3c left = projector({spec.delta, spec.i}, xi + spec.p * phase.k, params);
  const Mat3c right = projector({spec.sigma, spec.j}, xi, params);
  const Vec3c ep = polarization_vector(spec.p, phase, params);
  return left * bilinear_matrix(B, ep) * right;
}

TransparencyReport classify_transparency(const ResonanceSpec& spec, BilinearId B,
                                         const Phase& phase, const ModelParams& params,
                                         Real tol_zero, RootFindOptions opt) {
  TransparencyReport rep;
  rep.spec = spec;
  rep.bilinear = B;
  rep.points = find_resonances(spec, phase, params, opt);
  if (rep.points.empty()) {
    rep.verdict = Verdict::EmptySet;
    return rep;
  }
  bool all_zero = true;
  for (Real xi : rep.points) {
    const Real nrm = interaction_coefficient(spec, B, xi, phase, params).norm();
    rep.coefficient_norms_at_points.push_back(nrm);
    all_zero = all_zero && nrm < tol_zero;
  }
  rep.verdict = all_zero ? Verdict::Transparent : Verdict::NonTransparent;
  return rep;
}

std::vector<CouplingChannel> coupling_channels() {
  return {
      {Family::L, Family::M, BilinearId::F, {3, -3}},
      {Family::L, Family::L, BilinearId::F, {1, -1}},
      {Family::L, Family::M, BilinearId::F, {1, -1}},
      {Family::M, Family::L, BilinearId::G, {3, -3}},
      {Family::M, Family::M, BilinearId::H, {1, -1}},
  };
}

std::vector<TransparencyReport> classify_all(const Phase& phase, const ModelParams& params,
                                             Real tol_zero) {
  std::vector<TransparencyReport> out;
  const Branch branches[] = {Branch::Plus, Branch::Minus, Branch::Zero};
  for (const auto& ch : coupling_channels()) {
    for (int p : ch.harmonics) {
      for (Branch i : branches) {
        for (Branch j : branches) {
          ResonanceSpec spec{i, j, p, ch.delta, ch.sigma};
          out.push_back(classify_transparency(spec, ch.bilinear, phase, params, tol_zero));
        }
      }
    }
  }
  return out;
}

WeakTransparencyResult weak_transparency_audit(int pmax, const Phase& phase,
                                               const ModelParams& params,
                                               const BilinearForm& Fb, const BilinearForm& Gb,
                                               const BilinearForm& Hb, Real tol) {
  if (pmax < 6) throw std::invalid_argument("weak_transparency_audit: pmax must be >= 6");

  // Cache the harmonic projectors of both families.
  std::vector<Mat3c> P(2 * pmax + 1), Q(2 * pmax + 1);
  for (int p = -pmax; p <= pmax; ++p) {
    P[p + pmax] = harmonic_projector(Family::L, p, phase, params);
    Q[p + pmax] = harmonic_projector(Family::M, p, phase, params);
  }

  WeakTransparencyResult res;
  Vec3c basis[3] = {Vec3c::UnitX(), Vec3c::UnitY(), Vec3c::UnitZ()};
  for (int p = -pmax; p <= pmax; ++p) {
    for (int bu = 0; bu < 3; ++bu) {
      for (int bv = 0; bv < 3; ++bv) {
        Vec3c usum = Vec3c::Zero();
        Vec3c vsum = Vec3c::Zero();
        for (int p1 = -pmax; p1 <= pmax; ++p1) {
          const int p2 = p - p1;
          if (std::abs(p2) > pmax) continue;
          const Vec3c a1 = (P[p1 + pmax] + Q[p1 + pmax]) * basis[bu];
          const Vec3c b2 = Q[p2 + pmax] * basis[bv];
          usum += Fb(a1, b2);
          vsum += Gb(P[p1 + pmax] * basis[bu], P[p2 + pmax] * basis[bv]) +
                  Hb(Q[p1 + pmax] * basis[bu], Q[p2 + pmax] * basis[bv]);
        }
        const Real r = std::max((P[p + pmax] * usum).norm(), (Q[p + pmax] * vsum).norm());
        if (r > res.max_residual) {
          res.max_residual = r;
          res.worst_p = p;
          res.worst_basis_u = bu;
          res.worst_basis_v = bv;
        }
      }
    }
  }
  res.satisfied = res.max_residual <= tol;
  return res;
}

WeakTransparencyResult weak_transparency_audit(int pmax, const Phase& phase,
                                               const ModelParams& params, Real tol) {
  return weak_transparency_audit(pmax, phase, params, BilinearForm::standard(BilinearId::F),
                                 BilinearForm::standard(BilinearId::G),
                                 BilinearForm::standard(BilinearId::H), tol);
}

Real gamma1(Real xi, const Phase& phase, const ModelParams& params) {
  const ResonanceSpec spec{Branch::Plus, Branch::Plus, 3, Family::L, Family::M};
  const Mat3c pfq = interaction_coefficient(spec, BilinearId::F, xi, phase, params);
  const ResonanceSpec mirror{Branch::Plus, Branch::Plus, -3, Family::M, Family::L};
  const Mat3c qgp =
      interaction_coefficient(mirror, BilinearId::G, xi + 3.0 * phase.k, phase, params);
  return 2.0 * (pfq * qgp).trace().real();
}

Real gamma2(Real xi, const Phase& phase, const ModelParams& params) {
  const ResonanceSpec spec{Branch::Minus, Branch::Minus, -3, Family::L, Family::M};
  const Mat3c pfq = interaction_coefficient(spec, BilinearId::F, xi, phase, params);
  const ResonanceSpec mirror{Branch::Minus, Branch::Minus, 3, Family::M, Family::L};
  const Mat3c qgp =
      interaction_coefficient(mirror, BilinearId::G, xi - 3.0 * phase.k, phase, params);
  return 2.0 * (pfq * qgp).trace().real();
}

Real gamma1_closed_form(Real xi, const Phase& phase, const ModelParams& params) {
  return params.alpha0 * params.omega0 * params.omega0 /
         (6.0 * phase.omega * dispersion(Family::M, xi, params));
}

Xi0Selection select_xi0(const Phase& phase, const ModelParams& params) {
  const ResonanceSpec spec{Branch::Plus, Branch::Plus, 3, Family::L, Family::M};
  const auto roots = find_resonances(spec, phase, params);
  if (roots.size() != 2)
    throw std::runtime_error("select_xi0: expected exactly two (+,+) resonance points, found " +
                             std::to_string(roots.size()));
  Xi0Selection sel;
  sel.xi2 = std::abs(roots[0]) < std::abs(roots[1]) ? roots[0] : roots[1];
  sel.xi3 = std::abs(roots[0]) < std::abs(roots[1]) ? roots[1] : roots[0];
  const Real mu2 = dispersion(Family::M, sel.xi2, params);
  const Real mu3 = dispersion(Family::M, sel.xi3, params);
  if (std::abs(mu2 - mu3) < 1e-10 * std::max(mu2, mu3))
    throw std::runtime_error("select_xi0: collision, mu(xi2) = mu(xi3)");
  sel.xi0 = mu2 < mu3 ? sel.xi2 : sel.xi3;
  sel.xi0r = mu2 < mu3 ? sel.xi3 : sel.xi2;
  return sel;
}

namespace {

void check_polarized(const Vec3Grid& v0, const Phase& phase, const ModelParams& params,
                     Real tol) {
  const Mat3c Q1 = harmonic_projector(Family::M, 1, phase, params);
  Real worst = 0.0, scale = 0.0;
  for (Eigen::Index i = 0; i < v0.size(); ++i) {
    const Vec3c v = v0.at(i);
    worst = std::max(worst, (Q1 * v - v).norm());
    scale = std::max(scale, v.norm());
  }
  if (worst > tol * (scale + 1.0))
    throw std::invalid_argument("dt_u03_at_zero: v0 violates the polarization condition");
}

}  // namespace

Vec3Grid dt_u03_at_zero(const Vec3Grid& v0, const Phase& phase, const ModelParams& params,
                        Real polarization_tol) {
  check_polarized(v0, phase, params, polarization_tol);
  const Mat3c M2inv = partial_inverse(Family::M, 2, phase, params);
  const Mat3c L2inv = partial_inverse(Family::L, 2, phase, params);
  const Mat3c P3 = harmonic_projector(Family::L, 3, phase, params);
  Vec3Grid out;
  out.resize(v0.size());
  for (Eigen::Index i = 0; i < v0.size(); ++i) {
    const Vec3c v = v0.at(i);
    const Vec3c vH = M2inv * bilinear(BilinearId::H, v, v);
    const Vec3c uF = L2inv * bilinear(BilinearId::F, v, v);
    const Vec3c w = P3 * (2.0 * bilinear(BilinearId::F, vH, v) + bilinear(BilinearId::F, uF, v));
    out.set(i, w);
  }
  return out;
}

ArrayXc dt_g_at_zero(const Vec3Grid& v0, const Phase& phase, const ModelParams& params,
                     Real polarization_tol) {
  const Vec3Grid w = dt_u03_at_zero(v0, phase, params, polarization_tol);
  const Vec3c e3 = polarization_vector(3, phase, params);
  const Real n2 = e3.squaredNorm();
  ArrayXc g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) g(i) = e3.dot(w.at(i)) / n2;
  return g;
}

Real Gamma1(const ArrayXc& dtg0, const Phase& phase, const ModelParams& params) {
  const Real m = dtg0.abs().maxCoeff();
  const auto sel = select_xi0(phase, params);
  return m * std::sqrt(gamma1(sel.xi0, phase, params));
}

Real Gamma(const ArrayXc& g3_at_t0, const Phase& phase, const ModelParams& params) {
  const Real m = g3_at_t0.size() > 0 ? g3_at_t0.abs().maxCoeff() : 0.0;
  const auto sel = select_xi0(phase, params);
  const Real trace_sup =
      std::max(gamma1(sel.xi2, phase, params), gamma1(sel.xi3, phase, params)) / 2.0;
  return m * m * trace_sup;
}

namespace {

bool expected_non_transparent(const TransparencyReport& r) {
  const auto& s = r.spec;
  if (s.delta == Family::L && s.sigma == Family::M && r.bilinear == BilinearId::F) {
    if (s.p == 3 && s.i == Branch::Plus && s.j == Branch::Zero) return true;
    if (s.p == -3 && s.i == Branch::Minus && s.j == Branch::Zero) return true;
    if (s.p == 3 && s.i == Branch::Plus && s.j == Branch::Plus) return true;
    if (s.p == -3 && s.i == Branch::Minus && s.j == Branch::Minus) return true;
  }
  if (s.delta == Family::M && s.sigma == Family::L && r.bilinear == BilinearId::G) {
    if (s.p == -3 && s.i == Branch::Plus && s.j == Branch::Plus) return true;
    if (s.p == 3 && s.i == Branch::Minus && s.j == Branch::Minus) return true;
  }
  return false;
}

}  // namespace

ResonanceAudit run_audit(const Vec3Grid& v0, const ArrayXc& g3_at_t0, const Phase& phase,
                         const ModelParams& params, Real tol_zero, Real nonzero_threshold) {
  ResonanceAudit audit;
  audit.phase = phase;
  audit.xi0 = select_xi0(phase, params);
  audit.table = classify_all(phase, params, tol_zero);
  audit.gamma1_xi0 = gamma1(audit.xi0.xi0, phase, params);

  const auto wt = weak_transparency_audit(6, phase, params);
  audit.weak_transparency = wt.satisfied;
  audit.max_weak_residual = wt.max_residual;

  const ArrayXc dtg = dt_g_at_zero(v0, phase, params);
  audit.Gamma1 = Gamma1(dtg, phase, params);
  audit.Gamma = Gamma(g3_at_t0, phase, params);

  bool match = true;
  for (const auto& r : audit.table) {
    const bool expect_nt = expected_non_transparent(r);
    const bool got_nt = r.verdict == Verdict::NonTransparent;
    if (expect_nt != got_nt) match = false;
    if (expect_nt) {
      const Real maxn = *std::max_element(r.coefficient_norms_at_points.begin(),
                                          r.coefficient_norms_at_points.end());
      if (maxn <= nonzero_threshold) match = false;
    }
  }
  audit.matches_expected_classification = match && audit.weak_transparency;
  return audit;
}

}  // namespace kglab::interaction
