#include "kglab/profile.hpp"

namespace kglab {

Real Profile::reality_defect() const {
  Real worst = 0.0;
  for (int p = 0; p <= cutoff_; ++p) {
    const bool hp = has(p), hm = has(-p);
    if (!hp && !hm) continue;
    Vec3Grid diff;
    if (hp && hm) {
      const Vec3Grid conj = at(p).conjugate();
      diff.c0 = at(-p).c0 - conj.c0;
      diff.c1 = at(-p).c1 - conj.c1;
      diff.c2 = at(-p).c2 - conj.c2;
    } else {
      diff = hp ? at(p) : at(-p);
    }
    worst = std::max(worst, diff.max_abs());
  }
  return worst;
}

namespace {

// Componentwise fast paths for the three standard forms; they read only
// components 2 and 3 and write only component 2.
Vec3Grid apply_form(BilinearId B, const Vec3Grid& a, const Vec3Grid& b) {
  Vec3Grid out;
  out.setZero(a.size());
  switch (B) {
    case BilinearId::F: out.c1 = a.c2 * b.c2; break;
    case BilinearId::G: out.c1 = -(a.c1 * b.c1); break;
    case BilinearId::H: out.c1 = a.c1 * b.c1; break;
  }
  return out;
}

}  // namespace

Profile profile_bilinear(BilinearId B, const Profile& a, const Profile& b, int out_cutoff,
                         bool truncate) {
  if (a.n_points() != b.n_points())
    throw std::invalid_argument("profile_bilinear: grid size mismatch");
  Profile out(out_cutoff, a.n_points());
  for (int p1 = -a.cutoff(); p1 <= a.cutoff(); ++p1) {
    if (!a.has(p1) || a.at(p1).isZero()) continue;
    for (int p2 = -b.cutoff(); p2 <= b.cutoff(); ++p2) {
      if (!b.has(p2) || b.at(p2).isZero()) continue;
      const int p = p1 + p2;
      if (std::abs(p) > out_cutoff) {
        if (truncate) continue;
        throw std::overflow_error("profile_bilinear: cutoff overflow at harmonic " +
                                  std::to_string(p));
      }
      out.add(p, apply_form(B, a.at(p1), b.at(p2)));
    }
  }
  return out;
}

}  // namespace kglab
