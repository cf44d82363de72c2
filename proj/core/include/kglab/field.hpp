#pragma once

#include "kglab/types.hpp"

namespace kglab {

/// Grid function with complex 3-vector values, stored component-major.
struct Vec3Grid {
  ArrayXc c0, c1, c2;

  Eigen::Index size() const { return c0.size(); }
  void resize(Eigen::Index n) {
    c0.resize(n);
    c1.resize(n);
    c2.resize(n);
  }
  void setZero(Eigen::Index n) {
    c0 = ArrayXc::Zero(n);
    c1 = ArrayXc::Zero(n);
    c2 = ArrayXc::Zero(n);
  }
  bool isZero() const { return size() == 0 || (c0.abs().maxCoeff() == 0.0 && c1.abs().maxCoeff() == 0.0 && c2.abs().maxCoeff() == 0.0); }
  Vec3c at(Eigen::Index i) const { return Vec3c(c0(i), c1(i), c2(i)); }
  void set(Eigen::Index i, const Vec3c& v) {
    c0(i) = v(0);
    c1(i) = v(1);
    c2(i) = v(2);
  }

  Vec3Grid conjugate() const {
    Vec3Grid out;
    out.c0 = c0.conjugate();
    out.c1 = c1.conjugate();
    out.c2 = c2.conjugate();
    return out;
  }

  Vec3Grid& operator+=(const Vec3Grid& o) {
    c0 += o.c0;
    c1 += o.c1;
    c2 += o.c2;
    return *this;
  }

  Vec3Grid operator*(Complex s) const {
    Vec3Grid out;
    out.c0 = c0 * s;
    out.c1 = c1 * s;
    out.c2 = c2 * s;
    return out;
  }

  Real max_abs() const {
    if (size() == 0) return 0.0;
    return std::max({c0.abs().maxCoeff(), c1.abs().maxCoeff(), c2.abs().maxCoeff()});
  }
};

/// out = M * v pointwise.
inline Vec3Grid apply_matrix(const Mat3c& M, const Vec3Grid& v) {
  Vec3Grid out;
  out.c0 = M(0, 0) * v.c0 + M(0, 1) * v.c1 + M(0, 2) * v.c2;
  out.c1 = M(1, 0) * v.c0 + M(1, 1) * v.c1 + M(1, 2) * v.c2;
  out.c2 = M(2, 0) * v.c0 + M(2, 1) * v.c1 + M(2, 2) * v.c2;
  return out;
}

/// Constant vector times a scalar grid function.
inline Vec3Grid outer(const ArrayXc& s, const Vec3c& e) {
  Vec3Grid out;
  out.c0 = s * e(0);
  out.c1 = s * e(1);
  out.c2 = s * e(2);
  return out;
}

/// Real-valued grid function with 3-vector values.
struct RealField3 {
  ArrayXr c0, c1, c2;

  Eigen::Index size() const { return c0.size(); }
  void setZero(Eigen::Index n) {
    c0 = ArrayXr::Zero(n);
    c1 = ArrayXr::Zero(n);
    c2 = ArrayXr::Zero(n);
  }
};

}  // namespace kglab
