#pragma once

#include "kglab/types.hpp"

#include <array>

namespace kglab {

/// The three symmetric bilinear forms of the system:
///   F(u,v) = (0, u3*v3, 0),  G(u,v) = (0, -u2*v2, 0),  H(u,v) = (0, u2*v2, 0).
enum class BilinearId { F, G, H };

inline const char* to_string(BilinearId b) {
  switch (b) {
    case BilinearId::F: return "F";
    case BilinearId::G: return "G";
    default: return "H";
  }
}

/// A symmetric bilinear form C^3 x C^3 -> C^3 given componentwise by
///   out_i = sum_jk coeff[i](j,k) u_j v_k  with coeff[i] symmetric.
/// Covers F, G, H and the mutated forms used by the transparency audit.
struct BilinearForm {
  std::array<Eigen::Matrix3d, 3> coeff;

  Vec3c operator()(const Vec3c& u, const Vec3c& v) const;

  /// The linear map v -> B(a, v) as a 3x3 matrix.
  Mat3c left_matrix(const Vec3c& a) const;

  static BilinearForm standard(BilinearId id);
};

inline Vec3c bilinear(BilinearId id, const Vec3c& u, const Vec3c& v) {
  return BilinearForm::standard(id)(u, v);
}

/// B(a) with B in {F, G, H}: the matrix of v -> B(a, v).
Mat3c bilinear_matrix(BilinearId id, const Vec3c& a);

}  // namespace kglab
