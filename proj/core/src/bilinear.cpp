#include "kglab/bilinear.hpp"

namespace kglab {

Vec3c BilinearForm::operator()(const Vec3c& u, const Vec3c& v) const {
  Vec3c out;
  for (int i = 0; i < 3; ++i) out(i) = u.transpose() * coeff[i].cast<Complex>() * v;
  return out;
}

Mat3c BilinearForm::left_matrix(const Vec3c& a) const {
  Mat3c m;
  for (int i = 0; i < 3; ++i) m.row(i) = a.transpose() * coeff[i].cast<Complex>();
  return m;
}

BilinearForm BilinearForm::standard(BilinearId id) {
  BilinearForm b;
  for (auto& c : b.coeff) c.setZero();
  switch (id) {
    case BilinearId::F: b.coeff[1](2, 2) = 1.0; break;
    case BilinearId::G: b.coeff[1](1, 1) = -1.0; break;
    case BilinearId::H: b.coeff[1](1, 1) = 1.0; break;
  }
  return b;
}

Mat3c bilinear_matrix(BilinearId id, const Vec3c& a) {
  Mat3c m = Mat3c::Zero();
  switch (id) {
    case BilinearId::F: m(1, 2) = a(2); break;
    case BilinearId::G: m(1, 1) = -a(1); break;
    case BilinearId::H: m(1, 1) = a(1); break;
  }
  return m;
}

}  // namespace kglab
