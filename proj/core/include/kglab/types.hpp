#pragma once

#include <Eigen/Dense>
#include <complex>

namespace kglab {

using Real = double;
using Complex = std::complex<double>;

using Vec3c = Eigen::Vector3cd;
using Mat3c = Eigen::Matrix3cd;
using Mat6c = Eigen::Matrix<Complex, 6, 6>;
using ArrayXc = Eigen::ArrayXcd;
using ArrayXr = Eigen::ArrayXd;

inline constexpr Complex I{0.0, 1.0};

/// Operator family of the coupled system: L carries the u block, M the v block.
enum class Family { L, M };

/// Spectral branch of a dispersion curve.
enum class Branch { Plus, Minus, Zero };

inline int branch_sign(Branch b) {
  switch (b) {
    case Branch::Plus: return 1;
    case Branch::Minus: return -1;
    default: return 0;
  }
}

inline const char* to_string(Family f) { return f == Family::L ? "L" : "M"; }

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Plus: return "+";
    case Branch::Minus: return "-";
    default: return "0";
  }
}

}  // namespace kglab
