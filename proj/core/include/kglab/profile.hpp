#pragma once

#include "kglab/bilinear.hpp"
#include "kglab/field.hpp"

#include <stdexcept>
#include <vector>

namespace kglab {

/// Trigonometric polynomial in the fast phase: a map from harmonic index
/// p in [-cutoff, cutoff] to a complex 3-vector grid function.
class Profile {
 public:
  Profile() = default;
  Profile(int cutoff, Eigen::Index n_points) : cutoff_(cutoff), n_(n_points) {
    harmonics_.resize(2 * cutoff + 1);
  }

  int cutoff() const { return cutoff_; }
  Eigen::Index n_points() const { return n_; }

  bool has(int p) const {
    return std::abs(p) <= cutoff_ && harmonics_[p + cutoff_].size() == n_;
  }

  const Vec3Grid& at(int p) const {
    if (!has(p)) throw std::out_of_range("Profile::at: harmonic not stored");
    return harmonics_[p + cutoff_];
  }

  void set(int p, Vec3Grid value) {
    if (std::abs(p) > cutoff_) throw std::out_of_range("Profile::set: harmonic beyond cutoff");
    if (value.size() != n_) throw std::invalid_argument("Profile::set: grid size mismatch");
    harmonics_[p + cutoff_] = std::move(value);
  }

  void add(int p, const Vec3Grid& value) {
    if (has(p))
      harmonics_[p + cutoff_] += value;
    else
      set(p, value);
  }

  std::vector<int> support() const {
    std::vector<int> s;
    for (int p = -cutoff_; p <= cutoff_; ++p)
      if (has(p) && !at(p).isZero()) s.push_back(p);
    return s;
  }

  /// Max pointwise norm of coefficient(-p) - conj(coefficient(p)).
  Real reality_defect() const;

 private:
  int cutoff_ = 0;
  Eigen::Index n_ = 0;
  std::vector<Vec3Grid> harmonics_;
};

/// Harmonic-by-harmonic product: (out)_p = sum_{p1+p2=p} B(a_{p1}, b_{p2})
/// pointwise. The output cutoff must accommodate the full support sum, else
/// this throws (callers wanting truncation pass truncate=true).
Profile profile_bilinear(BilinearId B, const Profile& a, const Profile& b, int out_cutoff,
                         bool truncate = false);

}  // namespace kglab
