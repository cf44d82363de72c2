#include "kglab/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kglab;
using namespace kglab::model;

namespace {

const ModelParams kRunning{0.5, 2.7, 1.0, 1e-2};

// Closed-form phase in extended precision, used as the oracle throughout.
struct PhaseOracle {
  long double k, omega;
  explicit PhaseOracle(const ModelParams& p) {
    const long double a2over9 = (long double)p.alpha0 * p.alpha0 / 9.0L;
    const long double k2 =
        (1.0L - a2over9) / (1.0L - (long double)p.theta0 * p.theta0) * p.omega0 * p.omega0;
    k = sqrtl(k2);
    omega = sqrtl(k2 + a2over9 * p.omega0 * p.omega0);
  }
};

}  // namespace

TEST_CASE("dispersion closed forms and examples") {
  const auto& p = kRunning;
  CHECK(dispersion(Family::L, 0.0, p) == doctest::Approx(p.alpha0 * p.omega0).epsilon(1e-15));
  CHECK(dispersion(Family::M, 0.0, p) == doctest::Approx(p.omega0).epsilon(1e-15));

  const PhaseOracle oracle(p);
  const Phase ph = solve_phase(p);
  // mu(k) evaluated in extended precision equals omega.
  const long double mu_k = sqrtl((long double)p.omega0 * p.omega0 +
                                 (long double)p.theta0 * p.theta0 * oracle.k * oracle.k);
  CHECK(std::abs((double)(mu_k - oracle.omega)) / ph.omega < 1e-14);
  CHECK(dispersion(Family::M, ph.k, p) == doctest::Approx(ph.omega).epsilon(1e-14));
}

TEST_CASE("group velocity: parity, limits, finite differences") {
  const auto& p = kRunning;
  CHECK(group_velocity(Family::L, 0.0, p) == 0.0);
  CHECK(group_velocity(Family::M, 1e6, p) == doctest::Approx(p.theta0).epsilon(1e-6));

  const Phase ph = solve_phase(p);
  const Real xi = 3.0 * ph.k;
  const Real h = 1e-6;
  const Real fd = (dispersion(Family::L, xi + h, p) - dispersion(Family::L, xi - h, p)) / (2 * h);
  CHECK(group_velocity(Family::L, xi, p) == doctest::Approx(fd).epsilon(1e-6));

  // parity: dispersion even, group velocity odd
  for (Real x : {0.3, 1.7, 5.2}) {
    CHECK(dispersion(Family::L, -x, p) == doctest::Approx(dispersion(Family::L, x, p)));
    CHECK(group_velocity(Family::M, -x, p) ==
          doctest::Approx(-group_velocity(Family::M, x, p)));
  }
}

TEST_CASE("solve_phase: oracle values, homogeneity, boundary behaviour") {
  const Phase ph = solve_phase(kRunning);
  CHECK(ph.k == doctest::Approx(0.5033222957).epsilon(1e-9));
  CHECK(ph.omega == doctest::Approx(1.0311805532).epsilon(1e-9));

  // phase identities to 1e-14 relative
  CHECK(std::abs(dispersion(Family::M, ph.k, kRunning) - ph.omega) / ph.omega < 1e-14);
  CHECK(std::abs(dispersion(Family::L, 3 * ph.k, kRunning) - 3 * ph.omega) / (3 * ph.omega) <
        1e-14);

  // homogeneity in omega0
  for (Real c : {0.5, 2.0, 7.3}) {
    ModelParams q = kRunning;
    q.omega0 *= c;
    const Phase ph2 = solve_phase(q);
    CHECK(ph2.k == doctest::Approx(c * ph.k).epsilon(1e-14));
    CHECK(ph2.omega == doctest::Approx(c * ph.omega).epsilon(1e-14));
  }

  // k -> 0+ as alpha0 -> 3-
  ModelParams q = kRunning;
  q.alpha0 = 2.999;
  CHECK(solve_phase(q).k < 0.06);
  CHECK(solve_phase(q).k > 0.0);

  q.alpha0 = 3.2;
  CHECK_THROWS_AS(solve_phase(q), std::invalid_argument);
  q.alpha0 = 2.0;
  CHECK_THROWS_AS(solve_phase(q), std::invalid_argument);
}

TEST_CASE("parameter validation box and override") {
  ModelParams p = kRunning;
  CHECK_NOTHROW(p.validate());
  p.theta0 = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.allow_outside_regime = true;
  CHECK_NOTHROW(p.validate());
  p.epsilon = 2.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("char_matrix: characteristic determinants and kernels") {
  const auto& p = kRunning;
  const Phase ph = solve_phase(p);

  std::mt19937 rng(12345);
  std::uniform_real_distribution<Real> dist(-10.0, 10.0);
  for (int i = 0; i < 50; ++i) {
    const Real xi = dist(rng);
    const Mat3c A = char_matrix(Family::L, dispersion(Family::L, xi, p), xi, p);
    CHECK(std::abs(A.determinant()) < 1e-12);
  }
  CHECK(std::abs(char_matrix(Family::M, ph.omega, ph.k, p).determinant()) < 1e-12);

  // char_matrix(L, 0, 0) has kernel spanned by (1,0,0)
  const Mat3c Z = char_matrix(Family::L, 0.0, 0.0, p);
  CHECK((Z * Vec3c::UnitX()).norm() < 1e-15);
  CHECK((Z * Vec3c::UnitY()).norm() > 0.1);
}

TEST_CASE("projector: invariants on sampled frequencies") {
  const auto& p = kRunning;
  std::mt19937 rng(777);
  std::uniform_real_distribution<Real> dist(-12.0, 12.0);

  for (Family fam : {Family::L, Family::M}) {
    for (int i = 0; i < 50; ++i) {
      const Real xi = dist(rng);
      Mat3c sum = Mat3c::Zero();
      for (Branch b : {Branch::Plus, Branch::Minus, Branch::Zero}) {
        const Mat3c P = projector({fam, b}, xi, p);
        CHECK((P - P.adjoint()).norm() < 1e-13);
        CHECK((P * P - P).norm() < 1e-13);
        const auto sv = Eigen::JacobiSVD<Mat3c>(P).singularValues();
        CHECK(sv(1) < 1e-12);
        CHECK(sv(2) < 1e-12);
        // column space annihilated by the characteristic matrix
        const Mat3c A = char_matrix(fam, branch_value(fam, b, xi, p), xi, p);
        CHECK((A * P).norm() < 1e-12);
        sum += P;
      }
      CHECK((sum - Mat3c::Identity()).norm() < 1e-12);

      // pairwise orthogonality
      const Mat3c Pp = projector({fam, Branch::Plus}, xi, p);
      const Mat3c Pm = projector({fam, Branch::Minus}, xi, p);
      const Mat3c P0 = projector({fam, Branch::Zero}, xi, p);
      CHECK((Pp * Pm).norm() < 1e-13);
      CHECK((Pp * P0).norm() < 1e-13);
      CHECK((Pm * P0).norm() < 1e-13);
    }
  }

  // (L, 0, xi=0) projects onto (1,0,0)
  Mat3c D = projector({Family::L, Branch::Zero}, 0.0, p);
  CHECK((D - Vec3c::UnitX() * Vec3c::UnitX().transpose()).norm() < 1e-15);
}

TEST_CASE("spectral reconstruction of the tau=0 symbol") {
  const auto& p = kRunning;
  std::mt19937 rng(4242);
  std::uniform_real_distribution<Real> dist(-9.0, 9.0);
  for (Family fam : {Family::L, Family::M}) {
    for (int i = 0; i < 25; ++i) {
      const Real xi = dist(rng);
      const Real lam = dispersion(fam, xi, p);
      const Mat3c rec = I * lam * projector({fam, Branch::Plus}, xi, p) -
                        I * lam * projector({fam, Branch::Minus}, xi, p);
      CHECK((char_matrix(fam, 0.0, xi, p) - rec).norm() < 1e-12);
    }
  }
}

TEST_CASE("phase identities across the admissible parameter box") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<Real> dtheta(0.05, 0.95), dalpha(2.51, 2.99), domega(0.2, 5.0);
  for (int i = 0; i < 100; ++i) {
    ModelParams p{dtheta(rng), dalpha(rng), domega(rng), 1e-2};
    const Phase ph = solve_phase(p);
    CHECK(std::abs(dispersion(Family::M, ph.k, p) - ph.omega) / ph.omega < 1e-12);
    CHECK(std::abs(dispersion(Family::L, 3 * ph.k, p) - 3 * ph.omega) / (3 * ph.omega) < 1e-12);
  }
}

TEST_CASE("partial inverses: defining properties") {
  const auto& p = kRunning;
  const Phase ph = solve_phase(p);

  // p=2, family M: genuinely invertible
  const Mat3c M2 = char_matrix(Family::M, 2 * ph.omega, 2 * ph.k, p);
  const Mat3c M2inv = partial_inverse(Family::M, 2, ph, p);
  CHECK((M2 * M2inv - Mat3c::Identity()).norm() < 1e-12);
  CHECK(harmonic_projector(Family::M, 2, ph, p).norm() == 0.0);

  // p=1, family M: pseudoinverse complementary to the kernel projector
  const Mat3c M1 = char_matrix(Family::M, ph.omega, ph.k, p);
  const Mat3c M1inv = partial_inverse(Family::M, 1, ph, p);
  const Mat3c Q1 = harmonic_projector(Family::M, 1, ph, p);
  CHECK((M1inv * M1 - (Mat3c::Identity() - Q1)).norm() < 1e-12);

  // p=3, family L
  const Mat3c L3 = char_matrix(Family::L, 3 * ph.omega, 3 * ph.k, p);
  const Mat3c L3inv = partial_inverse(Family::L, 3, ph, p);
  const Mat3c P3 = harmonic_projector(Family::L, 3, ph, p);
  CHECK((L3inv * L3 - (Mat3c::Identity() - P3)).norm() < 1e-12);

  // characteristic harmonic bookkeeping
  CHECK(is_characteristic(Family::L, 3, ph, p));
  CHECK(is_characteristic(Family::L, 0, ph, p));
  CHECK_FALSE(is_characteristic(Family::L, 1, ph, p));
  CHECK_FALSE(is_characteristic(Family::M, 2, ph, p));
  CHECK(is_characteristic(Family::M, -1, ph, p));
}
