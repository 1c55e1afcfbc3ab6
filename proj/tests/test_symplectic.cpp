#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <catch_amalgamated.hpp>

#include "robe/monodromy.hpp"
#include "robe/symplectic.hpp"

using namespace robe;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

// Blocks acting on the conjugate planes (q1, p1) = (0, 2) and (q2, p2) = (1, 3).
Matrix4 planes(const Matrix2& first, const Matrix2& second) {
  Matrix4 m = Matrix4::Zero();
  const std::array<int, 2> a{0, 2};
  const std::array<int, 2> b{1, 3};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      m(a[i], a[j]) = first(i, j);
      m(b[i], b[j]) = second(i, j);
    }
  }
  return m;
}

Matrix2 rot(double theta) {
  Matrix2 r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Matrix2 diag(double lambda) {
  Matrix2 d;
  d << lambda, 0.0, 0.0, 1.0 / lambda;
  return d;
}

Matrix2 shear(double lambda, double a) {
  Matrix2 n;
  n << lambda, a, 0.0, lambda;
  return n;
}

SymplecticMatrix4 wrap(const Matrix4& m) { return SymplecticMatrix4::from(m); }

double matched(const EigenvalueQuad& a, const std::array<Complex, 4>& b) {
  std::array<int, 4> perm{0, 1, 2, 3};
  double best = 1e300;
  do {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Matrix4 random_symplectic(std::mt19937_64& rng, double size) {
  std::normal_distribution<double> g(0.0, size);
  Matrix4 s;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = g(rng);
  }
  return matrix_exponential(symplectic_J() * s);
}

}  // namespace

TEST_CASE("synthetic block matrices are symplectic", "[symplectic]") {
  CHECK(symplectic_residual(planes(rot(0.3), diag(2.0))) < 1e-15);
  CHECK(symplectic_residual(planes(shear(-1.0, 1.0), rot(1.0))) < 1e-15);
}

TEST_CASE("eigenvalues agree with a general eigensolver", "[symplectic]") {
  std::mt19937_64 rng(31);
  for (int s = 0; s < 100; ++s) {
    const Matrix4 m = random_symplectic(rng, 0.8);
    Eigen::EigenSolver<Matrix4> es(m);
    std::array<Complex, 4> ref;
    for (int i = 0; i < 4; ++i) ref[i] = es.eigenvalues()(i);
    const auto ev = eigenvalues_symplectic(wrap(m));
    const double scale = std::max(1.0, m.norm());
    CHECK(matched(ev, ref) < 1e-7 * scale);
  }
}

TEST_CASE("eigenvalues are closed under conjugation and inversion", "[symplectic]") {
  std::mt19937_64 rng(32);
  for (int s = 0; s < 100; ++s) {
    const auto ev = eigenvalues_symplectic(wrap(random_symplectic(rng, 0.6)));
    std::array<Complex, 4> conj;
    std::array<Complex, 4> inv;
    for (int i = 0; i < 4; ++i) {
      conj[i] = std::conj(ev[i]);
      inv[i] = 1.0 / ev[i];
    }
    CHECK(matched(ev, conj) < 1e-8);
    CHECK(matched(ev, inv) < 1e-8);
  }
}

TEST_CASE("elliptic eigenvalues keep unit modulus", "[symplectic]") {
  const auto ev = eigenvalues_symplectic(wrap(planes(rot(0.7), rot(2.0))));
  for (const auto& z : ev) CHECK_THAT(std::abs(z), WithinAbs(1.0, 1e-15));
}

TEST_CASE("nullity counts the geometric multiplicity", "[symplectic]") {
  CHECK(nullity_omega(wrap(planes(rot(0.7), rot(2.0))), UnitCirclePoint(0.7)) == 1);
  CHECK(nullity_omega(wrap(planes(rot(0.7), rot(2.0))), UnitCirclePoint(-0.7)) == 1);
  CHECK(nullity_omega(wrap(planes(rot(0.7), rot(0.7))), UnitCirclePoint(0.7)) == 2);
  CHECK(nullity_omega(wrap(planes(rot(0.7), rot(2.0))), UnitCirclePoint(1.5)) == 0);
  CHECK(nullity_omega(wrap(Matrix4::Identity()), UnitCirclePoint::one()) == 4);
  // A Jordan block has a one-dimensional kernel.
  CHECK(nullity_omega(wrap(planes(shear(1.0, 1.0), diag(3.0))), UnitCirclePoint::one()) == 1);
  CHECK(nullity_omega(wrap(planes(shear(-1.0, 1.0), shear(-1.0, -2.0))), UnitCirclePoint::minus_one()) == 2);
}

TEST_CASE("degeneracy scalar vanishes exactly on kernels", "[symplectic]") {
  const auto m = wrap(planes(rot(0.7), diag(2.0)));
  CHECK_THAT(degeneracy_scalar(m, UnitCirclePoint(0.7)), WithinAbs(0.0, 1e-12));
  CHECK(std::abs(degeneracy_scalar(m, UnitCirclePoint(1.7))) > 1e-3);
  // For a generic symplectic matrix, D is real and zero only with a kernel.
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int s = 0; s < 50; ++s) {
    const auto r = wrap(random_symplectic(rng, 0.5));
    const UnitCirclePoint w(angle(rng));
    const double d = degeneracy_scalar(r, w);
    if (nullity_omega(r, w) == 0) CHECK(std::abs(d) > 0.0);
  }
  // The value at omega = 1 is det(M - I), a real number.
  CHECK_THAT(degeneracy_scalar(m, UnitCirclePoint::one()), WithinAbs(-(m.entries - Matrix4::Identity()).determinant(), 1e-12));
}

TEST_CASE("degeneracy scalar rejects non-symplectic input", "[symplectic]") {
  Matrix4 m;
  m << 1, 2, 3, 4, 0, 1, 5, 2, 3, 0, 2, 1, 1, 1, 0, 3;
  CHECK_THROWS_AS(degeneracy_scalar(wrap(m), UnitCirclePoint(1.0)), NonRealResult);
}

TEST_CASE("classification of generic normal forms", "[symplectic]") {
  const auto hh = classify_stability(wrap(planes(diag(2.0), diag(-3.0))));
  CHECK(hh.tag == StabilityTag::HyperbolicHyperbolic);
  CHECK(hh.elliptic_angles.empty());

  const auto eh = classify_stability(wrap(planes(rot(1.0), diag(2.0))));
  CHECK(eh.tag == StabilityTag::EllipticHyperbolic);
  REQUIRE(eh.elliptic_angles.size() == 1);
  CHECK_THAT(eh.elliptic_angles[0], WithinAbs(1.0, 1e-12));

  const auto ee = classify_stability(wrap(planes(rot(1.0), rot(kTwoPi - 2.0))));
  CHECK(ee.tag == StabilityTag::EllipticElliptic);
  CHECK(ee.strong);
  REQUIRE(ee.elliptic_angles.size() == 2);
  CHECK_THAT(ee.elliptic_angles[0], WithinAbs(1.0, 1e-12));
  CHECK_THAT(ee.elliptic_angles[1], WithinAbs(kTwoPi - 2.0, 1e-12));
}

TEST_CASE("rotation angle follows the symplectic orientation", "[symplectic]") {
  for (double theta : {0.4, 2.0, 3.5, 5.9}) {
    const auto m = wrap(planes(rot(theta), diag(3.0)));
    const Complex upper = std::polar(1.0, theta < kPi ? theta : kTwoPi - theta);
    CHECK_THAT(normal_form_angle(m, upper), WithinAbs(theta, 1e-12));
  }
}

TEST_CASE("classification of degenerate forms", "[symplectic]") {
  const auto at_minus_one = classify_stability(wrap(planes(shear(-1.0, 1.0), rot(1.0))));
  CHECK(at_minus_one.tag == StabilityTag::Degenerate);
  const auto it = std::find_if(at_minus_one.degenerate.begin(), at_minus_one.degenerate.end(),
                               [](const DegeneratePoint& d) { return std::abs(d.omega.angle() - kPi) < 1e-9; });
  REQUIRE(it != at_minus_one.degenerate.end());
  CHECK(it->nullity == 1);
  CHECK(it->algebraic_multiplicity == 2);
  CHECK(it->kind == NormalFormKind::N1Positive);

  const auto negative = classify_stability(wrap(planes(shear(-1.0, -1.0), rot(1.0))));
  const auto jt = std::find_if(negative.degenerate.begin(), negative.degenerate.end(),
                               [](const DegeneratePoint& d) { return std::abs(d.omega.angle() - kPi) < 1e-9; });
  REQUIRE(jt != negative.degenerate.end());
  CHECK(jt->kind == NormalFormKind::N1Negative);

  const auto identity = classify_stability(wrap(Matrix4::Identity()));
  CHECK(identity.tag == StabilityTag::Degenerate);
  REQUIRE(identity.degenerate.size() == 1);
  CHECK(identity.degenerate[0].nullity == 4);
  CHECK(identity.degenerate[0].algebraic_multiplicity == 4);

  const auto collision = classify_stability(wrap(planes(rot(1.0), rot(1.0))));
  CHECK(collision.tag == StabilityTag::EllipticElliptic);
  CHECK_FALSE(collision.strong);
}

TEST_CASE("circular orbit classifications", "[symplectic]") {
  CHECK(classify_stability(integrate_monodromy(ParameterPoint(0.5, 0.0))).tag ==
        StabilityTag::HyperbolicHyperbolic);
  const auto strong = classify_stability(integrate_monodromy(ParameterPoint(0.95, 0.0)));
  CHECK(strong.tag == StabilityTag::EllipticElliptic);
  CHECK(strong.strong);
  const auto between = classify_stability(integrate_monodromy(ParameterPoint(0.91, 0.0)));
  CHECK(between.tag == StabilityTag::EllipticElliptic);
  REQUIRE(between.elliptic_angles.size() == 2);
  CHECK(between.elliptic_angles[0] < kPi);
  CHECK(between.elliptic_angles[1] > kPi);
  const auto at_star = classify_stability(integrate_monodromy(ParameterPoint(kMuStar, 0.0)));
  CHECK(at_star.tag == StabilityTag::Degenerate);
  CHECK(std::any_of(at_star.degenerate.begin(), at_star.degenerate.end(),
                    [](const DegeneratePoint& d) { return std::abs(d.omega.angle() - kPi) < 1e-9 && d.nullity == 2; }));
}
