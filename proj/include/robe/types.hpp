#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "robe/errors.hpp"

namespace robe {

using Matrix2 = Eigen::Matrix2d;
using Matrix4 = Eigen::Matrix4d;
using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Largest eccentricity accepted by default.
inline constexpr double kDefaultEMax = 0.99;

/// Double -1-degenerate mass ratio on the circular orbit, (5 + sqrt(97)) / 16.
inline const double kMuStar = (5.0 + std::sqrt(97.0)) / 16.0;

/// Mass ratio where the circular-orbit spectrum first touches the unit circle.
inline constexpr double kMuHyperbolicCircular = 8.0 / 9.0;

/// A point (mu, e) of the parameter rectangle.  The buoyancy constant is
/// fixed to zero and has no field.
class ParameterPoint {
 public:
  ParameterPoint(double mu, double e, double e_max = kDefaultEMax) : mu_(mu), e_(e) {
    if (!(e_max >= 0.0 && e_max < 1.0)) {
      throw InvalidParameter("e_max must lie in [0, 1)");
    }
    if (!(mu >= 0.0 && mu <= 1.0)) {
      throw InvalidParameter("mu must lie in [0, 1], got " + std::to_string(mu));
    }
    if (!(e >= 0.0 && e <= e_max)) {
      throw InvalidParameter("e must lie in [0, " + std::to_string(e_max) + "], got " +
                             std::to_string(e));
    }
  }

  double mu() const noexcept { return mu_; }
  double e() const noexcept { return e_; }

  friend bool operator==(const ParameterPoint&, const ParameterPoint&) = default;

 private:
  double mu_;
  double e_;
};

/// omega = exp(i * angle) on the unit circle, angle kept in [0, 2 pi).
class UnitCirclePoint {
 public:
  UnitCirclePoint() = default;
  explicit UnitCirclePoint(double angle) : angle_(normalize(angle)) {}

  static UnitCirclePoint one() { return UnitCirclePoint(0.0); }
  static UnitCirclePoint minus_one() { return UnitCirclePoint(std::numbers::pi); }

  double angle() const noexcept { return angle_; }
  Complex value() const { return std::polar(1.0, angle_); }

  /// Fractional Floquet shift angle / (2 pi) in [0, 1).
  double twist() const noexcept { return angle_ / kTwoPi; }

  bool is_one() const noexcept { return angle_ == 0.0; }

  friend bool operator==(const UnitCirclePoint&, const UnitCirclePoint&) = default;

 private:
  static double normalize(double angle) {
    if (!std::isfinite(angle)) throw InvalidParameter("omega angle must be finite");
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
  }

  double angle_ = 0.0;
};

}  // namespace robe
