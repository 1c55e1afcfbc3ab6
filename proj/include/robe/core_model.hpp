#pragma once

// Coefficient matrices of the planar linearized system about the elliptic
// equilibrium, with the true anomaly t as the time variable.

#include <cmath>

#include "robe/types.hpp"

namespace robe {

/// Standard symplectic matrix [[0, -I], [I, 0]] on R^4.
inline Matrix4 symplectic_J() {
  Matrix4 j = Matrix4::Zero();
  j.topRightCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  j.bottomLeftCorner<2, 2>() = Eigen::Matrix2d::Identity();
  return j;
}

/// [[0, -1], [1, 0]].
inline Matrix2 symplectic_J2() {
  Matrix2 j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

inline Matrix2 rotation(double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  Matrix2 r;
  r << c, -s, s, c;
  return r;
}

inline Matrix4 rotation_R4(double t) {
  Matrix4 r = Matrix4::Zero();
  r.topLeftCorner<2, 2>() = rotation(t);
  r.bottomRightCorner<2, 2>() = rotation(t);
  return r;
}

/// Reflection-like matrix [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
inline Matrix2 reflection_S(double t) {
  const double c = std::cos(2.0 * t);
  const double s = std::sin(2.0 * t);
  Matrix2 m;
  m << c, s, s, -c;
  return m;
}

/// 1 / (1 + e cos t); positive for e < 1.
inline double kepler_factor(double t, double e) { return 1.0 / (1.0 + e * std::cos(t)); }

/// Q(t) = diag((1 + 2 mu), (1 - mu)) / (1 + e cos t).
inline Matrix2 q_matrix(double t, const ParameterPoint& p) {
  const double k = kepler_factor(t, p.e());
  Matrix2 q = Matrix2::Zero();
  q(0, 0) = (1.0 + 2.0 * p.mu()) * k;
  q(1, 1) = (1.0 - p.mu()) * k;
  return q;
}

/// Symmetric B(t) of the first-order system w' = J B(t) w, with
/// w = (x' - y, y' + x, x, y).
inline Matrix4 coefficient_matrix_B(double t, const ParameterPoint& p) {
  const Matrix2 q = q_matrix(t, p);
  Matrix4 b;
  b << 1.0, 0.0, 0.0, 1.0,
       0.0, 1.0, -1.0, 0.0,
       0.0, -1.0, 1.0 - q(0, 0), 0.0,
       1.0, 0.0, 0.0, 1.0 - q(1, 1);
  return b;
}

/// Multiplicative part of the second-order operator in the rotating frame,
/// -I + ((2 + mu) I + 3 mu S(t)) / (2 (1 + e cos t)).
inline Matrix2 second_order_potential(double t, const ParameterPoint& p) {
  const double k = kepler_factor(t, p.e());
  Matrix2 v = (0.5 * k * (2.0 + p.mu())) * Matrix2::Identity() +
              (1.5 * k * p.mu()) * reflection_S(t);
  v -= Matrix2::Identity();
  return v;
}

/// The same potential written as -I + R(t) Q(t) R(t)^T.
inline Matrix2 second_order_potential_rotated(double t, const ParameterPoint& p) {
  const Matrix2 r = rotation(t);
  return r * q_matrix(t, p) * r.transpose() - Matrix2::Identity();
}

/// Coefficient of the rotated first-order system xi' = J diag(I, R (I - Q) R^T) xi.
inline Matrix4 rotated_coefficient_matrix(double t, const ParameterPoint& p) {
  Matrix4 b = Matrix4::Zero();
  b.topLeftCorner<2, 2>() = Matrix2::Identity();
  b.bottomRightCorner<2, 2>() = -second_order_potential_rotated(t, p);
  return b;
}

enum class ParameterDirection { Mu, E };

/// Partial derivative of the potential R Q R^T along mu or e.
inline Matrix2 potential_derivative(double t, const ParameterPoint& p, ParameterDirection dir) {
  const double k = kepler_factor(t, p.e());
  Matrix2 dq = Matrix2::Zero();
  if (dir == ParameterDirection::Mu) {
    dq(0, 0) = 2.0 * k;
    dq(1, 1) = -k;
  } else {
    const double dk = -std::cos(t) * k * k;
    dq(0, 0) = (1.0 + 2.0 * p.mu()) * dk;
    dq(1, 1) = (1.0 - p.mu()) * dk;
  }
  const Matrix2 r = rotation(t);
  return r * dq * r.transpose();
}

}  // namespace robe
