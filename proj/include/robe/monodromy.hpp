#pragma once

// Monodromy matrix gamma(2 pi) of the linearized system and the closed-form
// circular-orbit (e = 0) reference.

#include <array>
#include <cmath>
#include <optional>

#include "robe/core_model.hpp"
#include "robe/integrator.hpp"
#include "robe/symplectic.hpp"
#include "robe/types.hpp"

namespace robe {

/// gamma(2 pi) for w' = J B(t) w, gamma(0) = I.
inline SymplecticMatrix4 integrate_monodromy(const ParameterPoint& p,
                                             const IntegratorConfig& cfg = {}) {
  const auto sol = integrate_fundamental(
      [&p](double t) { return coefficient_matrix_B(t, p); }, cfg);
  return {sol.value, sol.symplectic_residual};
}

/// xi(2 pi) of the rotated system xi = R4(t) gamma(t); equals gamma(2 pi).
inline SymplecticMatrix4 integrate_rotated_monodromy(const ParameterPoint& p,
                                                     const IntegratorConfig& cfg = {}) {
  const auto sol = integrate_fundamental(
      [&p](double t) { return rotated_coefficient_matrix(t, p); }, cfg);
  return {sol.value, sol.symplectic_residual};
}

/// exp(A) by scaling and squaring of a truncated Taylor series.
inline Matrix4 matrix_exponential(const Matrix4& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix4 scaled = a / std::ldexp(1.0, squarings);
  Matrix4 term = Matrix4::Identity();
  Matrix4 sum = Matrix4::Identity();
  // ||scaled|| <= 1/2: 2^-24 / 24! is far below double precision.
  for (int k = 1; k <= 24; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

struct CircularOrbitReference {
  EigenvalueQuad eigenvalues{};
  /// Rotation numbers theta1 <= theta2 (multipliers exp(+-2 pi i theta_k)),
  /// present for mu in [8/9, 1].
  std::optional<double> theta1;
  std::optional<double> theta2;
  SymplecticMatrix4 monodromy;
};

/// Closed forms for e = 0, where B is constant and the characteristic
/// polynomial of J B is x^4 + (2 - mu) x^2 + (1 - mu)(1 + 2 mu).
inline CircularOrbitReference e_zero_oracle(double mu) {
  const ParameterPoint p(mu, 0.0);
  CircularOrbitReference out;
  const Complex root = std::sqrt(Complex(9.0 * mu * mu - 8.0 * mu));
  const Complex alpha1 = 0.5 * (mu - 2.0 + root);
  const Complex alpha2 = 0.5 * (mu - 2.0 - root);
  const Complex s1 = std::sqrt(alpha1);
  const Complex s2 = std::sqrt(alpha2);
  out.eigenvalues = {std::exp(kTwoPi * s1), std::exp(-kTwoPi * s1), std::exp(kTwoPi * s2),
                     std::exp(-kTwoPi * s2)};
  if (mu >= kMuHyperbolicCircular) {
    const double r = std::sqrt(std::max(0.0, 9.0 * mu * mu - 8.0 * mu));
    out.theta1 = std::sqrt(std::max(0.0, 0.5 * (2.0 - mu - r)));
    out.theta2 = std::sqrt(0.5 * (2.0 - mu + r));
  }
  const Matrix4 jb = symplectic_J() * coefficient_matrix_B(0.0, p);
  out.monodromy = SymplecticMatrix4::from(matrix_exponential(kTwoPi * jb));
  return out;
}

}  // namespace robe
