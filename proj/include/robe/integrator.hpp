#pragma once

// Fixed-step high-order propagation of the fundamental solution of a
// 2 pi-periodic linear Hamiltonian system Y' = J B(t) Y, Y(0) = I.

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "robe/core_model.hpp"
#include "robe/errors.hpp"
#include "robe/types.hpp"

namespace robe {

struct IntegratorConfig {
  /// Bound on the step-doubling error estimate (relative to max(1, |M|)) and
  /// on the symplectic residual.
  double tolerance = 1e-10;
  int initial_steps = 8;
  int max_steps = 1 << 17;
};

struct FundamentalSolution {
  Matrix4 value;
  int steps = 0;
  double error_estimate = 0.0;
  double symplectic_residual = 0.0;
};

/// max |M^T J M - J|.
inline double symplectic_residual(const Matrix4& m) {
  const Matrix4 j = symplectic_J();
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

namespace detail {

using FlatState = std::array<double, 16>;

inline Matrix4 to_matrix(const FlatState& s) { return Eigen::Map<const Matrix4>(s.data()); }

template <class CoefficientFn>
Matrix4 propagate_fixed(const CoefficientFn& coefficient, int steps) {
  namespace odeint = boost::numeric::odeint;
  const Matrix4 j = symplectic_J();
  auto rhs = [&](const FlatState& y, FlatState& dydt, double t) {
    Eigen::Map<Matrix4> out(dydt.data());
    out.noalias() = j * (coefficient(t) * Eigen::Map<const Matrix4>(y.data()));
  };

  FlatState state{};
  Eigen::Map<Matrix4>(state.data()) = Matrix4::Identity();
  odeint::runge_kutta_fehlberg78<FlatState> stepper;
  const double dt = kTwoPi / steps;
  for (int i = 0; i < steps; ++i) {
    stepper.do_step(rhs, state, i * dt, dt);
  }
  return to_matrix(state);
}

}  // namespace detail

/// Doubles the step count until successive results agree and the result is
/// symplectic to cfg.tolerance.  Deterministic for a fixed configuration.
template <class CoefficientFn>
FundamentalSolution integrate_fundamental(const CoefficientFn& coefficient,
                                          const IntegratorConfig& cfg) {
  if (!(cfg.tolerance > 0.0) || cfg.initial_steps < 1 || cfg.max_steps < cfg.initial_steps) {
    throw InvalidParameter("invalid integrator configuration");
  }
  int steps = cfg.initial_steps;
  Matrix4 previous = detail::propagate_fixed(coefficient, steps);
  FundamentalSolution best{previous, steps, 0.0, symplectic_residual(previous)};
  while (2 * steps <= cfg.max_steps) {
    steps *= 2;
    const Matrix4 current = detail::propagate_fixed(coefficient, steps);
    const double scale = std::max(1.0, current.cwiseAbs().maxCoeff());
    // |M_2n - M_n| bounds the error of M_n; M_2n is returned.
    const double err = (current - previous).cwiseAbs().maxCoeff() / scale;
    best = FundamentalSolution{current, steps, err, symplectic_residual(current)};
    // Rounding alone leaves a residual of order eps |M|^2.
    const double residual_floor = 64.0 * std::numeric_limits<double>::epsilon() * scale * scale;
    if (err <= cfg.tolerance && best.symplectic_residual <= std::max(cfg.tolerance, residual_floor)) {
      return best;
    }
    previous = current;
  }
  throw ToleranceNotMet("fundamental solution did not reach tolerance " +
                        std::to_string(cfg.tolerance) + " within " +
                        std::to_string(cfg.max_steps) + " steps (residual " +
                        std::to_string(best.symplectic_residual) + ")");
}

}  // namespace robe
