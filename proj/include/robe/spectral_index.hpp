#pragma once

// omega-Morse index and nullity of the self-adjoint operator
//   A(mu, e) = -d^2/dt^2 - I + R(t) Q(t) R(t)^T
// on y(2 pi) = omega y(0), y'(2 pi) = omega y'(0), by Fourier-Galerkin
// truncation.  Its Morse index equals the Maslov-type omega-index of the
// fundamental solution, and its nullity the omega-nullity of gamma(2 pi).
//
// Basis: e_k(t) u_s with e_k(t) = exp(i (k + s) t), s = angle(omega) / 2 pi,
// k in [-N, N], and the circular unit vectors u_+ = (1, i)/sqrt2,
// u_- = (1, -i)/sqrt2.  In this basis the matrix is real symmetric:
//   <e_k u_+, A e_l u_+> = ((k+s)^2 - 1) d_kl + (2 + mu)/2 c_{k-l}
//   <e_k u_+, A e_l u_-> = 3 mu / 2 c_{k-l+2}
// where c_m are the Fourier coefficients of 1 / (1 + e cos t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "robe/core_model.hpp"
#include "robe/errors.hpp"
#include "robe/types.hpp"

namespace robe {

/// c_m = (1 / 2 pi) int exp(-i m t) / (1 + e cos t) dt
///     = r^|m| / sqrt(1 - e^2), r = (sqrt(1 - e^2) - 1) / e.
inline double inverse_kepler_coefficient(double e, int m) {
  if (!(e >= 0.0 && e < 1.0)) throw InvalidParameter("eccentricity must lie in [0, 1)");
  if (e <= 1e-8) return m == 0 ? 1.0 : 0.0;
  const double root = std::sqrt((1.0 - e) * (1.0 + e));
  const double r = -e / (1.0 + root);
  return std::pow(r, std::abs(m)) / root;
}

struct IndexPair {
  int index = 0;
  int nullity = 0;

  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// Galerkin matrix of A(mu, e) on the omega-twisted domain (real symmetric in
/// the circular basis, hence Hermitian).
struct TruncatedOperator {
  Eigen::MatrixXd matrix;
  int truncation_order = 0;
  UnitCirclePoint omega;
  ParameterPoint params{0.0, 0.0};

  int size() const { return static_cast<int>(matrix.rows()); }
  /// Position of mode k (in [-N, N]) with circular component + or -.
  int position(int k, bool plus) const {
    return (plus ? 0 : 2 * truncation_order + 1) + k + truncation_order;
  }
};

namespace detail {

inline std::vector<double> kepler_coefficient_table(double e, int max_abs_m) {
  std::vector<double> c(2 * max_abs_m + 1);
  for (int m = -max_abs_m; m <= max_abs_m; ++m) c[m + max_abs_m] = inverse_kepler_coefficient(e, m);
  return c;
}

/// Fills `out` with scalar_weight * c_{k-l} on the diagonal blocks and
/// cross_weight * c_{k-l+-2} on the off-diagonal blocks.
inline void add_potential(Eigen::MatrixXd& out, int n_trunc, double e, double scalar_weight,
                          double cross_weight) {
  const int n = 2 * n_trunc + 1;
  const int max_m = 2 * n_trunc + 2;
  const auto c = kepler_coefficient_table(e, max_m);
  const auto coef = [&](int m) { return c[m + max_m]; };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int d = a - b;  // k - l
      out(a, b) += scalar_weight * coef(d);
      out(n + a, n + b) += scalar_weight * coef(d);
      out(a, n + b) += cross_weight * coef(d + 2);
      out(n + a, b) += cross_weight * coef(d - 2);
    }
  }
}

inline void add_free_part(Eigen::MatrixXd& out, int n_trunc, double twist) {
  const int n = 2 * n_trunc + 1;
  for (int a = 0; a < n; ++a) {
    const double k = (a - n_trunc) + twist;
    out(a, a) += k * k - 1.0;
    out(n + a, n + a) += k * k - 1.0;
  }
}

inline void symmetrize(Eigen::MatrixXd& m) {
  const Eigen::MatrixXd t = m.transpose();
  m = 0.5 * (m + t);
}

}  // namespace detail

inline TruncatedOperator assemble_operator(const ParameterPoint& p, const UnitCirclePoint& w,
                                           int n_trunc) {
  if (n_trunc < 4) throw InvalidParameter("truncation order must be at least 4");
  const int dim = 2 * (2 * n_trunc + 1);
  TruncatedOperator op{Eigen::MatrixXd::Zero(dim, dim), n_trunc, w, p};
  detail::add_free_part(op.matrix, n_trunc, w.twist());
  detail::add_potential(op.matrix, n_trunc, p.e(), 0.5 * (2.0 + p.mu()), 1.5 * p.mu());
  detail::symmetrize(op.matrix);
  return op;
}

/// Matrix of (I + 3 S(t)) / (2 (1 + e cos t)), the mu-derivative of A.
inline Eigen::MatrixXd assemble_mass_derivative(double e, int n_trunc) {
  const int dim = 2 * (2 * n_trunc + 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  detail::add_potential(m, n_trunc, e, 0.5, 1.5);
  detail::symmetrize(m);
  return m;
}

/// Scaled operator A(0, e) / mu + (I + 3 S) / (2 (1 + e cos t)) = A(mu, e) / mu,
/// whose eigenvalues are non-increasing in mu.  Requires mu > 0.
inline Eigen::MatrixXd assemble_scaled_operator(const ParameterPoint& p, const UnitCirclePoint& w,
                                                int n_trunc) {
  if (!(p.mu() > 0.0)) throw InvalidParameter("scaled operator needs mu > 0");
  const ParameterPoint base(0.0, p.e());
  Eigen::MatrixXd m = assemble_operator(base, w, n_trunc).matrix / p.mu();
  m += assemble_mass_derivative(p.e(), n_trunc);
  return m;
}

/// max |A - A^H| / max |A|.
inline double hermiticity_residual(const TruncatedOperator& op) {
  const double scale = std::max(1.0, op.matrix.cwiseAbs().maxCoeff());
  return (op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff() / scale;
}

inline Eigen::VectorXd operator_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

struct SpectralConfig {
  int truncation = 32;
  int truncation_step = 8;
  int max_truncation = 200;
  /// Zero band, relative to the largest diagonal entry.
  double zero_band = 1e-8;
  /// Coefficient size |c_N| / c_0 targeted when choosing the starting order.
  double coefficient_cutoff = 1e-14;
};

/// Smallest truncation order for which |r|^N drops below the cutoff.
inline int minimum_truncation(double e, const SpectralConfig& cfg) {
  if (e <= 1e-8) return cfg.truncation;
  const double root = std::sqrt((1.0 - e) * (1.0 + e));
  const double r = e / (1.0 + root);
  const int needed = static_cast<int>(std::ceil(std::log(cfg.coefficient_cutoff) / std::log(r)));
  return std::max(cfg.truncation, needed + 2);
}

inline IndexPair count_index_nullity(const Eigen::VectorXd& eigenvalues, double band) {
  IndexPair out;
  for (double x : eigenvalues) {
    if (x < -band) {
      ++out.index;
    } else if (x <= band) {
      ++out.nullity;
    }
  }
  return out;
}

/// Number of strictly negative eigenvalues at a fixed truncation; the
/// integer predicate used for root location.
inline int strict_index(const ParameterPoint& p, const UnitCirclePoint& w, int n_trunc) {
  const auto ev = operator_eigenvalues(assemble_operator(p, w, n_trunc).matrix);
  return static_cast<int>((ev.array() < 0.0).count());
}

struct IndexResult {
  IndexPair pair;
  int truncation_used = 0;
};

/// (i_omega, nu_omega), accepted once three successive truncation orders
/// N, N + step, N + 2 step agree.
inline IndexResult morse_index_nullity(const ParameterPoint& p, const UnitCirclePoint& w,
                                       const SpectralConfig& cfg = {}) {
  if (cfg.truncation < 4 || cfg.truncation_step < 1 || !(cfg.zero_band > 0.0)) {
    throw InvalidParameter("invalid spectral configuration");
  }
  const int start = minimum_truncation(p.e(), cfg);
  if (start + 2 * cfg.truncation_step > cfg.max_truncation) {
    throw TruncationNotConverged("starting truncation " + std::to_string(start) +
                                 " exceeds the configured maximum");
  }
  const auto first = assemble_operator(p, w, start);
  const double band = cfg.zero_band * first.matrix.diagonal().cwiseAbs().maxCoeff();

  std::vector<IndexPair> window;
  window.push_back(count_index_nullity(operator_eigenvalues(first.matrix), band));
  for (int n = start + cfg.truncation_step; n <= cfg.max_truncation; n += cfg.truncation_step) {
    window.push_back(count_index_nullity(operator_eigenvalues(assemble_operator(p, w, n).matrix), band));
    if (window.size() > 3) window.erase(window.begin());
    if (window.size() == 3 && window[0] == window[1] && window[1] == window[2]) {
      return {window[0], n - 2 * cfg.truncation_step};
    }
  }
  throw TruncationNotConverged("index/nullity did not stabilise up to N=" +
                               std::to_string(cfg.max_truncation) + " at mu=" +
                               std::to_string(p.mu()) + ", e=" + std::to_string(p.e()));
}

// ---------------------------------------------------------------------------
// Circular-orbit block structure

struct ModeBlock {
  /// Mode center n (integer for omega = 1, half-integer for omega = -1).
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct BlockOracleResult {
  IndexPair pair;
  std::vector<ModeBlock> blocks;
  /// Block eigenvalues plus the unpaired edge modes of the truncation, sorted.
  std::vector<double> eigenvalues;
};

/// Roots of p_n(x) = x^2 - (2 n^2 + 2 + mu) x - [2 mu^2 - (n^2 + 1) mu - (n^2 - 1)^2].
inline ModeBlock mode_block(double mu, double n) {
  const double n2 = n * n;
  const double trace = 2.0 * n2 + 2.0 + mu;
  const double det = -(2.0 * mu * mu - (n2 + 1.0) * mu - (n2 - 1.0) * (n2 - 1.0));
  const double disc = std::sqrt(std::max(0.0, trace * trace - 4.0 * det));
  const double upper = 0.5 * (trace + disc);
  return {n, det / upper, upper};
}

/// Index and spectrum of A(mu, 0) at omega = +-1 from the 2x2 blocks B_0, B_n,
/// B~_n, aligned with a truncation of order N.
inline BlockOracleResult e_zero_block_oracle(double mu, int omega_sign, int n_trunc) {
  if (omega_sign != 1 && omega_sign != -1) throw InvalidParameter("omega must be 1 or -1");
  if (n_trunc < 4) throw InvalidParameter("truncation order must be at least 4");
  const double s = omega_sign == 1 ? 0.0 : 0.5;
  BlockOracleResult out;
  // Modes (k, +) and (k + 2, -) pair up; their center is n = k + 1 + s.
  for (int k = -n_trunc; k <= n_trunc - 2; ++k) {
    out.blocks.push_back(mode_block(mu, k + 1 + s));
  }
  for (const auto& b : out.blocks) {
    out.eigenvalues.push_back(b.lower);
    out.eigenvalues.push_back(b.upper);
    const double scale = std::max(1.0, b.upper);
    if (std::abs(b.lower) <= 1e-12 * scale) {
      ++out.pair.nullity;
    } else if (b.lower < 0.0) {
      ++out.pair.index;
    }
  }
  for (double k : {double(n_trunc - 1), double(n_trunc), double(-n_trunc), double(-n_trunc + 1)}) {
    out.eigenvalues.push_back((k + s) * (k + s) + 0.5 * mu);
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

// ---------------------------------------------------------------------------
// Kernel at (mu*, 0), omega = -1, and first-order pairings

struct MinusOneKernel {
  /// 1/4 + 1 - mu* = (15 - sqrt(97)) / 16.
  double a0 = (15.0 - std::sqrt(97.0)) / 16.0;

  Eigen::Vector2d first(double t) const {
    return rotation(t) * Eigen::Vector2d(a0 * std::sin(0.5 * t), std::cos(0.5 * t));
  }
  Eigen::Vector2d second(double t) const {
    return rotation(t) * Eigen::Vector2d(a0 * std::cos(0.5 * t), -std::sin(0.5 * t));
  }
};

inline MinusOneKernel kernel_basis_minus_one() { return {}; }

/// Galerkin coefficients of a real vector field satisfying y(2 pi) = omega y(0),
/// by the trapezoid rule (exact for fields in the truncated span).
inline Eigen::VectorXcd project_onto_basis(const std::function<Eigen::Vector2d(double)>& field,
                                           const UnitCirclePoint& w, int n_trunc,
                                           int samples = 0) {
  const int n = 2 * n_trunc + 1;
  if (samples <= 0) samples = 8 * n;
  const double s = w.twist();
  Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(2 * n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < samples; ++j) {
    const double t = kTwoPi * j / samples;
    const Eigen::Vector2d x = field(t);
    const Complex plus = inv_sqrt2 * Complex(x(0), -x(1));   // u_+^H x
    const Complex minus = inv_sqrt2 * Complex(x(0), x(1));   // u_-^H x
    for (int a = 0; a < n; ++a) {
      const Complex phase = std::polar(1.0, -((a - n_trunc) + s) * t);
      coeffs(a) += plus * phase;
      coeffs(n + a) += minus * phase;
    }
  }
  return coeffs / double(samples);
}

/// <(dA / d direction)(mu*, 0) x0, x0> in L^2(0, 2 pi), by periodic quadrature.
inline double perturbation_pairing(ParameterDirection direction, int samples = 512) {
  const MinusOneKernel kernel;
  const ParameterPoint p(kMuStar, 0.0);
  double sum = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double t = kTwoPi * j / samples;
    const Eigen::Vector2d x = kernel.first(t);
    sum += x.dot(potential_derivative(t, p, direction) * x);
  }
  return sum * kTwoPi / samples;
}

/// First-order slope of the upper -1-degenerate curve at (mu*, 0):
/// -<A_e x0, x0> / <A_mu x0, x0>.
inline double predicted_tangent_slope() {
  return -perturbation_pairing(ParameterDirection::E) /
         perturbation_pairing(ParameterDirection::Mu);
}

}  // namespace robe
