#pragma once

// Spectral analysis of real 4x4 symplectic matrices: paired eigenvalues,
// omega-nullities, the degeneracy scalar and a normal-form based stability
// classification.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "robe/core_model.hpp"
#include "robe/errors.hpp"
#include "robe/integrator.hpp"
#include "robe/types.hpp"

namespace robe {

using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;
using EigenvalueQuad = std::array<Complex, 4>;

struct SymplecticMatrix4 {
  Matrix4 entries = Matrix4::Identity();
  double symplectic_residual = 0.0;

  static SymplecticMatrix4 from(const Matrix4& m) { return {m, robe::symplectic_residual(m)}; }
};

namespace detail {

/// Root of x^2 - rho x + 1 with the larger modulus.
inline Complex larger_reciprocal_root(Complex rho) {
  const Complex s = std::sqrt(rho * rho - 4.0);
  const Complex plus = 0.5 * (rho + s);
  const Complex minus = 0.5 * (rho - s);
  return std::abs(plus) >= std::abs(minus) ? plus : minus;
}

}  // namespace detail

/// Eigenvalues through the reciprocal characteristic polynomial
/// x^4 - a x^3 + b x^2 - a x + 1 and rho = x + 1/x.  Returned as
/// {x1, 1/x1, x2, 1/x2}; the reciprocal pairing holds by construction and a
/// real rho in [-2, 2] yields a pair exactly on the unit circle.
inline EigenvalueQuad eigenvalues_symplectic(const SymplecticMatrix4& m) {
  const Matrix4& a_mat = m.entries;
  const double a = a_mat.trace();
  const double b = 0.5 * (a * a - (a_mat * a_mat).trace());
  // rho^2 - a rho + (b - 2) = 0
  const double disc = a * a - 4.0 * (b - 2.0);
  Complex rho1;
  Complex rho2;
  if (disc >= 0.0) {
    const double big = 0.5 * (a + std::copysign(std::sqrt(disc), a));
    rho1 = big;
    rho2 = big != 0.0 ? Complex((b - 2.0) / big) : Complex(0.0);
  } else {
    rho1 = Complex(0.5 * a, 0.5 * std::sqrt(-disc));
    rho2 = std::conj(rho1);
  }
  const auto pair = [](Complex rho) {
    // Keep exact unit modulus for a real rho inside [-2, 2].
    if (rho.imag() == 0.0 && std::abs(rho.real()) <= 2.0) {
      const double c = 0.5 * rho.real();
      const Complex x(c, std::sqrt(std::max(0.0, 1.0 - c * c)));
      return std::array<Complex, 2>{x, std::conj(x)};
    }
    const Complex x = detail::larger_reciprocal_root(rho);
    return std::array<Complex, 2>{x, 1.0 / x};
  };
  const auto p1 = pair(rho1);
  const auto p2 = pair(rho2);
  return {p1[0], p1[1], p2[0], p2[1]};
}

/// Operator 2-norm (largest singular value).
inline double spectral_norm(const Matrix4& m) {
  Eigen::JacobiSVD<Matrix4> svd(m);
  return svd.singularValues()(0);
}

/// dim_C ker(M - omega I), counting singular values <= tol * |M|_2.
inline int nullity_omega(const SymplecticMatrix4& m, const UnitCirclePoint& w,
                         double tol = 1e-6) {
  const Matrix4c shifted = m.entries.cast<Complex>() - w.value() * Matrix4c::Identity();
  Eigen::JacobiSVD<Matrix4c> svd(shifted);
  const double cutoff = tol * spectral_norm(m.entries);
  int count = 0;
  for (int i = 0; i < 4; ++i) {
    if (svd.singularValues()(i) <= cutoff) ++count;
  }
  return count;
}

/// D_omega(M) = -conj(omega)^2 det(M - omega I), real for symplectic M.
inline double degeneracy_scalar(const SymplecticMatrix4& m, const UnitCirclePoint& w) {
  const Complex om = w.value();
  const Matrix4c shifted = m.entries.cast<Complex>() - om * Matrix4c::Identity();
  const Complex d = -std::conj(om) * std::conj(om) * shifted.partialPivLu().determinant();
  const double scale = std::max(1.0, m.entries.squaredNorm());
  if (std::abs(d.imag()) > 1e-8 * scale) {
    throw NonRealResult("degeneracy scalar has imaginary part " + std::to_string(d.imag()) +
                        "; input is not symplectic");
  }
  return d.real();
}

// ---------------------------------------------------------------------------
// Classification

enum class StabilityTag { HyperbolicHyperbolic, EllipticHyperbolic, EllipticElliptic, Degenerate };

inline std::string to_string(StabilityTag tag) {
  switch (tag) {
    case StabilityTag::HyperbolicHyperbolic: return "hyperbolic-hyperbolic";
    case StabilityTag::EllipticHyperbolic: return "elliptic-hyperbolic";
    case StabilityTag::EllipticElliptic: return "elliptic-elliptic";
    case StabilityTag::Degenerate: return "degenerate";
  }
  return "unknown";
}

/// Best-effort normal form of a two-fold eigenvalue on the unit circle.
enum class NormalFormKind {
  Unknown,
  Simple,          ///< single eigenvalue, rotation block R(theta)
  Semisimple,      ///< +-I2 at omega = +-1, or a diagonalizable collision
  N1Positive,      ///< N1(omega, a) with a > 0, omega = +-1
  N1Negative,      ///< N1(omega, a) with a < 0
  N2Trivial,       ///< N2 with (b2 - b3) sin(theta) > 0
  N2NonTrivial,    ///< N2 with (b2 - b3) sin(theta) < 0
};

inline std::string to_string(NormalFormKind kind) {
  switch (kind) {
    case NormalFormKind::Unknown: return "unknown";
    case NormalFormKind::Simple: return "simple";
    case NormalFormKind::Semisimple: return "semisimple";
    case NormalFormKind::N1Positive: return "N1+";
    case NormalFormKind::N1Negative: return "N1-";
    case NormalFormKind::N2Trivial: return "N2-trivial";
    case NormalFormKind::N2NonTrivial: return "N2-nontrivial";
  }
  return "unknown";
}

struct DegeneratePoint {
  UnitCirclePoint omega;
  int nullity = 0;
  int algebraic_multiplicity = 0;
  NormalFormKind kind = NormalFormKind::Unknown;
  bool confident = false;
};

struct StabilityClass {
  StabilityTag tag = StabilityTag::Degenerate;
  bool strong = false;
  std::vector<DegeneratePoint> degenerate;
  EigenvalueQuad eigenvalues{};
  /// Normal-form rotation angles in (0, 2 pi): an elliptic pair e^{+-i phi}
  /// maps to phi or 2 pi - phi according to the sign of the symplectic form
  /// on its eigenvector.
  std::vector<double> elliptic_angles;
};

struct ClassificationConfig {
  /// Distance to the unit circle and eigenvalue-collision threshold.
  double tol = 1e-6;
  /// Relative singular-value cutoff used for nullities.
  double nullity_tol = 1e-6;
  /// Largest accepted conditioning of the generalized-eigenspace split.
  double max_split_condition = 1e6;
};

/// Rotation angle of the normal form R(theta) carrying a simple elliptic
/// eigenvalue `lambda` (|lambda| = 1, Im lambda > 0).
inline double normal_form_angle(const SymplecticMatrix4& m, Complex lambda) {
  const Matrix4c shifted = m.entries.cast<Complex>() - lambda * Matrix4c::Identity();
  Eigen::JacobiSVD<Matrix4c> svd(shifted, Eigen::ComputeFullV);
  const Vector4c v = svd.matrixV().col(3);
  const double g = (Complex(0.0, 1.0) * v.dot(symplectic_J().cast<Complex>() * v)).real();
  const double phi = std::arg(lambda);
  return g < 0.0 ? phi : kTwoPi - phi;
}

/// Splits off the two-dimensional generalized eigenspace at `omega` and
/// reads the sign invariant of its Jordan chain.
inline DegeneratePoint analyze_double_eigenvalue(const SymplecticMatrix4& m, Complex omega,
                                                 int nullity, const ClassificationConfig& cfg) {
  DegeneratePoint out;
  out.omega = UnitCirclePoint(std::arg(omega));
  out.nullity = nullity;
  out.algebraic_multiplicity = 2;

  const Matrix4c mc = m.entries.cast<Complex>();
  const Matrix4c shifted = mc - omega * Matrix4c::Identity();
  Eigen::JacobiSVD<Matrix4c> svd(shifted * shifted, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double condition =
      sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
  out.confident = condition < cfg.max_split_condition;

  if (nullity >= 2) {
    out.kind = NormalFormKind::Semisimple;
    return out;
  }
  const Eigen::Matrix<Complex, 4, 2> basis = svd.matrixV().rightCols<2>();
  Eigen::Matrix2cd restricted = basis.adjoint() * mc * basis;
  restricted -= (0.5 * restricted.trace()) * Eigen::Matrix2cd::Identity();
  Eigen::JacobiSVD<Eigen::Matrix2cd> inner(restricted, Eigen::ComputeFullV);
  const Eigen::Vector2cd k2 = inner.matrixV().col(0);
  const Vector4c v2 = basis * k2;
  const Vector4c v1 = basis * (restricted * k2);
  const Matrix4c j = symplectic_J().cast<Complex>();
  const Complex pairing = v1.dot(j * v2);  // v1^H J v2

  const bool real_omega = std::abs(omega.imag()) < cfg.tol;
  if (real_omega) {
    // N1(lambda, a): the chain (a e1, e2) gives v1^T J v2 = -a.
    const double s = pairing.real();
    if (s == 0.0) {
      out.kind = NormalFormKind::Unknown;
      out.confident = false;
    } else {
      out.kind = s < 0.0 ? NormalFormKind::N1Positive : NormalFormKind::N1Negative;
    }
  } else {
    // omega * (i v1^H J v2) is purely imaginary; its sign selects the type.
    const Complex w = omega.imag() > 0.0 ? omega : std::conj(omega);
    const double t = (w * Complex(0.0, 1.0) * pairing).imag();
    out.kind = t > 0.0 ? NormalFormKind::N2Trivial : NormalFormKind::N2NonTrivial;
  }
  return out;
}

inline StabilityClass classify_stability(const SymplecticMatrix4& m,
                                         const ClassificationConfig& cfg = {}) {
  StabilityClass out;
  out.eigenvalues = eigenvalues_symplectic(m);
  const auto& ev = out.eigenvalues;

  std::array<bool, 4> on_circle{};
  int n_on = 0;
  for (int i = 0; i < 4; ++i) {
    on_circle[i] = std::abs(std::abs(ev[i]) - 1.0) <= cfg.tol;
    n_on += on_circle[i] ? 1 : 0;
  }
  if (n_on == 0) {
    out.tag = StabilityTag::HyperbolicHyperbolic;
    return out;
  }

  // Clusters of on-circle eigenvalues in the closed upper half plane.
  struct Cluster {
    Complex center;
    int size;
  };
  std::vector<Cluster> clusters;
  for (int i = 0; i < 4; ++i) {
    if (!on_circle[i] || ev[i].imag() < -cfg.tol) continue;
    bool merged = false;
    for (auto& c : clusters) {
      if (std::abs(c.center - ev[i]) <= cfg.tol) {
        c.center = (c.center * double(c.size) + ev[i]) / double(c.size + 1);
        ++c.size;
        merged = true;
        break;
      }
    }
    if (!merged) clusters.push_back({ev[i], 1});
  }

  bool generic = true;
  for (const auto& c : clusters) {
    const bool at_real = std::abs(c.center - 1.0) <= cfg.tol || std::abs(c.center + 1.0) <= cfg.tol;
    if (at_real || c.size > 1) generic = false;
  }

  if (generic) {
    for (const auto& c : clusters) out.elliptic_angles.push_back(normal_form_angle(m, c.center));
    std::sort(out.elliptic_angles.begin(), out.elliptic_angles.end());
    if (n_on == 4 && clusters.size() == 2) {
      out.tag = StabilityTag::EllipticElliptic;
      out.strong = true;
      return out;
    }
    if (n_on == 2 && clusters.size() == 1) {
      bool real_pair = true;
      for (int i = 0; i < 4; ++i) {
        if (!on_circle[i] && std::abs(ev[i].imag()) > cfg.tol) real_pair = false;
      }
      if (real_pair) {
        out.tag = StabilityTag::EllipticHyperbolic;
        return out;
      }
    }
    out.elliptic_angles.clear();
  }

  out.tag = StabilityTag::Degenerate;
  for (const auto& c : clusters) {
    Complex center = c.center;
    if (std::abs(center - 1.0) <= cfg.tol) center = 1.0;
    if (std::abs(center + 1.0) <= cfg.tol) center = -1.0;
    const bool real_point = center == Complex(1.0) || center == Complex(-1.0);
    int algebraic = 0;
    for (const auto& x : ev) {
      if (std::abs(x - center) <= cfg.tol) ++algebraic;
    }
    const UnitCirclePoint w(std::arg(center));
    const int nu = nullity_omega(m, w, cfg.nullity_tol);
    DegeneratePoint d;
    if (algebraic == 2) {
      d = analyze_double_eigenvalue(m, center, nu, cfg);
    } else {
      d.omega = w;
      d.nullity = nu;
      d.algebraic_multiplicity = algebraic;
      d.kind = algebraic == 1 ? NormalFormKind::Simple : NormalFormKind::Unknown;
      d.confident = algebraic == 1;
    }
    d.omega = w;
    out.degenerate.push_back(d);
    if (!real_point) {
      // List the conjugate point as well.
      DegeneratePoint conj = d;
      conj.omega = UnitCirclePoint(-std::arg(center));
      out.degenerate.push_back(conj);
    }
  }
  std::sort(out.degenerate.begin(), out.degenerate.end(),
            [](const DegeneratePoint& a, const DegeneratePoint& b) {
              return a.omega.angle() < b.omega.angle();
            });

  // A diagonalizable collision away from +-1 with all spectrum on the circle
  // is still stable; it is reported as elliptic-elliptic, not strong.
  if (n_on == 4) {
    bool semisimple_collision = true;
    for (const auto& d : out.degenerate) {
      const bool real_point = d.omega.is_one() || d.omega.angle() == std::numbers::pi;
      if (real_point || d.algebraic_multiplicity != 2 || d.kind != NormalFormKind::Semisimple) {
        semisimple_collision = false;
      }
    }
    if (semisimple_collision && !out.degenerate.empty()) {
      out.tag = StabilityTag::EllipticElliptic;
      out.strong = false;
    }
  }
  return out;
}

}  // namespace robe
