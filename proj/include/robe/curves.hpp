#pragma once

// Separation curves of the (mu, e) stability diagram: the hyperbolic
// boundary Gamma_l and the two -1-degenerate curves Gamma_m <= Gamma_r.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "robe/errors.hpp"
#include "robe/monodromy.hpp"
#include "robe/parallel.hpp"
#include "robe/spectral_index.hpp"
#include "robe/symplectic.hpp"
#include "robe/types.hpp"

namespace robe {

struct CurveConfig {
  /// Width at which a bisection bracket is accepted.
  double bisect_tol = 1e-12;
  /// Uniform mu samples used by the cold scan for index jumps.
  int scan_points = 32;
  /// Degenerate locations closer than this are merged.
  double merge_tol = 1e-7;
  /// Distance to the unit circle below which an eigenvalue counts as elliptic.
  double hyperbolic_tol = 1e-6;
  /// The hyperbolic-boundary search runs on [margin, 1 - margin].
  double boundary_margin = 1e-3;
  /// Half-width of warm-started brackets around the previous root.
  double warm_width = 0.02;
  double e_max = 0.95;
  int threads = 0;
  SpectralConfig spectral;
  IntegratorConfig integrator;
  ClassificationConfig classification;
};

struct DegenerateLocation {
  double mu = 0.0;
  int multiplicity = 0;
};

namespace detail {

inline ParameterPoint curve_point(double mu, double e) {
  return ParameterPoint(std::clamp(mu, 0.0, 1.0), e, std::max(kDefaultEMax, e));
}

template <class IndexFn>
void bisect_jumps(const IndexFn& index, double lo, double hi, int f_lo, int f_hi, double tol,
                  std::vector<DegenerateLocation>& out) {
  if (f_hi == f_lo) return;
  if (hi - lo <= tol) {
    out.push_back({0.5 * (lo + hi), f_hi - f_lo});
    return;
  }
  const double mid = 0.5 * (lo + hi);
  const int f_mid = index(mid);
  bisect_jumps(index, lo, mid, f_lo, f_mid, tol, out);
  bisect_jumps(index, mid, hi, f_mid, f_hi, tol, out);
}

inline std::vector<DegenerateLocation> merge_locations(std::vector<DegenerateLocation> locs,
                                                       double merge_tol) {
  std::sort(locs.begin(), locs.end(),
            [](const auto& a, const auto& b) { return a.mu < b.mu; });
  std::vector<DegenerateLocation> merged;
  for (const auto& l : locs) {
    if (!merged.empty() && l.mu - merged.back().mu <= merge_tol) {
      auto& m = merged.back();
      m.mu = (m.mu * m.multiplicity + l.mu * l.multiplicity) / (m.multiplicity + l.multiplicity);
      m.multiplicity += l.multiplicity;
    } else {
      merged.push_back(l);
    }
  }
  return merged;
}

}  // namespace detail

/// mu values in [0, 1] where mu -> i_omega(mu, e) jumps, located by bisection
/// on the strict negative-eigenvalue count at a fixed truncation.  For
/// omega != 1 the jumps must add up to 2.  `hints` are previous roots used to
/// warm-start the brackets; they are always re-verified.
inline std::vector<DegenerateLocation> find_degenerate_mus(double e, const UnitCirclePoint& w,
                                                           const CurveConfig& cfg = {},
                                                           const std::vector<double>& hints = {}) {
  if (!(e >= 0.0 && e <= cfg.e_max)) {
    throw InvalidParameter("e outside the traceable range [0, " + std::to_string(cfg.e_max) + "]");
  }
  const int n_trunc = minimum_truncation(e, cfg.spectral);
  if (n_trunc > cfg.spectral.max_truncation) {
    throw TruncationNotConverged("required truncation exceeds the configured maximum");
  }
  const auto index = [&](double mu) { return strict_index(detail::curve_point(mu, e), w, n_trunc); };

  // omega = 1 has exact kernels at both ends; only the open interval matters.
  const double lo = w.is_one() ? cfg.boundary_margin : 0.0;
  const double hi = w.is_one() ? 1.0 - cfg.boundary_margin : 1.0;
  const int f_lo = index(lo);
  const int f_hi = index(hi);
  const int expected = f_hi - f_lo;
  if (!w.is_one() && expected != 2) {
    throw TotalMultiplicityViolation("index rises by " + std::to_string(expected) +
                                     " over [0, 1], expected 2");
  }

  std::vector<DegenerateLocation> found;
  bool warm_ok = false;
  if (!hints.empty() && expected > 0) {
    std::vector<std::pair<double, double>> brackets;
    for (double h : hints) {
      brackets.emplace_back(std::max(lo, h - cfg.warm_width), std::min(hi, h + cfg.warm_width));
    }
    std::sort(brackets.begin(), brackets.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& b : brackets) {
      if (!merged.empty() && b.first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, b.second);
      } else {
        merged.push_back(b);
      }
    }
    std::vector<std::pair<int, int>> values;
    int covered = 0;
    for (const auto& b : merged) {
      const int a = index(b.first);
      const int c = index(b.second);
      values.emplace_back(a, c);
      covered += c - a;
    }
    if (covered == expected) {
      warm_ok = true;
      for (std::size_t i = 0; i < merged.size(); ++i) {
        detail::bisect_jumps(index, merged[i].first, merged[i].second, values[i].first,
                             values[i].second, cfg.bisect_tol, found);
      }
    }
  }
  if (!warm_ok) {
    found.clear();
    const int n = std::max(2, cfg.scan_points);
    double prev_mu = lo;
    int prev_f = f_lo;
    for (int j = 1; j <= n; ++j) {
      const double mu = lo + (hi - lo) * j / n;
      const int f = j == n ? f_hi : index(mu);
      detail::bisect_jumps(index, prev_mu, mu, prev_f, f, cfg.bisect_tol, found);
      prev_mu = mu;
      prev_f = f;
    }
  }
  auto merged = detail::merge_locations(std::move(found), cfg.merge_tol);
  int total = 0;
  for (const auto& m : merged) total += m.multiplicity;
  if (total != expected || std::any_of(merged.begin(), merged.end(),
                                       [](const auto& m) { return m.multiplicity <= 0; })) {
    throw TotalMultiplicityViolation("index jumps are not monotone or do not sum to " +
                                     std::to_string(expected));
  }
  return merged;
}

/// True when the monodromy spectrum keeps a distance > tol from the unit circle.
inline bool is_hyperbolic(const SymplecticMatrix4& m, double tol) {
  const auto ev = eigenvalues_symplectic(m);
  return std::all_of(ev.begin(), ev.end(),
                     [tol](Complex x) { return std::abs(std::abs(x) - 1.0) > tol; });
}

/// mu_l(e): the end of the hyperbolic region {mu : spectrum off the unit
/// circle}, which is an initial interval in mu.
inline double hyperbolic_boundary(double e, const CurveConfig& cfg = {},
                                  std::optional<double> hint = std::nullopt) {
  if (!(e >= 0.0 && e <= cfg.e_max)) {
    throw InvalidParameter("e outside the traceable range [0, " + std::to_string(cfg.e_max) + "]");
  }
  const auto hyperbolic = [&](double mu) {
    return is_hyperbolic(integrate_monodromy(detail::curve_point(mu, e), cfg.integrator),
                         cfg.hyperbolic_tol);
  };
  double lo = cfg.boundary_margin;
  double hi = 1.0 - cfg.boundary_margin;
  bool bracketed = false;
  if (hint) {
    const double a = std::max(lo, *hint - cfg.warm_width);
    const double b = std::min(hi, *hint + cfg.warm_width);
    if (hyperbolic(a) && !hyperbolic(b)) {
      lo = a;
      hi = b;
      bracketed = true;
    }
  }
  if (!bracketed && (!hyperbolic(lo) || hyperbolic(hi))) {
    throw NoTransitionFound("hyperbolicity does not change on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }
  while (hi - lo > cfg.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    (hyperbolic(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

enum class CurveName { GammaL, GammaM, GammaR };

inline std::string to_string(CurveName name) {
  switch (name) {
    case CurveName::GammaL: return "gamma_l";
    case CurveName::GammaM: return "gamma_m";
    case CurveName::GammaR: return "gamma_r";
  }
  return "unknown";
}

struct CurveSample {
  double e = 0.0;
  double mu = 0.0;
};

struct CurveTrace {
  CurveName name = CurveName::GammaL;
  std::vector<CurveSample> samples;
  double tolerance = 0.0;
};

struct CurveTraces {
  CurveTrace left{CurveName::GammaL, {}, 0.0};
  CurveTrace middle{CurveName::GammaM, {}, 0.0};
  CurveTrace right{CurveName::GammaR, {}, 0.0};
};

/// Evaluates Gamma_l, Gamma_m and Gamma_r on a strictly increasing e grid.
/// Work is split into contiguous e-chunks; each chunk warm-starts its
/// brackets from its own previous sample.
inline CurveTraces trace_curves(const std::vector<double>& e_grid, const CurveConfig& cfg = {}) {
  if (e_grid.empty()) throw InvalidParameter("empty eccentricity grid");
  for (std::size_t i = 0; i < e_grid.size(); ++i) {
    if (!(e_grid[i] >= 0.0 && e_grid[i] <= cfg.e_max)) {
      throw InvalidParameter("eccentricity grid leaves [0, " + std::to_string(cfg.e_max) + "]");
    }
    if (i > 0 && !(e_grid[i] > e_grid[i - 1])) {
      throw InvalidParameter("eccentricity grid must be strictly increasing");
    }
  }
  const std::size_t n = e_grid.size();
  std::vector<double> left(n), middle(n), right(n);
  parallel_chunks(n, worker_count(cfg.threads), [&](std::size_t begin, std::size_t end) {
    std::optional<double> left_hint;
    std::vector<double> degenerate_hints;
    for (std::size_t i = begin; i < end; ++i) {
      const double e = e_grid[i];
      try {
        left[i] = hyperbolic_boundary(e, cfg, left_hint);
        const auto locs = find_degenerate_mus(e, UnitCirclePoint::minus_one(), cfg, degenerate_hints);
        middle[i] = locs.front().mu;
        right[i] = locs.back().mu;
      } catch (const TraceFailure&) {
        throw;
      } catch (const std::exception& ex) {
        throw TraceFailure(e, ex.what());
      }
      left_hint = left[i];
      degenerate_hints = {middle[i], right[i]};
    }
  });
  CurveTraces out;
  for (auto* trace : {&out.left, &out.middle, &out.right}) trace->tolerance = cfg.bisect_tol;
  for (std::size_t i = 0; i < n; ++i) {
    out.left.samples.push_back({e_grid[i], left[i]});
    out.middle.samples.push_back({e_grid[i], middle[i]});
    out.right.samples.push_back({e_grid[i], right[i]});
  }
  return out;
}

/// Slope of mu(e) - mu* through the origin, fitted by least squares over the
/// samples with e in [window_lo, window_hi].
inline double tangent_at_origin(const CurveTrace& curve, double window_lo = 0.002,
                                double window_hi = 0.02) {
  if (curve.name == CurveName::GammaL) {
    throw InvalidParameter("tangent at (mu*, 0) is defined for gamma_m and gamma_r only");
  }
  double num = 0.0;
  double den = 0.0;
  int used = 0;
  for (const auto& s : curve.samples) {
    if (s.e >= window_lo - 1e-12 && s.e <= window_hi + 1e-12 && s.e > 0.0) {
      num += s.e * (s.mu - kMuStar);
      den += s.e * s.e;
      ++used;
    }
  }
  if (used < 3) {
    throw InsufficientSamples("need at least 3 samples with e in [" + std::to_string(window_lo) +
                              ", " + std::to_string(window_hi) + "], have " +
                              std::to_string(used));
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Diagram sweep

struct DiagramRow {
  double mu = 0.0;
  double e = 0.0;
  EigenvalueQuad eigenvalues{};
  std::optional<StabilityClass> stability;
  std::optional<IndexPair> at_one;
  std::optional<IndexPair> at_minus_one;
  /// (omega angle, index pair) for every extra sampled omega.
  std::vector<std::pair<double, std::optional<IndexPair>>> sampled;
  std::string error;
};

/// Uniform grid over [0, 1] x [0, e_max], e-major then mu.  Failures are
/// recorded in the row and never abort the sweep.
inline std::vector<DiagramRow> sweep_diagram(int mu_steps, int e_steps, const CurveConfig& cfg = {},
                                             const std::vector<double>& sampled_angles = {}) {
  if (mu_steps < 2 || e_steps < 2) throw InvalidParameter("grid step counts must be at least 2");
  const std::size_t n = static_cast<std::size_t>(mu_steps) * static_cast<std::size_t>(e_steps);
  std::vector<DiagramRow> rows(n);
  parallel_chunks(n, worker_count(cfg.threads), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      DiagramRow& row = rows[idx];
      const int j = static_cast<int>(idx / mu_steps);
      const int i = static_cast<int>(idx % mu_steps);
      row.mu = static_cast<double>(i) / (mu_steps - 1);
      row.e = cfg.e_max * j / (e_steps - 1);
      const auto note = [&row](const std::string& what, const std::exception& ex) {
        if (!row.error.empty()) row.error += "; ";
        row.error += what + ": " + ex.what();
      };
      std::optional<ParameterPoint> p;
      try {
        p.emplace(row.mu, row.e, std::max(kDefaultEMax, row.e));
      } catch (const std::exception& ex) {
        note("parameters", ex);
        continue;
      }
      try {
        const auto m = integrate_monodromy(*p, cfg.integrator);
        auto cls = classify_stability(m, cfg.classification);
        row.eigenvalues = cls.eigenvalues;
        row.stability = std::move(cls);
      } catch (const std::exception& ex) {
        note("monodromy", ex);
      }
      try {
        row.at_one = morse_index_nullity(*p, UnitCirclePoint::one(), cfg.spectral).pair;
      } catch (const std::exception& ex) {
        note("index(1)", ex);
      }
      try {
        row.at_minus_one = morse_index_nullity(*p, UnitCirclePoint::minus_one(), cfg.spectral).pair;
      } catch (const std::exception& ex) {
        note("index(-1)", ex);
      }
      for (double angle : sampled_angles) {
        std::optional<IndexPair> value;
        try {
          value = morse_index_nullity(*p, UnitCirclePoint(angle), cfg.spectral).pair;
        } catch (const std::exception& ex) {
          note("index(" + std::to_string(angle) + ")", ex);
        }
        row.sampled.emplace_back(angle, value);
      }
    }
  });
  return rows;
}

}  // namespace robe
