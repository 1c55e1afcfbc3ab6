#pragma once

// Acceptance checks reproducing the analytic results of the stability
// analysis: index tables, mu*, the hyperbolic boundary at e = 0, tangent
// slopes, pairing constants, multiplicity and monotonicity properties, and
// the agreement of the monodromy and Galerkin routes.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "robe/robe.hpp"

namespace robe {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  ///< 0 when the check has no runtime bound
};

struct VerifyConfig {
  CurveConfig curves;
  std::uint64_t seed = 20240607;
  /// Checks to run (1-based ids); empty runs all.
  std::set<int> only;
};

namespace verify_detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

/// Smallest achievable max distance between two 4-element multisets.
inline double matched_distance(const EigenvalueQuad& a, const EigenvalueQuad& b) {
  std::array<int, 4> perm{0, 1, 2, 3};
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void fail(const std::string& what) {
    if (passed) {
      detail.str("");
      detail.clear();
    } else {
      detail << "; ";
    }
    passed = false;
    detail << what;
  }
  void note(const std::string& what) {
    if (passed) detail << what;
  }
};

inline Outcome mu_star_recovery(const VerifyConfig& cfg) {
  Outcome out;
  const auto locs = find_degenerate_mus(0.0, UnitCirclePoint::minus_one(), cfg.curves);
  if (locs.size() != 1 || locs[0].multiplicity != 2) {
    out.fail("expected one location of multiplicity 2, found " + std::to_string(locs.size()));
    return out;
  }
  const double err = std::abs(locs[0].mu - kMuStar);
  if (err > 1e-6) out.fail("|mu - mu*| = " + fmt(err));
  out.note("mu = " + fmt(locs[0].mu) + ", |mu - mu*| = " + fmt(err));
  return out;
}

inline std::vector<double> circular_eigen_grid() {
  std::vector<double> mus;
  for (int k = 0; k < 50; ++k) mus.push_back((k + 0.5) / 50.0);
  return mus;
}

inline Outcome circular_eigenvalue_match(const VerifyConfig& cfg) {
  Outcome out;
  double worst = 0.0;
  double worst_mu = 0.0;
  for (double mu : circular_eigen_grid()) {
    const auto m = integrate_monodromy(ParameterPoint(mu, 0.0), cfg.curves.integrator);
    const double d = matched_distance(eigenvalues_symplectic(m), e_zero_oracle(mu).eigenvalues);
    if (d > worst) {
      worst = d;
      worst_mu = mu;
    }
  }
  if (worst > 1e-8) out.fail("max eigenvalue mismatch " + fmt(worst) + " at mu=" + fmt(worst_mu));
  out.note("max mismatch " + fmt(worst) + " over 50 mu");
  return out;
}

inline Outcome index_tables(const VerifyConfig& cfg) {
  Outcome out;
  struct Case {
    double mu, e;
    UnitCirclePoint w;
    IndexPair expected;
  };
  std::vector<Case> cases;
  for (double e : {0.0, 0.3, 0.6}) {
    cases.push_back({0.0, e, UnitCirclePoint::one(), {0, 2}});
    cases.push_back({0.5, e, UnitCirclePoint::one(), {0, 0}});
    cases.push_back({1.0, e, UnitCirclePoint::one(), {0, 3}});
  }
  cases.push_back({0.5, 0.0, UnitCirclePoint::minus_one(), {0, 0}});
  cases.push_back({kMuStar, 0.0, UnitCirclePoint::minus_one(), {0, 2}});
  cases.push_back({0.95, 0.0, UnitCirclePoint::minus_one(), {2, 0}});
  for (const auto& c : cases) {
    const auto got = morse_index_nullity(ParameterPoint(c.mu, c.e), c.w, cfg.curves.spectral).pair;
    if (!(got == c.expected)) {
      out.fail("(mu=" + fmt(c.mu) + ", e=" + fmt(c.e) + ", omega angle=" + fmt(c.w.angle()) +
               ") gave (" + std::to_string(got.index) + "," + std::to_string(got.nullity) +
               "), expected (" + std::to_string(c.expected.index) + "," +
               std::to_string(c.expected.nullity) + ")");
    }
  }
  out.note(std::to_string(cases.size()) + " table entries reproduced");
  return out;
}

inline Outcome tangent_slopes(const VerifyConfig& cfg) {
  Outcome out;
  std::vector<double> grid;
  for (int k = 1; k <= 10; ++k) grid.push_back(0.002 * k);
  const auto traces = trace_curves(grid, cfg.curves);
  const double expected = (291.0 + 15.0 * std::sqrt(97.0)) / 3104.0;
  const double sm = tangent_at_origin(traces.middle);
  const double sr = tangent_at_origin(traces.right);
  const double em = std::abs(sm + expected) / expected;
  const double er = std::abs(sr - expected) / expected;
  if (em > 0.02) out.fail("gamma_m slope " + fmt(sm) + " off by " + fmt(100 * em) + "%");
  if (er > 0.02) out.fail("gamma_r slope " + fmt(sr) + " off by " + fmt(100 * er) + "%");
  out.note("slopes " + fmt(sm) + " / " + fmt(sr) + " vs -/+" + fmt(expected));
  return out;
}

inline Outcome circular_hyperbolic_boundary(const VerifyConfig& cfg) {
  Outcome out;
  const double mu_l = hyperbolic_boundary(0.0, cfg.curves);
  const double err = std::abs(mu_l - kMuHyperbolicCircular);
  if (err > 1e-6) out.fail("mu_l(0) = " + fmt(mu_l) + ", error " + fmt(err));
  out.note("mu_l(0) = " + fmt(mu_l) + ", |mu_l - 8/9| = " + fmt(err));
  return out;
}

inline Outcome block_oracle_equivalence(const VerifyConfig& cfg) {
  Outcome out;
  std::vector<double> mus;
  for (int k = 0; k <= 18; ++k) mus.push_back(k / 18.0);
  mus.push_back(kMuStar);
  const int n_trunc = cfg.curves.spectral.truncation;
  double worst = 0.0;
  for (int sign : {1, -1}) {
    const UnitCirclePoint w = sign == 1 ? UnitCirclePoint::one() : UnitCirclePoint::minus_one();
    for (double mu : mus) {
      const ParameterPoint p(mu, 0.0);
      const auto oracle = e_zero_block_oracle(mu, sign, n_trunc);
      const auto galerkin = morse_index_nullity(p, w, cfg.curves.spectral).pair;
      if (!(galerkin == oracle.pair)) {
        out.fail("omega=" + std::to_string(sign) + ", mu=" + fmt(mu) + ": Galerkin (" +
                 std::to_string(galerkin.index) + "," + std::to_string(galerkin.nullity) +
                 ") vs blocks (" + std::to_string(oracle.pair.index) + "," +
                 std::to_string(oracle.pair.nullity) + ")");
      }
      const auto ev = operator_eigenvalues(assemble_operator(p, w, n_trunc).matrix);
      for (int i = 0; i < ev.size(); ++i) {
        worst = std::max(worst, std::abs(ev(i) - oracle.eigenvalues[i]));
      }
    }
  }
  if (worst > 1e-10) out.fail("eigenvalue mismatch " + fmt(worst));
  out.note("40 (mu, omega) cases, max eigenvalue mismatch " + fmt(worst));
  return out;
}

inline Outcome pairing_constants(const VerifyConfig&) {
  Outcome out;
  const double pi = std::numbers::pi;
  const double s97 = std::sqrt(97.0);
  const double want_mu = pi * (97.0 - 15.0 * s97) / 64.0;
  const double want_e = pi * (-33.0 + 15.0 * s97) / 1024.0;
  const double got_mu = perturbation_pairing(ParameterDirection::Mu);
  const double got_e = perturbation_pairing(ParameterDirection::E);
  if (std::abs(got_mu - want_mu) > 1e-6) out.fail("mu pairing " + fmt(got_mu) + " vs " + fmt(want_mu));
  if (std::abs(got_e - want_e) > 1e-6) out.fail("e pairing " + fmt(got_e) + " vs " + fmt(want_e));
  out.note("mu pairing " + fmt(got_mu) + ", e pairing " + fmt(got_e));
  return out;
}

inline Outcome total_multiplicity(const VerifyConfig& cfg) {
  Outcome out;
  for (double e : {0.0, 0.2, 0.5, 0.8}) {
    try {
      const auto locs = find_degenerate_mus(e, UnitCirclePoint::minus_one(), cfg.curves);
      int total = 0;
      for (const auto& l : locs) total += l.multiplicity;
      if (total != 2) out.fail("e=" + fmt(e) + ": total " + std::to_string(total));
    } catch (const TotalMultiplicityViolation& ex) {
      out.fail("e=" + fmt(e) + ": " + ex.what());
    }
  }
  out.note("jumps sum to 2 at e = 0, 0.2, 0.5, 0.8");
  return out;
}

inline Outcome index_monotonicity(const VerifyConfig& cfg) {
  Outcome out;
  int evaluations = 0;
  for (double e : {0.0, 0.25, 0.5}) {
    for (int k = 0; k < 8; ++k) {
      const UnitCirclePoint w(kTwoPi * k / 8.0);
      int previous = 0;
      for (int j = 0; j < 100; ++j) {
        const double mu = j / 99.0;
        const int idx = morse_index_nullity(ParameterPoint(mu, e), w, cfg.curves.spectral).pair.index;
        ++evaluations;
        if (w.is_one() && idx != 0) {
          out.fail("i_1 = " + std::to_string(idx) + " at mu=" + fmt(mu) + ", e=" + fmt(e));
        }
        if (j > 0 && idx < previous) {
          out.fail("index decreases at mu=" + fmt(mu) + ", e=" + fmt(e) + ", angle=" + fmt(w.angle()));
        }
        if (j == 99 && !w.is_one() && idx != 2) {
          out.fail("i_omega(1) = " + std::to_string(idx) + " at e=" + fmt(e) + ", angle=" + fmt(w.angle()));
        }
        previous = idx;
      }
    }
  }
  out.note(std::to_string(evaluations) + " index evaluations monotone");
  return out;
}

inline Outcome cross_method_nullity(const VerifyConfig& cfg) {
  Outcome out;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int agree = 0;
  int near_curve = 0;
  for (int s = 0; s < 200; ++s) {
    const double mu = unit(rng);
    const double e = 0.9 * unit(rng);
    const UnitCirclePoint w(kTwoPi * unit(rng));
    const ParameterPoint p(mu, e);
    const int spectral = morse_index_nullity(p, w, cfg.curves.spectral).pair.nullity;
    const int mono = nullity_omega(integrate_monodromy(p, cfg.curves.integrator), w,
                                   cfg.curves.classification.nullity_tol);
    const std::string where =
        "random sample mu=" + fmt(mu) + ", e=" + fmt(e) + ", angle=" + fmt(w.angle());
    if (spectral != mono) {
      out.fail(where + ": spectral " + std::to_string(spectral) + ", monodromy " + std::to_string(mono));
      continue;
    }
    ++agree;
    if (spectral != 0) {
      // Both routes see a kernel; the sample must then lie next to a curve.
      const auto ev = eigenvalues_symplectic(integrate_monodromy(p, cfg.curves.integrator));
      double closest = std::numeric_limits<double>::infinity();
      for (const auto& z : ev) closest = std::min(closest, std::abs(z - w.value()));
      if (closest > 0.02) {
        out.fail(where + ": nullity " + std::to_string(spectral) + " with nearest eigenvalue " +
                 fmt(closest) + " from omega");
      } else {
        ++near_curve;
      }
    }
  }
  const std::vector<double> grid{0.1, 0.3, 0.5};
  const auto traces = trace_curves(grid, cfg.curves);
  int on_curve = 0;
  for (const auto* trace : {&traces.middle, &traces.right}) {
    for (const auto& sample : trace->samples) {
      const ParameterPoint p(sample.mu, sample.e);
      const auto w = UnitCirclePoint::minus_one();
      const int spectral = morse_index_nullity(p, w, cfg.curves.spectral).pair.nullity;
      const int mono = nullity_omega(integrate_monodromy(p, cfg.curves.integrator), w,
                                     cfg.curves.classification.nullity_tol);
      if (spectral < 1 || mono < 1) {
        out.fail(to_string(trace->name) + " at e=" + fmt(sample.e) + ": spectral " +
                 std::to_string(spectral) + ", monodromy " + std::to_string(mono));
      } else {
        ++on_curve;
      }
    }
  }
  out.note(std::to_string(agree) + "/200 random samples agree (" + std::to_string(near_curve) +
           " next to a curve), " +
           std::to_string(on_curve) + "/6 curve points degenerate on both routes");
  return out;
}

inline Outcome segment_classification(const VerifyConfig& cfg) {
  Outcome out;
  const std::vector<double> grid{0.1, 0.3, 0.5};
  const auto traces = trace_curves(grid, cfg.curves);
  const auto angle_in = [](double a, double lo, double hi) { return a > lo && a < hi; };
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = grid[i];
    const double l = traces.left.samples[i].mu;
    const double m = traces.middle.samples[i].mu;
    const double r = traces.right.samples[i].mu;
    const auto classify = [&](double mu) {
      return classify_stability(integrate_monodromy(ParameterPoint(mu, e), cfg.curves.integrator),
                                cfg.curves.classification);
    };
    const auto first = classify(0.5 * (l + m));
    const auto second = classify(0.5 * (m + r));
    const auto third = classify(0.5 * (r + 1.0));
    const std::string where = "e=" + fmt(e) + " (mu_l=" + fmt(l) + ", mu_m=" + fmt(m) + ", mu_r=" + fmt(r) + ")";
    if (!(first.tag == StabilityTag::EllipticElliptic && first.strong &&
          first.elliptic_angles.size() == 2 && angle_in(first.elliptic_angles[0], 0, pi) &&
          angle_in(first.elliptic_angles[1], pi, 2 * pi))) {
      out.fail(where + ": (mu_l, mu_m) midpoint is " + to_string(first.tag) +
               ", expected strong elliptic-elliptic");
    }
    if (!(second.tag == StabilityTag::EllipticHyperbolic && second.elliptic_angles.size() == 1 &&
          angle_in(second.elliptic_angles[0], pi, 2 * pi))) {
      out.fail(where + ": (mu_m, mu_r) midpoint is " + to_string(second.tag) +
               ", expected elliptic-hyperbolic");
    }
    if (!(third.tag == StabilityTag::EllipticElliptic && third.strong &&
          third.elliptic_angles.size() == 2 && angle_in(third.elliptic_angles[0], pi, 2 * pi) &&
          angle_in(third.elliptic_angles[1], pi, 2 * pi))) {
      out.fail(where + ": (mu_r, 1) midpoint is " + to_string(third.tag) +
               ", expected strong elliptic-elliptic");
    }
  }
  out.note("segments classified at e = 0.1, 0.3, 0.5");
  return out;
}

inline Outcome symplecticity(const VerifyConfig& cfg) {
  Outcome out;
  double worst_residual = 0.0;
  double worst_gap = 0.0;
  for (double mu : circular_eigen_grid()) {
    const auto m = integrate_monodromy(ParameterPoint(mu, 0.0), cfg.curves.integrator);
    worst_residual = std::max(worst_residual, m.symplectic_residual);
  }
  std::mt19937_64 rng(cfg.seed + 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    const ParameterPoint p(unit(rng), 0.9 * unit(rng));
    const auto gamma = integrate_monodromy(p, cfg.curves.integrator);
    const auto xi = integrate_rotated_monodromy(p, cfg.curves.integrator);
    worst_residual = std::max({worst_residual, gamma.symplectic_residual, xi.symplectic_residual});
    const double scale = std::max(1.0, gamma.entries.cwiseAbs().maxCoeff());
    worst_gap = std::max(worst_gap, (gamma.entries - xi.entries).cwiseAbs().maxCoeff() / scale);
  }
  if (worst_residual > 1e-9) out.fail("symplectic residual " + fmt(worst_residual));
  if (worst_gap > 1e-8) out.fail("rotated route differs by " + fmt(worst_gap));
  out.note("max residual " + fmt(worst_residual) + ", max |xi - gamma| / max(1,|gamma|) " + fmt(worst_gap));
  return out;
}

struct CheckSpec {
  int id;
  const char* name;
  double time_limit;
  Outcome (*run)(const VerifyConfig&);
};

inline const std::vector<CheckSpec>& check_table() {
  static const std::vector<CheckSpec> table{
      {1, "mu* recovery", 5.0, mu_star_recovery},
      {2, "e=0 eigenvalue match", 10.0, circular_eigenvalue_match},
      {3, "index tables", 20.0, index_tables},
      {4, "tangent slopes", 30.0, tangent_slopes},
      {5, "hyperbolic boundary at e=0", 5.0, circular_hyperbolic_boundary},
      {6, "block oracle equivalence", 10.0, block_oracle_equivalence},
      {7, "perturbation pairings", 0.0, pairing_constants},
      {8, "total -1 multiplicity", 0.0, total_multiplicity},
      {9, "index monotonicity", 0.0, index_monotonicity},
      {10, "cross-method nullity", 0.0, cross_method_nullity},
      {11, "segment classification", 0.0, segment_classification},
      {12, "symplecticity", 0.0, symplecticity},
  };
  return table;
}

}  // namespace verify_detail

inline int acceptance_check_count() { return static_cast<int>(verify_detail::check_table().size()); }

/// Runs the selected checks in order, reporting each result as it finishes.
inline std::vector<CheckResult> run_acceptance_suite(
    const VerifyConfig& cfg, const std::function<void(const CheckResult&)>& on_result = {}) {
  std::vector<CheckResult> results;
  for (const auto& spec : verify_detail::check_table()) {
    if (!cfg.only.empty() && !cfg.only.count(spec.id)) continue;
    CheckResult r;
    r.id = spec.id;
    r.name = spec.name;
    r.time_limit = spec.time_limit;
    const auto start = std::chrono::steady_clock::now();
    try {
      auto outcome = spec.run(cfg);
      r.passed = outcome.passed;
      r.detail = outcome.detail.str();
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.time_limit > 0.0 && r.seconds >= r.time_limit) {
      r.passed = false;
      r.detail += "; runtime " + verify_detail::fmt(r.seconds) + " s exceeds " +
                  verify_detail::fmt(r.time_limit) + " s";
    }
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace robe
