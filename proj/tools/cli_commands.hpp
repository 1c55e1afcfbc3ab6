#pragma once

// Command-line front end: argument parsing, output rendering and the exit-code
// contract (0 success, 1 verification failure, 2 usage error, 3 numerical
// failure).  Kept header-only so tests can drive it in-process.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robe/robe.hpp"
#include "robe/verification.hpp"

namespace robe::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsage = 2, kNumerical = 3 };

struct RunConfig {
  CurveConfig curves;
  std::string format = "json";
};

/// %.12g with negative zero folded to zero.
inline std::string format_number(double x) {
  if (x == 0.0) x = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------
// Renderers

inline nlohmann::ordered_json index_record(const ParameterPoint& p, const UnitCirclePoint& w,
                                           const IndexResult& r) {
  nlohmann::ordered_json j;
  j["mu"] = p.mu();
  j["e"] = p.e();
  j["omega_angle"] = w.angle();
  j["index"] = r.pair.index;
  j["nullity"] = r.pair.nullity;
  j["N_used"] = r.truncation_used;
  return j;
}

inline nlohmann::ordered_json monodromy_record(const ParameterPoint& p, const SymplecticMatrix4& m,
                                               const StabilityClass& cls) {
  nlohmann::ordered_json j;
  j["mu"] = p.mu();
  j["e"] = p.e();
  auto rows = nlohmann::ordered_json::array();
  for (int r = 0; r < 4; ++r) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < 4; ++c) row.push_back(m.entries(r, c));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  auto ev = nlohmann::ordered_json::array();
  for (const auto& z : cls.eigenvalues) ev.push_back({{"re", z.real()}, {"im", z.imag()}});
  j["eigenvalues"] = ev;
  j["symplectic_residual"] = m.symplectic_residual;
  nlohmann::ordered_json st;
  st["tag"] = to_string(cls.tag);
  st["strong"] = cls.strong;
  st["elliptic_angles"] = cls.elliptic_angles;
  auto deg = nlohmann::ordered_json::array();
  for (const auto& d : cls.degenerate) {
    nlohmann::ordered_json item;
    item["angle"] = d.omega.angle();
    item["nullity"] = d.nullity;
    item["algebraic_multiplicity"] = d.algebraic_multiplicity;
    item["kind"] = to_string(d.kind);
    item["confident"] = d.confident;
    deg.push_back(item);
  }
  st["degenerate"] = deg;
  j["stability"] = st;
  return j;
}

/// Flat key/value CSV for single-record commands.
inline std::string record_csv(const nlohmann::ordered_json& j) {
  std::vector<std::pair<std::string, std::string>> cells;
  for (const auto& [key, value] : j.items()) {
    if (value.is_number_float()) {
      cells.emplace_back(key, format_number(value.get<double>()));
    } else if (value.is_string()) {
      cells.emplace_back(key, value.get<std::string>());
    } else {
      cells.emplace_back(key, value.dump());
    }
  }
  std::string header;
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    header += (i ? "," : "") + csv_field(cells[i].first);
    row += (i ? "," : "") + csv_field(cells[i].second);
  }
  return header + "\n" + row + "\n";
}

inline std::string monodromy_csv(const ParameterPoint& p, const SymplecticMatrix4& m,
                                 const StabilityClass& cls) {
  std::ostringstream head;
  std::ostringstream row;
  head << "mu,e,stability,strong,symplectic_residual";
  row << format_number(p.mu()) << ',' << format_number(p.e()) << ',' << to_string(cls.tag) << ','
      << (cls.strong ? "true" : "false") << ',' << format_number(m.symplectic_residual);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      head << ",m" << r + 1 << c + 1;
      row << ',' << format_number(m.entries(r, c));
    }
  }
  for (int k = 0; k < 4; ++k) {
    head << ",lam" << k + 1 << "_re,lam" << k + 1 << "_im";
    row << ',' << format_number(cls.eigenvalues[k].real()) << ','
        << format_number(cls.eigenvalues[k].imag());
  }
  return head.str() + "\n" + row.str() + "\n";
}

inline std::vector<double> trace_grid(double e_max, int steps) {
  if (steps < 1) throw InvalidParameter("--steps must be at least 1");
  std::vector<double> grid;
  for (int k = 0; k <= steps; ++k) {
    const double e = e_max * k / steps;
    if (grid.empty() || e > grid.back()) grid.push_back(e);
  }
  return grid;
}

inline std::string trace_csv(const CurveTraces& traces) {
  std::string out = "curve,e,mu\n";
  for (const auto* trace : {&traces.left, &traces.middle, &traces.right}) {
    for (const auto& s : trace->samples) {
      out += to_string(trace->name) + "," + format_number(s.e) + "," + format_number(s.mu) + "\n";
    }
  }
  return out;
}

inline std::string diagram_csv(const std::vector<DiagramRow>& rows) {
  std::string out = "mu,e,stability,i1,nu1,im1,num1";
  for (int k = 1; k <= 4; ++k) {
    out += ",lam" + std::to_string(k) + "_re,lam" + std::to_string(k) + "_im";
  }
  out += ",error\n";
  const auto pair_cells = [](const std::optional<IndexPair>& p) {
    return p ? std::to_string(p->index) + "," + std::to_string(p->nullity) : std::string(",");
  };
  for (const auto& r : rows) {
    out += format_number(r.mu) + "," + format_number(r.e) + ",";
    out += r.stability ? to_string(r.stability->tag) : std::string();
    out += "," + pair_cells(r.at_one) + "," + pair_cells(r.at_minus_one);
    for (const auto& z : r.eigenvalues) {
      if (r.stability) {
        out += "," + format_number(z.real()) + "," + format_number(z.imag());
      } else {
        out += ",,";
      }
    }
    out += "," + csv_field(r.error) + "\n";
  }
  return out;
}

inline std::string verify_text(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    os << (r.passed ? "PASS" : "FAIL") << "  " << r.id << ". " << r.name << " (" << secs << " s): "
       << r.detail << "\n";
  }
  return os.str();
}

inline nlohmann::ordered_json verify_json(const std::vector<CheckResult>& results) {
  nlohmann::ordered_json j;
  bool all = true;
  auto checks = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    nlohmann::ordered_json c;
    c["id"] = r.id;
    c["name"] = r.name;
    c["passed"] = r.passed;
    c["seconds"] = r.seconds;
    c["time_limit"] = r.time_limit;
    c["detail"] = r.detail;
    checks.push_back(c);
  }
  j["passed"] = all;
  j["checks"] = checks;
  return j;
}

/// Writes the whole payload or nothing: the text goes to a sibling temporary
/// that is renamed into place.
inline void write_atomically(const std::string& path, const std::string& payload) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << payload;
    if (!f.flush()) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Linear stability of elliptic relative equilibria in the restricted three-body problem",
               "robe-stability"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--integrator-tol", cfg.curves.integrator.tolerance, "Integrator tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--zero-band", cfg.curves.spectral.zero_band,
                 "Relative band treated as a zero eigenvalue")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--bisect-tol", cfg.curves.bisect_tol, "Curve bisection tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--truncation", cfg.curves.spectral.truncation, "Initial Fourier truncation N")
      ->check(CLI::Range(4, 100000))
      ->capture_default_str();
  app.add_option("--max-truncation", cfg.curves.spectral.max_truncation, "Largest truncation N")
      ->check(CLI::Range(4, 100000))
      ->capture_default_str();
  app.add_option("--e-max", cfg.curves.e_max, "Largest eccentricity for trace and diagram")
      ->check(CLI::Range(0.0, kDefaultEMax))
      ->capture_default_str();
  app.add_option("--format", cfg.format, "Output format of index and monodromy")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  double mu = 0.0;
  double e = 0.0;
  double omega_angle = 0.0;
  auto* index_cmd = app.add_subcommand("index", "omega-Morse index and nullity at one point");
  index_cmd->add_option("--mu", mu, "Mass parameter in [0, 1]")->required();
  index_cmd->add_option("--e", e, "Eccentricity in [0, 1)")->required();
  index_cmd->add_option("--omega-angle", omega_angle, "Boundary multiplier angle in radians")
      ->required();

  auto* mono_cmd = app.add_subcommand("monodromy", "Monodromy matrix and stability class");
  mono_cmd->add_option("--mu", mu, "Mass parameter in [0, 1]")->required();
  mono_cmd->add_option("--e", e, "Eccentricity in [0, 1)")->required();

  int steps = 20;
  std::string out_path;
  auto* trace_cmd = app.add_subcommand("trace", "Trace the -1 degenerate and hyperbolic boundaries");
  trace_cmd->add_option("--steps", steps, "Number of e intervals on [0, e-max]")->capture_default_str();
  trace_cmd->add_option("--out", out_path, "Output CSV (standard output if omitted)");

  int mu_steps = 51;
  int e_steps = 21;
  auto* diagram_cmd = app.add_subcommand("diagram", "Stability diagram sweep");
  diagram_cmd->add_option("--mu-steps", mu_steps, "Grid points in mu")->capture_default_str();
  diagram_cmd->add_option("--e-steps", e_steps, "Grid points in e")->capture_default_str();
  diagram_cmd->add_option("--out", out_path, "Output CSV (standard output if omitted)");

  bool verify_as_json = false;
  std::vector<int> only;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance checks");
  verify_cmd->add_flag("--json", verify_as_json, "Machine-readable report");
  verify_cmd->add_option("--only", only, "Run only these check ids")
      ->check(CLI::Range(1, acceptance_check_count()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kSuccess : kUsage;
  }
  if (cfg.curves.spectral.max_truncation < cfg.curves.spectral.truncation) {
    err << "error: --max-truncation must be at least --truncation\n";
    return kUsage;
  }

  try {
    if (*index_cmd) {
      std::optional<ParameterPoint> p;
      try {
        p.emplace(mu, e);
      } catch (const InvalidParameter& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsage;
      }
      if (!std::isfinite(omega_angle)) {
        err << "error: --omega-angle must be finite\n";
        return kUsage;
      }
      const UnitCirclePoint w(omega_angle);
      const auto r = morse_index_nullity(*p, w, cfg.curves.spectral);
      const auto j = index_record(*p, w, r);
      out << (cfg.format == "csv" ? record_csv(j) : j.dump(2) + "\n");
      return kSuccess;
    }
    if (*mono_cmd) {
      std::optional<ParameterPoint> p;
      try {
        p.emplace(mu, e);
      } catch (const InvalidParameter& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsage;
      }
      const auto m = integrate_monodromy(*p, cfg.curves.integrator);
      const auto cls = classify_stability(m, cfg.curves.classification);
      out << (cfg.format == "csv" ? monodromy_csv(*p, m, cls)
                                  : monodromy_record(*p, m, cls).dump(2) + "\n");
      return kSuccess;
    }
    if (*trace_cmd) {
      std::vector<double> grid;
      try {
        grid = trace_grid(cfg.curves.e_max, steps);
      } catch (const InvalidParameter& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsage;
      }
      const auto csv = trace_csv(trace_curves(grid, cfg.curves));
      if (out_path.empty()) {
        out << csv;
      } else {
        write_atomically(out_path, csv);
      }
      return kSuccess;
    }
    if (*diagram_cmd) {
      std::vector<DiagramRow> rows;
      try {
        rows = sweep_diagram(mu_steps, e_steps, cfg.curves);
      } catch (const InvalidParameter& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsage;
      }
      int warnings = 0;
      for (const auto& r : rows) warnings += r.error.empty() ? 0 : 1;
      const auto csv = diagram_csv(rows);
      if (out_path.empty()) {
        out << csv;
      } else {
        write_atomically(out_path, csv);
      }
      err << rows.size() << " rows, " << warnings << " warnings\n";
      return kSuccess;
    }
    if (*verify_cmd) {
      VerifyConfig vc;
      vc.curves = cfg.curves;
      vc.only.insert(only.begin(), only.end());
      const auto results = run_acceptance_suite(vc);
      bool all = true;
      for (const auto& r : results) all = all && r.passed;
      if (verify_as_json) {
        out << verify_json(results).dump(2) << "\n";
      } else {
        out << verify_text(results);
        if (!all) {
          out << "failed:";
          for (const auto& r : results) {
            if (!r.passed) out << " " << r.id;
          }
          out << "\n";
        }
      }
      return all ? kSuccess : kVerificationFailed;
    }
  } catch (const InvalidParameter& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const NumericalError& ex) {
    err << "numerical failure: " << ex.what() << "\n";
    return kNumerical;
  } catch (const std::exception& ex) {
    err << "failure: " << ex.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace robe::cli
