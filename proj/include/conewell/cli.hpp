#pragma once

// Command-line front end. Each subcommand renders its dataset to a string so
// the whole surface can be exercised in-process.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conewell/angular.hpp"
#include "conewell/boxspec.hpp"
#include "conewell/errors.hpp"
#include "conewell/finitewell.hpp"
#include "conewell/oracle.hpp"
#include "conewell/wavefield.hpp"
#include "conewell/weyl.hpp"

namespace conewell::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kUnsupported = 3,
  kConvergence = 4,
};

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::optional<double> theta0;
  double wmin = -0.99;
  double wmax = 0.99;
  int wsteps = 199;
  std::optional<double> emax;
  std::optional<double> u0;
  std::optional<int> m;
  std::optional<int> i;
  std::optional<int> n;
  std::optional<int> order;
  std::string out;
  std::string format;
  bool oracle = false;

  double scan_step = 0.05;
  int branches = 4;

  std::string kind;
  std::optional<double> r_max;
  int r_points = 400;
  int theta_points = 400;
  std::optional<double> theta_max;

  double rel_min = 1e-8;
  double rel_max = 1e-4;
  int points = 12;
};

inline const char* kCsvVersion = "# conewell-format 1";

/// Scientific notation with 12 significant digits.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

/// Rounds to 12 significant digits so JSON text is stable across platforms.
inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(fmt(v));
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& columns) {
    os_ << kCsvVersion << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c)
      os_ << (c ? "," : "") << columns[c];
    os_ << '\n';
  }
  Csv& cell(double v) { return put(fmt(v)); }
  Csv& cell(int v) { return put(std::to_string(v)); }
  Csv& cell(long v) { return put(std::to_string(v)); }
  Csv& cell(bool v) { return put(v ? "true" : "false"); }
  Csv& end() {
    os_ << '\n';
    first_ = true;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  Csv& put(const std::string& s) {
    os_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
  }
  std::ostringstream os_;
  bool first_ = true;
};

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Validation helpers

inline std::vector<double> w_grid(const RunConfig& c) {
  if (c.theta0) return {ConeGeometry::from_theta0(*c.theta0).w};
  if (c.wsteps < 1) throw config_error("w grid is empty (wsteps < 1)");
  if (!(c.wmin > -1.0) || !(c.wmax < 1.0) || c.wmin > c.wmax)
    throw config_error("w grid must satisfy -1 < wmin <= wmax < 1");
  if (c.wsteps == 1) return {c.wmin};
  if (c.wmin == c.wmax) throw config_error("wmin == wmax needs wsteps = 1");
  std::vector<double> w(static_cast<std::size_t>(c.wsteps));
  const int last = c.wsteps - 1;
  for (int k = 0; k <= last; ++k)
    w[static_cast<std::size_t>(k)] = ((last - k) * c.wmin + k * c.wmax) / last;
  return w;
}

inline ConeGeometry need_geometry(const RunConfig& c) {
  if (!c.theta0) throw config_error(c.command + ": --theta0 is required");
  if (!(*c.theta0 > 0.0) || *c.theta0 > std::numbers::pi)
    throw config_error("--theta0 must lie in (0, pi]");
  return ConeGeometry::from_theta0(*c.theta0);
}

inline double need_u0(const RunConfig& c) {
  if (!c.u0) throw config_error(c.command + ": --u0 is required");
  if (!(*c.u0 > 0.0)) throw config_error("--u0 must be > 0");
  return *c.u0;
}

inline void check_format(const RunConfig& c, const std::string& fallback,
                         std::string& format) {
  format = c.format.empty() ? fallback : c.format;
  if (format != "csv" && format != "json")
    throw config_error("--format must be csv or json");
}

inline AngularOptions angular_options(const RunConfig& c) {
  if (!(c.scan_step > 0.0) || c.scan_step > 0.5)
    throw config_error("scan_step must lie in (0, 0.5]");
  AngularOptions o;
  o.scan_step = c.scan_step;
  return o;
}

inline AngularMode select_mode(const RunConfig& c, const ConeGeometry& g) {
  const int m = c.m.value_or(0);
  const int i = c.i.value_or(m);
  if (m < 0 || i < m) throw config_error("need 0 <= m <= i");
  return find_lambdas(g, m, i - m + 1, angular_options(c)).back();
}

// ---------------------------------------------------------------------------
// Subcommands

/// Branches lambda_i^m(w).
inline std::string cmd_lambdas(const RunConfig& c) {
  std::string format;
  check_format(c, "csv", format);
  const auto grid = w_grid(c);
  const auto opt = angular_options(c);
  if (c.branches < 1) throw config_error("branches must be >= 1");
  std::vector<int> ms;
  if (c.m) {
    if (*c.m < 0) throw config_error("--m must be >= 0");
    ms = {*c.m};
  } else {
    ms = {0, 1, 2, 3};
  }

  struct Row {
    double w;
    int m, i;
    double lambda;
    double oracle;
  };
  std::vector<Row> rows;
  for (int m : ms) {
    std::vector<int> is;
    if (c.i) {
      if (*c.i < m) throw config_error("--i must be >= m");
      is = {*c.i};
    } else {
      for (int k = 0; k < c.branches; ++k) is.push_back(m + k);
    }
    for (int i : is) {
      std::vector<BranchPoint> pts;
      if (c.theta0) {
        const auto g = need_geometry(c);
        pts = {{g.w, find_lambdas(g, m, i - m + 1, opt).back().lambda}};
      } else {
        pts = trace_branch(m, i, grid, opt);
      }
      for (const auto& p : pts) {
        double o = std::nan("");
        if (c.oracle && p.w > -1.0) {
          const auto res = angular_oracle(std::acos(p.w), m, i - m + 1);
          o = res.eigenvalues.back();
        }
        rows.push_back({p.w, m, i, p.lambda, o});
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.w, a.m, a.i) < std::tie(b.w, b.m, b.i);
  });

  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j{{"w", round12(r.w)}, {"m", r.m}, {"i", r.i},
                       {"lambda", round12(r.lambda)}};
      if (c.oracle) j["oracle_lambda"] = round12(r.oracle);
      arr.push_back(j);
    }
    return dump({{"rows", arr}});
  }
  std::vector<std::string> cols{"w", "m", "i", "lambda"};
  if (c.oracle) cols.push_back("oracle_lambda");
  Csv csv(cols);
  for (const auto& r : rows) {
    csv.cell(r.w).cell(r.m).cell(r.i).cell(r.lambda);
    if (c.oracle) csv.cell(r.oracle);
    csv.end();
  }
  return csv.str();
}

/// Box energies E = alpha_n(lambda_i^m)^2 <= emax along the w grid.
inline std::string cmd_spectrum(const RunConfig& c) {
  std::string format;
  check_format(c, "csv", format);
  if (c.oracle) throw config_error("--oracle is not available for spectrum");
  const double emax = c.emax.value_or(100.0);
  if (!(emax > 0.0)) throw config_error("--emax must be > 0");
  const auto opt = angular_options(c);
  const auto grid = w_grid(c);

  nlohmann::json arr = nlohmann::json::array();
  Csv csv({"w", "m", "i", "n", "E", "degeneracy"});
  for (double w : grid) {
    const auto g = c.theta0 ? ConeGeometry::from_theta0(*c.theta0)
                            : ConeGeometry::from_w(w);
    for (const auto& s : enumerate_spectrum(g, emax, opt)) {
      if (c.m && s.mode.m != *c.m) continue;
      if (format == "json")
        arr.push_back({{"w", round12(g.w)},
                       {"m", s.mode.m},
                       {"i", s.mode.i},
                       {"n", s.n},
                       {"E", round12(s.energy)},
                       {"degeneracy", s.mode.degeneracy}});
      else
        csv.cell(g.w).cell(s.mode.m).cell(s.mode.i).cell(s.n).cell(s.energy)
            .cell(s.mode.degeneracy).end();
    }
  }
  if (format == "json") return dump({{"emax", round12(emax)}, {"rows", arr}});
  return csv.str();
}

/// N(E) against the Weyl estimates at every breakpoint.
inline std::string cmd_weyl(const RunConfig& c) {
  std::string format;
  check_format(c, "csv", format);
  if (c.oracle) throw config_error("--oracle is not available for weyl");
  const auto g = c.theta0 ? need_geometry(c)
                          : ConeGeometry::from_theta0(std::numbers::pi);
  const double emax = c.emax.value_or(4000.0);
  if (!(emax > 0.0)) throw config_error("--emax must be > 0");
  const bool has3 = g.full_sphere() || g.hemisphere();
  const int order = c.order.value_or(has3 ? 3 : 2);
  if (order < 1 || order > 3) throw config_error("--order must be 1, 2 or 3");
  const auto terms = weyl_terms(g, order);  // throws unsupported for order 3
  const auto t1 = weyl_terms(g, 1), t2 = weyl_terms(g, 2);
  const WeylTerms t3 = has3 ? weyl_terms(g, 3) : t2;

  const auto cf = count_function(enumerate_spectrum(g, emax, angular_options(c)), emax);
  const auto rs = remainder_series(cf, terms, emax);

  nlohmann::json arr = nlohmann::json::array();
  Csv csv({"E", "N", "N_W1", "N_W2", "N_W3", "r"});
  for (std::size_t k = 0; k < cf.energies.size(); ++k) {
    const double e = cf.energies[k];
    const long N = cf.cumulative[k];
    const double w3 = has3 ? n_weyl(t3, e) : std::nan("");
    const double r = static_cast<double>(N) - n_weyl(terms, e);
    if (format == "json") {
      nlohmann::json j{{"E", round12(e)},
                       {"N", N},
                       {"N_W1", round12(n_weyl(t1, e))},
                       {"N_W2", round12(n_weyl(t2, e))},
                       {"r", round12(r)}};
      j["N_W3"] = has3 ? nlohmann::json(round12(w3)) : nlohmann::json(nullptr);
      arr.push_back(j);
    } else {
      csv.cell(e).cell(N).cell(n_weyl(t1, e)).cell(n_weyl(t2, e)).cell(w3)
          .cell(r).end();
    }
  }
  if (format == "json")
    return dump({{"theta0", round12(g.theta0)},
                 {"emax", round12(emax)},
                 {"order", order},
                 {"N_emax", eval_N(cf, emax)},
                 {"c", round12(rs.c)},
                 {"max_abs_r", round12(rs.max_abs)},
                 {"rows", arr}});
  return csv.str();
}

/// Critical depth, zero-energy ladder and bound states at depth U0.
inline std::string cmd_well(const RunConfig& c) {
  std::string format;
  check_format(c, "json", format);
  const auto g = need_geometry(c);
  const double U0 = need_u0(c);
  const auto cd = critical_data(g, U0);
  const auto states = all_bound_states({g, U0});

  // The oracle re-solves each binding mode by shooting and reports the
  // nearest of its eigenvalues.
  std::vector<double> oracle_e(states.size(), std::nan(""));
  if (c.oracle) {
    std::map<std::pair<int, int>, std::vector<double>> cache;
    for (std::size_t k = 0; k < states.size(); ++k) {
      const auto& s = states[k];
      auto [it, fresh] = cache.try_emplace({s.mode.m, s.mode.i});
      if (fresh) it->second = radial_oracle(s.mode.lambda, U0).eigenvalues;
      for (double v : it->second)
        if (std::isnan(oracle_e[k]) ||
            std::fabs(v - s.energy) < std::fabs(oracle_e[k] - s.energy))
          oracle_e[k] = v;
    }
  }

  if (format == "csv") {
    std::vector<std::string> cols{"m", "i", "lambda", "n", "E", "xi", "normalizable"};
    if (c.oracle) cols.push_back("oracle_E");
    Csv csv(cols);
    for (std::size_t k = 0; k < states.size(); ++k) {
      const auto& s = states[k];
      csv.cell(s.mode.m).cell(s.mode.i).cell(s.mode.lambda).cell(s.n)
          .cell(s.energy).cell(s.xi).cell(s.normalizable);
      if (c.oracle) csv.cell(oracle_e[k]);
      csv.end();
    }
    return csv.str();
  }
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& p : cd.ladder)
    ladder.push_back({{"m", p.m},
                      {"i", p.i},
                      {"n", p.n},
                      {"lambda", round12(p.lambda)},
                      {"depth", round12(p.depth)}});
  nlohmann::json bound = nlohmann::json::array();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    nlohmann::json j{{"m", s.mode.m},
                     {"i", s.mode.i},
                     {"lambda", round12(s.mode.lambda)},
                     {"n", s.n},
                     {"E", round12(s.energy)},
                     {"xi", round12(s.xi)},
                     {"normalizable", s.normalizable}};
    if (c.oracle)
      j["oracle_E"] = std::isnan(oracle_e[k]) ? nlohmann::json(nullptr)
                                              : nlohmann::json(round12(oracle_e[k]));
    bound.push_back(j);
  }
  return dump({{"theta0", round12(g.theta0)},
               {"U0", round12(U0)},
               {"lambda00", round12(cd.lambda00)},
               {"U_c", round12(cd.U_c)},
               {"ladder", ladder},
               {"bound_states", bound}});
}

/// Localization-length exponent near a zero-energy depth.
inline std::string cmd_exponent(const RunConfig& c) {
  std::string format;
  check_format(c, "json", format);
  if (c.oracle) throw config_error("--oracle is not available for exponent");
  const auto g = need_geometry(c);
  const auto mode = select_mode(c, g);
  const int n = c.n.value_or(1);
  if (n < 1) throw config_error("--n must be >= 1");
  ExponentOptions opt;
  opt.rel_min = c.rel_min;
  opt.rel_max = c.rel_max;
  opt.points = c.points;
  if (!(opt.rel_min > 0.0) || !(opt.rel_max > opt.rel_min) || opt.points < 3)
    throw config_error("exponent grid needs 0 < rel_min < rel_max and points >= 3");
  const auto fit = localization_exponent(mode, n, opt);

  if (format == "csv") {
    Csv csv({"dU", "E", "xi"});
    for (const auto& s : fit.samples) csv.cell(s.dU).cell(s.energy).cell(s.xi).end();
    return csv.str();
  }
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : fit.samples)
    samples.push_back({{"dU", round12(s.dU)}, {"E", round12(s.energy)}, {"xi", round12(s.xi)}});
  return dump({{"theta0", round12(g.theta0)},
               {"m", mode.m},
               {"i", mode.i},
               {"n", n},
               {"lambda", round12(fit.lambda)},
               {"U_ref", round12(fit.U_ref)},
               {"nu_fit", round12(fit.nu)},
               {"nu_theory", round12(fit.nu_theory)},
               {"residual", round12(fit.residual)},
               {"nu_log", round12(fit.nu_log)},
               {"residual_log", round12(fit.residual_log)},
               {"accepted", fit.accepted},
               {"log_preferred", fit.log_preferred},
               {"samples", samples}});
}

/// |psi|^2 on an r x theta grid in the phi = 0 half plane.
inline std::string cmd_field(const RunConfig& c) {
  std::string format;
  check_format(c, "csv", format);
  if (c.oracle) throw config_error("--oracle is not available for field");
  const auto g = need_geometry(c);
  const std::string kind = c.kind.empty() ? (c.u0 ? "well" : "box") : c.kind;
  const auto mode = select_mode(c, g);
  const int n = c.n.value_or(1);
  if (n < 1) throw config_error("--n must be >= 1");
  if (c.r_points < 1 || c.theta_points < 1)
    throw config_error("grid sizes must be >= 1");

  std::optional<Eigenfunction> psi;
  double r_max_default = 3.0;
  if (kind == "box") {
    const double a = bessel_zero(mode.lambda, n);
    psi.emplace(box_eigenfunction({mode, n, a, a * a}));
    r_max_default = 1.0;
  } else if (kind == "well") {
    const double U0 = need_u0(c);
    const auto states = solve_mode_bound_states(mode, U0);
    if (static_cast<int>(states.size()) < n)
      throw config_error("the selected mode has fewer than n bound states");
    psi.emplace(well_eigenfunction(states[static_cast<std::size_t>(n - 1)]));
  } else if (kind == "zero") {
    const double depth = zero_energy_depths(mode, n).back();
    const double U0 = c.u0.value_or(depth);
    psi.emplace(zero_energy_eigenfunction(mode, U0));
  } else {
    throw config_error("--kind must be box, well or zero");
  }
  const double r_max = c.r_max.value_or(r_max_default);
  const double th_max = c.theta_max.value_or(g.theta0);
  if (!(r_max > 0.0)) throw config_error("--r-max must be > 0");
  if (!(th_max > 0.0) || th_max > std::numbers::pi)
    throw config_error("--theta-max must lie in (0, pi]");
  const auto grid = eval_field(*psi, linspace(0.0, r_max, c.r_points),
                               linspace(0.0, th_max, c.theta_points));
  if (format == "json") {
    nlohmann::json vals = nlohmann::json::array();
    for (double v : grid.values) vals.push_back(round12(v));
    nlohmann::json r = nlohmann::json::array(), th = nlohmann::json::array();
    for (double v : grid.r) r.push_back(round12(v));
    for (double v : grid.theta) th.push_back(round12(v));
    return dump({{"kind", kind}, {"r", r}, {"theta", th}, {"density", vals}});
  }
  Csv csv({"r", "theta", "density"});
  for (std::size_t ir = 0; ir < grid.r.size(); ++ir)
    for (std::size_t it = 0; it < grid.theta.size(); ++it)
      csv.cell(grid.r[ir]).cell(grid.theta[it]).cell(grid.at(ir, it)).end();
  return csv.str();
}

inline std::string dispatch(const RunConfig& c) {
  if (c.command == "lambdas") return cmd_lambdas(c);
  if (c.command == "spectrum") return cmd_spectrum(c);
  if (c.command == "weyl") return cmd_weyl(c);
  if (c.command == "well") return cmd_well(c);
  if (c.command == "exponent") return cmd_exponent(c);
  if (c.command == "field") return cmd_field(c);
  throw config_error("unknown subcommand '" + c.command + "'");
}

/// Writes through a temporary file in the target directory, then renames.
inline void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw config_error("cannot open '" + tmp.string() + "' for writing");
    os << text;
    os.flush();
    if (!os) throw config_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw config_error("cannot rename output into place: " + ec.message());
  }
}

// ---------------------------------------------------------------------------
// Argument parsing

inline void build_app(CLI::App& app, RunConfig& c) {
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.add_option("--theta0", c.theta0, "cone apex half-angle in radians, (0, pi]");
  app.add_option("--wmin", c.wmin, "first w = cos(theta0) of the grid");
  app.add_option("--wmax", c.wmax, "last w of the grid");
  app.add_option("--wsteps", c.wsteps, "number of w grid points");
  app.add_option("--emax", c.emax, "energy ceiling");
  app.add_option("--u0", c.u0, "well depth");
  app.add_option("--m", c.m, "azimuthal order");
  app.add_option("--i", c.i, "branch index (i >= m)");
  app.add_option("--n", c.n, "radial index or bound-state ordinal");
  app.add_option("--order", c.order, "Weyl order 1, 2 or 3");
  app.add_option("--out", c.out, "output file (default stdout)");
  app.add_option("--format", c.format, "csv or json");
  app.add_flag("--oracle", c.oracle, "also report independent oracle values");
  app.add_option("--scan-step,--scan_step", c.scan_step, "lambda scan step");
  app.add_option("--branches", c.branches, "branches per order for lambdas");
  app.add_option("--kind", c.kind, "field: box, well or zero");
  app.add_option("--r-max,--r_max", c.r_max, "field: largest r");
  app.add_option("--r-points,--r_points", c.r_points, "field: r samples");
  app.add_option("--theta-points,--theta_points", c.theta_points, "field: theta samples");
  app.add_option("--theta-max,--theta_max", c.theta_max, "field: largest theta");
  app.add_option("--rel-min,--rel_min", c.rel_min, "exponent: smallest dU / U_ref");
  app.add_option("--rel-max,--rel_max", c.rel_max, "exponent: largest dU / U_ref");
  app.add_option("--points", c.points, "exponent: number of dU samples");
  for (const char* name : {"lambdas", "spectrum", "weyl", "well", "exponent", "field"})
    app.add_subcommand(name)->callback([&c, name] { c.command = name; });
  app.get_subcommand("lambdas")->description("polar degrees lambda_i^m along a w grid");
  app.get_subcommand("spectrum")->description("box energies along a w grid");
  app.get_subcommand("weyl")->description("state count N(E) against Weyl estimates");
  app.get_subcommand("well")->description("critical depth and bound states of the finite well");
  app.get_subcommand("exponent")->description("localization-length exponent near a zero-energy depth");
  app.get_subcommand("field")->description("|psi|^2 on an r x theta grid");
}

/// Runs the CLI; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  RunConfig c;
  CLI::App app{"Particle in a spherical box or finite well bounded by a cone", "conewell"};
  build_app(app, c);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "conewell: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    const std::string text = dispatch(c);
    if (c.out.empty())
      out << text;
    else
      write_atomically(c.out, text);
    return kOk;
  } catch (const config_error& e) {
    err << "conewell: " << e.what() << "\n";
    return kConfigError;
  } catch (const unsupported_error& e) {
    err << "conewell: unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const convergence_error& e) {
    err << "conewell: convergence failure: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::domain_error& e) {
    err << "conewell: invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "conewell: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace conewell::cli
