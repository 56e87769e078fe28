#pragma once

// Command surface: verify | solve | geodesic | criterion. Each command is a
// pure function of RunConfig plus the registry; with a fixed seed the emitted
// CSV and JSON artifacts are bit-identical across runs. Exit codes are a
// stable contract: 0 success, 1 check failure, 2 configuration error.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "geoflow/criteria.hpp"
#include "geoflow/expr.hpp"
#include "geoflow/flows.hpp"
#include "geoflow/geodesic.hpp"
#include "geoflow/geometry.hpp"
#include "geoflow/hodograph.hpp"
#include "geoflow/interp.hpp"
#include "geoflow/io.hpp"
#include "geoflow/registry.hpp"
#include "geoflow/rng.hpp"

namespace geoflow::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

// Everything a command run depends on. --tol maps to the command's own
// tolerance, so the unset state keeps per-command defaults documented on the
// flags themselves.
struct RunConfig {
  std::string command;                           // verify|solve|geodesic|criterion
  std::string example;                           // registry id
  std::string config_path;                       // user-supplied problem JSON
  std::map<std::string, std::string> overrides;  // --set k=v
  bool has_grid = false;
  GridSpec grid;               // replaces the entry's default patch
  std::optional<double> tol;   // per-command tolerance
  std::optional<int> samples;  // verify/criterion sample count
  PhasePoint state{};          // geodesic initial condition
  double t_end = 1.0;
  std::uint64_t seed = 1729;
  std::string out_dir = ".";
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  for (char c : s) {
    if (c == sep) {
      out.push_back(part);
      part.clear();
    } else {
      part.push_back(c);
    }
  }
  out.push_back(part);
  return out;
}

inline std::vector<double> parse_numbers(const std::string& flag,
                                         const std::string& text,
                                         std::size_t count) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != count)
    throw RegistryError(flag + " expects " + std::to_string(count) +
                        " comma-separated values, got '" + text + "'");
  std::vector<double> out;
  out.reserve(count);
  for (const std::string& p : parts) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size() || p.empty())
      throw RegistryError(flag + ": '" + p + "' is not a number");
    out.push_back(v);
  }
  return out;
}

inline GridSpec parse_grid(const std::string& text) {
  const std::vector<double> v = parse_numbers("--grid", text, 6);
  GridSpec spec{v[0], v[1], v[2], v[3], static_cast<int>(v[4]),
                static_cast<int>(v[5])};
  if (static_cast<double>(spec.nt) != v[4] ||
      static_cast<double>(spec.nx) != v[5] || spec.nt < 2 || spec.nx < 2)
    throw RegistryError("--grid: nt and nx must be integers >= 2");
  return spec;
}

inline json grid_json(const GridSpec& s) {
  return json{{"t0", s.t0}, {"t1", s.t1}, {"x0", s.x0},
              {"x1", s.x1}, {"nt", s.nt}, {"nx", s.nx}};
}

inline std::filesystem::path out_file(const RunConfig& rc,
                                      const std::string& name) {
  return std::filesystem::path(rc.out_dir) / name;
}

// drift scaled against the conserved quantity's own magnitude, with an
// absolute floor so a value near zero does not inflate the ratio
inline double relative_drift(double drift, double initial) {
  return drift / std::max(1.0, std::abs(initial));
}

}  // namespace detail

// Resolves --example/--config into a ready-to-run entry. Config files use
// the same JSON schema the registry exports, so user problems and built-ins
// share one path; --set on a config file may only touch system constants.
inline ExampleEntry load_entry(const RunConfig& rc) {
  if (!rc.example.empty() && !rc.config_path.empty())
    throw RegistryError("pass either --example or --config, not both");
  if (!rc.example.empty()) return get_example(rc.example, rc.overrides);
  if (rc.config_path.empty())
    throw RegistryError("one of --example or --config is required");

  std::ifstream in(rc.config_path);
  if (!in) throw RegistryError("cannot open config file " + rc.config_path);
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw RegistryError("config file " + rc.config_path + ": " + e.what());
  }
  ExampleEntry e = entry_from_config_json(j);
  for (const auto& [key, value] : rc.overrides) {
    if (e.implicit_payload &&
        e.implicit_payload->system.constants.count(key))
      e.implicit_payload->system.constants[key] =
          geoflow::detail::parse_number(key, value);
    else
      throw RegistryError("override '" + key +
                          "' does not name a constant of the config");
  }
  return e;
}

// Geodesic flow over a continuation patch. The fields a_k are interpolated
// bicubically; with g = a_{n-1} the metric is g^2 dt^2 + dx^2, so
// H = (p1^2/g^2 + p2^2)/2 and F = sum_k a_k p1^(n-k) p2^k / g^(n-k) with
// a_n = 1. Two guards stop the run: metric degeneracy |g|/|grad g|, and a
// patch-edge distance scaled so the default margin trips one cell from the
// boundary, where the interpolant turns into extrapolation.
inline FlowSystem grid_flow_system(const GridSolution& g) {
  const int n = g.n;
  auto fields = std::make_shared<std::vector<BicubicField>>();
  fields->reserve(n);
  for (int k = 0; k < n; ++k) fields->push_back(field_surface(g, k));
  const GridSpec spec = g.spec;

  using State = FlowSystem::State;
  FlowSystem sys;
  sys.rhs = [fields, n](const State& y) -> State {
    const BicubicField& gp = (*fields)[n - 1];
    const double gv = gp.value(y[0], y[1]);
    const double gt = gp.d_t(y[0], y[1]);
    const double gx = gp.d_x(y[0], y[1]);
    const double g2 = gv * gv, g3 = g2 * gv;
    return {y[2] / g2, y[3], y[2] * y[2] * gt / g3, y[2] * y[2] * gx / g3};
  };
  sys.energy = [fields, n](const State& y) {
    const double gv = (*fields)[n - 1].value(y[0], y[1]);
    return 0.5 * (y[2] * y[2] / (gv * gv) + y[3] * y[3]);
  };
  sys.monitors.push_back([fields, n](const State& y) {
    const double gv = (*fields)[n - 1].value(y[0], y[1]);
    double acc = std::pow(y[3], n);
    for (int k = 0; k < n; ++k)
      acc += (*fields)[k].value(y[0], y[1]) / std::pow(gv, n - k) *
             std::pow(y[2], n - k) * std::pow(y[3], k);
    return acc;
  });
  sys.guard_distances.push_back([fields, n](const State& y) {
    const BicubicField& gp = (*fields)[n - 1];
    const double gv = gp.value(y[0], y[1]);
    const double grad = std::hypot(gp.d_t(y[0], y[1]), gp.d_x(y[0], y[1]));
    if (!std::isfinite(gv) || !std::isfinite(grad)) return 0.0;
    if (grad == 0.0) return gv == 0.0 ? 0.0 : 1e300;
    return std::abs(gv) / grad;
  });
  sys.guard_distances.push_back([spec](const State& y) {
    const double ct = spec.dt() > 0 ? spec.dt() : 1.0;
    const double cx = spec.dx() > 0 ? spec.dx() : 1.0;
    const double cells =
        std::min(std::min(y[0] - spec.t0, spec.t1 - y[0]) / ct,
                 std::min(y[1] - spec.x0, spec.x1 - y[1]) / cx);
    // one grid cell maps onto the default 0.05 stop margin
    return cells * 0.05;
  });
  return sys;
}

// Checks that the cataloged first integral actually commutes with the
// Hamiltonian, that the curvature oracle matches the assembled metric, and
// reports the linear-integral criterion verdict alongside.
inline int cmd_verify(const RunConfig& rc, std::ostream& out,
                      std::ostream& err) {
  const ExampleEntry e = load_entry(rc);
  if (!e.explicit_payload)
    throw RegistryError("verify needs a metric and integral; '" + e.id +
                        "' is implicit-only");
  const ExplicitPayload& pay = *e.explicit_payload;
  const int samples = rc.samples.value_or(1000);
  const double tol = rc.tol.value_or(1e-9);
  Rng rng(rc.seed);

  const BracketResidual residual(pay.integral, hamiltonian(pay.metric));
  int admissible = 0;
  double max_res = 0.0, total = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double px = rng.uniform(pay.box.x0, pay.box.x1);
    const double py = rng.uniform(pay.box.y0, pay.box.y1);
    const double r = residual(px, py);
    if (!std::isfinite(r)) continue;
    ++admissible;
    max_res = std::max(max_res, r);
    total += r;
  }
  const bool bracket_pass = admissible > 0 && max_res <= tol;

  json jcurv;
  bool curvature_pass = true;
  if (pay.curvature) {
    const std::vector<std::string> order{pay.metric.u1, pay.metric.u2};
    const CompiledExpr assembled(gauss_curvature(pay.metric), order);
    const CompiledExpr closed(pay.curvature, order);
    int pts = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double p[2] = {rng.uniform(pay.box.x0, pay.box.x1),
                           rng.uniform(pay.box.y0, pay.box.y1)};
      const double a = assembled.eval(p);
      const double c = closed.eval(p);
      if (!std::isfinite(a) || !std::isfinite(c)) continue;
      ++pts;
      worst = std::max(worst,
                       c != 0.0 ? std::abs(a - c) / std::abs(c)
                                : std::abs(a - c));
    }
    curvature_pass = pts > 0 && worst <= tol;
    jcurv = json{{"points", pts},
                 {"max_relative_error", worst},
                 {"tolerance", tol},
                 {"pass", curvature_pass}};
  }

  json jcrit;
  try {
    std::vector<std::array<double, 2>> pts;
    pts.reserve(200);
    for (int i = 0; i < 200; ++i)
      pts.push_back({rng.uniform(pay.box.x0, pay.box.x1),
                     rng.uniform(pay.box.y0, pay.box.y1)});
    const CriterionReport rep = criterion_determinants(pay.metric, pts);
    jcrit = json{{"verdict", verdict_name(rep.verdict)},
                 {"exceeding_fraction", rep.exceeding_fraction},
                 {"threshold", rep.threshold}};
  } catch (const ExprError& ex) {
    jcrit = json{{"verdict", "inconclusive"}, {"error", ex.what()}};
  }

  const bool pass = bracket_pass && curvature_pass;
  json j;
  j["id"] = e.id;
  j["kind"] = kind_name(e.kind);
  j["degree"] = e.degree;
  j["seed"] = rc.seed;
  j["bracket"] = json{{"samples", samples},
                      {"admissible", admissible},
                      {"max_residual", max_res},
                      {"mean_residual",
                       admissible > 0 ? total / admissible : 0.0},
                      {"tolerance", tol},
                      {"pass", bracket_pass}};
  j["curvature"] = jcurv;
  j["criterion"] = jcrit;
  j["pass"] = pass;

  const auto path = detail::out_file(rc, "verify_" + e.id + ".json");
  write_text_atomic(path, j.dump(2) + "\n");
  out << "verify " << e.id << ": " << (pass ? "pass" : "fail")
      << " (bracket max " << max_res << " over " << admissible
      << " admissible points)\n";
  out << "wrote " << path.string() << "\n";
  if (!bracket_pass) {
    err << "verify " << e.id << ": bracket residual " << max_res
        << " exceeds " << tol << "\n";
    return kExitCheckFailed;
  }
  if (!curvature_pass) {
    err << "verify " << e.id << ": curvature mismatch "
        << jcurv["max_relative_error"].get<double>() << " exceeds " << tol
        << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

// Continues the implicit solution over a patch, writes the fields as CSV,
// and summarizes the finite-difference residual of the quasi-linear system
// at three refinements so second-order convergence is visible in the report.
inline int cmd_solve(const RunConfig& rc, std::ostream& out,
                     std::ostream& err) {
  const ExampleEntry e = load_entry(rc);
  if (!e.implicit_payload)
    throw RegistryError("solve needs an implicit system; '" + e.id +
                        "' has none");
  const ImplicitPayload& pay = *e.implicit_payload;
  const GridSpec spec = rc.has_grid ? rc.grid : pay.grid;
  const double tol = rc.tol.value_or(1e-11);

  const GridSolution g = solve_on_grid(pay.system, spec, pay.anchor_a,
                                       pay.anchor_t, pay.anchor_x, tol);
  const int nodes = spec.nt * spec.nx;
  const int converged = g.count_converged();
  const int jumps = g.count_branch_jumps();
  const bool complete = converged == nodes;

  std::vector<std::string> header{"t", "x"};
  for (int k = 0; k < g.n; ++k) header.push_back("a_" + std::to_string(k));
  header.push_back("converged");
  std::vector<std::vector<std::string>> rows;
  rows.reserve(nodes);
  for (int it = 0; it < spec.nt; ++it) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      std::vector<std::string> row{format_double(spec.t_at(it)),
                                   format_double(spec.x_at(ix))};
      const double* a = g.a_at(it, ix);
      for (int k = 0; k < g.n; ++k) row.push_back(format_double(a[k]));
      row.push_back(g.node_converged(it, ix) ? "1" : "0");
      rows.push_back(std::move(row));
    }
  }
  const auto csv_path = detail::out_file(rc, "grid_" + e.id + ".csv");
  write_text_atomic(csv_path, csv_document(header, rows));

  json jres, jref;
  if (complete) {
    const QuasiLinearSystem sys = build_V(g.n);
    const GridPdeReport base = pde_residual_on_grid(g, sys);
    jres = json{{"max", base.max_residual},
                {"mean", base.mean_residual},
                {"interior_nodes", base.interior_nodes},
                {"dt", base.dt},
                {"dx", base.dx}};
    std::vector<double> residuals{base.max_residual};
    for (int f = 2; f <= 4; f *= 2) {
      GridSpec fine = spec;
      fine.nt = (spec.nt - 1) * f + 1;
      fine.nx = (spec.nx - 1) * f + 1;
      const GridSolution gf = solve_on_grid(pay.system, fine, pay.anchor_a,
                                            pay.anchor_t, pay.anchor_x, tol);
      residuals.push_back(pde_residual_on_grid(gf, sys).max_residual);
    }
    jref = json{{"max_residuals", residuals},
                {"orders",
                 {convergence_order(residuals[0], residuals[1]),
                  convergence_order(residuals[1], residuals[2])}}};
  }

  const bool pass = complete && jumps == 0;
  json j;
  j["id"] = e.id;
  j["newton_tolerance"] = tol;
  j["grid"] = detail::grid_json(spec);
  j["anchor"] = json{{"t", pay.anchor_t}, {"x", pay.anchor_x},
                     {"a", pay.anchor_a}};
  j["nodes"] = nodes;
  j["converged"] = converged;
  j["branch_jumps"] = jumps;
  j["pde_residual"] = jres;
  j["refinement"] = jref;
  j["pass"] = pass;

  const auto sum_path = detail::out_file(rc, "summary_" + e.id + ".json");
  write_text_atomic(sum_path, j.dump(2) + "\n");
  out << "solve " << e.id << ": " << converged << "/" << nodes
      << " nodes converged, " << jumps << " branch jumps\n";
  if (complete)
    out << "pde residual max " << jres["max"].get<double>()
        << ", refinement orders " << jref["orders"][0].get<double>() << ", "
        << jref["orders"][1].get<double>() << "\n";
  out << "wrote " << csv_path.string() << "\n";
  out << "wrote " << sum_path.string() << "\n";
  if (!complete) {
    err << "solve " << e.id << ": " << (nodes - converged)
        << " nodes failed to converge\n";
    return kExitCheckFailed;
  }
  if (jumps > 0) {
    err << "solve " << e.id << ": " << jumps
        << " nodes jumped to another solution branch\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

// Integrates the geodesic flow. Explicit entries run from the closed-form
// metric; implicit entries first continue their patch and then run over the
// bicubic interpolants. Singularity termination is flagged in the summary,
// not treated as a failure.
inline int cmd_geodesic(const RunConfig& rc, std::ostream& out,
                        std::ostream& err) {
  (void)err;
  const ExampleEntry e = load_entry(rc);
  const double tol = rc.tol.value_or(1e-10);

  GeodesicTrajectory traj;
  std::string mode;
  if (e.explicit_payload) {
    const ExplicitPayload& pay = *e.explicit_payload;
    IntegrateOptions opt;
    opt.tol = tol;
    opt.monitors = {pay.integral};
    opt.guards = pay.singular_loci;
    traj = integrate(pay.metric, rc.state, rc.t_end, opt);
    mode = "closed-form";
  } else {
    const ImplicitPayload& pay = *e.implicit_payload;
    const GridSpec spec = rc.has_grid ? rc.grid : pay.grid;
    const GridSolution g = solve_on_grid(pay.system, spec, pay.anchor_a,
                                         pay.anchor_t, pay.anchor_x);
    if (g.count_converged() != spec.nt * spec.nx)
      throw ExprError("geodesic: continuation patch has unconverged nodes");
    FlowIntegrateOptions opt;
    opt.tol = tol;
    traj = integrate_flow(grid_flow_system(g), rc.state, rc.t_end, opt);
    mode = "grid-interpolated";
  }

  std::vector<std::string> header{"t", "u1", "u2", "p1", "p2", "H"};
  for (const std::string& name : traj.integral_names) header.push_back(name);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const PhasePoint& s = traj.states[i];
    std::vector<std::string> row{format_double(traj.times[i])};
    for (double v : {s.u1, s.u2, s.p1, s.p2}) row.push_back(format_double(v));
    row.push_back(format_double(traj.hamiltonian_values[i]));
    for (const auto& seq : traj.integral_values)
      row.push_back(format_double(seq[i]));
    rows.push_back(std::move(row));
  }
  const auto csv_path = detail::out_file(rc, "trajectory_" + e.id + ".csv");
  write_text_atomic(csv_path, csv_document(header, rows));

  const double h0 = traj.hamiltonian_values.front();
  const double hd = traj.hamiltonian_drift();
  json jints = json::array();
  for (std::size_t m = 0; m < traj.integral_names.size(); ++m) {
    const double f0 = traj.integral_values[m].front();
    const double fd = traj.integral_drift(m);
    jints.push_back(json{{"name", traj.integral_names[m]},
                         {"initial", f0},
                         {"drift", fd},
                         {"relative_drift", detail::relative_drift(fd, f0)}});
  }
  json j;
  j["id"] = e.id;
  j["mode"] = mode;
  j["state"] = {rc.state.u1, rc.state.u2, rc.state.p1, rc.state.p2};
  j["t_end"] = rc.t_end;
  j["tolerance"] = tol;
  j["samples"] = traj.times.size();
  j["accepted_steps"] = traj.accepted_steps;
  j["rejected_steps"] = traj.rejected_steps;
  j["early_termination"] = traj.early_termination;
  j["termination_reason"] = traj.termination_reason;
  j["hamiltonian"] = json{{"initial", h0},
                          {"drift", hd},
                          {"relative_drift", detail::relative_drift(hd, h0)}};
  j["integrals"] = jints;

  const auto drift_path = detail::out_file(rc, "drift_" + e.id + ".json");
  write_text_atomic(drift_path, j.dump(2) + "\n");
  out << "geodesic " << e.id << " (" << mode << "): " << traj.times.size()
      << " samples, H drift " << hd;
  if (traj.early_termination)
    out << ", stopped early: " << traj.termination_reason;
  out << "\n";
  out << "wrote " << csv_path.string() << "\n";
  out << "wrote " << drift_path.string() << "\n";
  return kExitOk;
}

// Samples the two obstruction determinants over the entry's box and writes
// the per-point values with the verdict. The verdict is a finding, not a
// check: every outcome exits 0.
inline int cmd_criterion(const RunConfig& rc, std::ostream& out,
                         std::ostream& err) {
  (void)err;
  const ExampleEntry e = load_entry(rc);
  if (!e.explicit_payload)
    throw RegistryError("criterion needs a metric; '" + e.id +
                        "' is implicit-only");
  const ExplicitPayload& pay = *e.explicit_payload;
  const int samples = rc.samples.value_or(200);
  const double threshold = rc.tol.value_or(1e-8);
  Rng rng(rc.seed);

  std::vector<std::array<double, 2>> pts;
  pts.reserve(samples);
  for (int i = 0; i < samples; ++i)
    pts.push_back({rng.uniform(pay.box.x0, pay.box.x1),
                   rng.uniform(pay.box.y0, pay.box.y1)});
  const CriterionReport rep = criterion_determinants(pay.metric, pts,
                                                     threshold);

  json jp = json::array();
  for (const CriterionPoint& p : rep.points)
    jp.push_back(json{{"x", p.x},
                      {"y", p.y},
                      {"det_rl", p.det_rl},
                      {"det_rdelta", p.det_rdelta},
                      {"exceeds", p.exceeds}});
  json j;
  j["id"] = e.id;
  j["seed"] = rc.seed;
  j["samples"] = samples;
  j["admissible"] = rep.points.size();
  j["inadmissible"] = rep.inadmissible;
  j["threshold"] = rep.threshold;
  j["exceeding_fraction"] = rep.exceeding_fraction;
  j["verdict"] = verdict_name(rep.verdict);
  j["points"] = jp;

  const auto path = detail::out_file(rc, "criterion_" + e.id + ".json");
  write_text_atomic(path, j.dump(2) + "\n");
  out << "criterion " << e.id << ": " << verdict_name(rep.verdict) << " ("
      << rep.exceeding_fraction * 100 << "% of " << rep.points.size()
      << " admissible points exceed " << rep.threshold << ")\n";
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

// Argument parsing and dispatch. Parse failures and bad problem descriptions
// exit 2; math-side failures (divergent Newton, inadmissible sampling,
// threshold violations) exit 1.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  RunConfig rc;
  std::vector<std::string> set_pairs;
  std::string grid_text, state_text;

  CLI::App app{"local polynomial integrals of 2-D geodesic flows"};
  app.name("geoflow");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--example", rc.example, "registry id, e.g. ex2-explicit");
    cmd->add_option("--config", rc.config_path,
                    "problem JSON in the schema the registry exports");
    cmd->add_option("--set,--param", set_pairs,
                    "override k=v: family parameter, preset, or constant");
    cmd->add_option("--seed", rc.seed, "sampling seed (default 1729)");
    cmd->add_option("--out", rc.out_dir, "output directory (default .)");
  };

  CLI::App* verify = app.add_subcommand(
      "verify", "check the bracket, the curvature oracle, and the criterion");
  add_common(verify);
  verify->add_option("--samples", rc.samples,
                     "phase-point sample count (default 1000)");
  verify->add_option("--tol", rc.tol,
                     "max relative residual accepted (default 1e-9)");

  CLI::App* solve = app.add_subcommand(
      "solve", "continue an implicit solution over a grid patch");
  add_common(solve);
  solve->add_option("--grid", grid_text,
                    "t0,t1,x0,x1,nt,nx (default: entry patch)");
  solve->add_option("--tol", rc.tol, "Newton tolerance (default 1e-11)");

  CLI::App* geodesic = app.add_subcommand(
      "geodesic", "integrate the geodesic flow and track conservation");
  add_common(geodesic);
  geodesic->add_option("--state", state_text, "initial u1,u2,p1,p2")
      ->required();
  geodesic->add_option("--t-end", rc.t_end, "integration horizon (default 1)");
  geodesic->add_option("--grid", grid_text,
                       "grid-mode patch t0,t1,x0,x1,nt,nx (default: entry "
                       "patch; explicit entries ignore it)");
  geodesic->add_option("--tol", rc.tol,
                       "local error tolerance (default 1e-10)");

  CLI::App* criterion = app.add_subcommand(
      "criterion", "sample the linear-integral obstruction determinants");
  add_common(criterion);
  criterion->add_option("--samples", rc.samples,
                        "sample count (default 200)");
  criterion->add_option("--tol", rc.tol,
                        "determinant threshold (default 1e-8)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    rc.command = app.get_subcommands().front()->get_name();
    for (const std::string& kv : set_pairs) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size())
        throw RegistryError("--set expects k=v, got '" + kv + "'");
      rc.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!grid_text.empty()) {
      rc.grid = detail::parse_grid(grid_text);
      rc.has_grid = true;
    }
    if (!state_text.empty()) {
      const std::vector<double> v =
          detail::parse_numbers("--state", state_text, 4);
      rc.state = PhasePoint{v[0], v[1], v[2], v[3]};
    }
    if (rc.command == "verify") return cmd_verify(rc, out, err);
    if (rc.command == "solve") return cmd_solve(rc, out, err);
    if (rc.command == "geodesic") return cmd_geodesic(rc, out, err);
    return cmd_criterion(rc, out, err);
  } catch (const RegistryError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ExprError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace geoflow::cli
