// Acceptance gate: nine numbered checks over the whole pipeline, each with a
// pinned tolerance. Prints one [PASS]/[FAIL] line per check and exits
// nonzero if any fail. Tolerances here are the contract; do not loosen.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "geoflow/criteria.hpp"
#include "geoflow/expr.hpp"
#include "geoflow/flows.hpp"
#include "geoflow/geodesic.hpp"
#include "geoflow/geometry.hpp"
#include "geoflow/hodograph.hpp"
#include "geoflow/registry.hpp"
#include "geoflow/rng.hpp"

using namespace geoflow;

namespace {

int g_failures = 0;

void report(int num, const std::string& title, bool pass,
            const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << num << ". " << title << ": "
            << detail << "\n";
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<std::array<double, 2>> box_points(const SamplingBox& b, int count,
                                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::array<double, 2>> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i)
    pts.push_back({rng.uniform(b.x0, b.x1), rng.uniform(b.y0, b.y1)});
  return pts;
}

// 1. Catalog pairs commute: max relative bracket residual over 1000 seeded
//    box points <= 1e-9, under 10 s per pair.
void check_bracket() {
  const std::vector<std::pair<std::string, std::map<std::string, std::string>>>
      cases{{"ex2-explicit", {}},
            {"ex7-explicit", {}},
            {"ex9-explicit", {}},
            {"ex0-family", {{"n", "3"}}}};
  double worst = 0.0, slowest = 0.0;
  int admissible_min = 1000;
  for (const auto& [id, overrides] : cases) {
    const ExampleEntry e = get_example(id, overrides);
    const ExplicitPayload& pay = *e.explicit_payload;
    const auto start = std::chrono::steady_clock::now();
    const BracketResidual residual(pay.integral, hamiltonian(pay.metric));
    int admissible = 0;
    for (const auto& p : box_points(pay.box, 1000, 90001)) {
      const double r = residual(p[0], p[1]);
      if (!std::isfinite(r)) continue;
      ++admissible;
      worst = std::max(worst, r);
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    slowest = std::max(slowest, elapsed);
    admissible_min = std::min(admissible_min, admissible);
  }
  const bool pass = worst <= 1e-9 && slowest <= 10.0 && admissible_min == 1000;
  report(1, "catalog integrals commute with their hamiltonians", pass,
         "max relative residual " + fmt(worst) + " (tol 1e-9), slowest pair " +
             fmt(slowest) + " s");
}

// 2. Assembled Gauss curvature matches the closed forms at 100 admissible
//    points per metric, relative error <= 1e-9.
void check_curvature() {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"ex2-explicit", "(y^2 + 2*x + 6) / (9*(y^2 - 2*x)^3)"},
      {"ex7-explicit",
       "25*(25*y^2 - 160*x + 208) / (9*(25*y^2 + 160*x - 16)^3)"},
      {"ex9-explicit", "(y^2 + 2*x + 25) / (100*(y^2 - 2*x - 5)^3)"}};
  double worst = 0.0;
  int points_min = 100;
  for (const auto& [id, closed_text] : cases) {
    const ExampleEntry e = get_example(id);
    const ExplicitPayload& pay = *e.explicit_payload;
    const std::vector<std::string> order{pay.metric.u1, pay.metric.u2};
    const CompiledExpr assembled(gauss_curvature(pay.metric), order);
    const CompiledExpr closed(parse(closed_text), order);
    int pts = 0;
    for (const auto& p : box_points(pay.box, 100, 90002)) {
      const double a = assembled.eval(p.data());
      const double c = closed.eval(p.data());
      if (!std::isfinite(a) || !std::isfinite(c)) continue;
      ++pts;
      worst = std::max(worst, std::abs(a - c) / std::abs(c));
    }
    points_min = std::min(points_min, pts);
  }
  const bool pass = worst <= 1e-9 && points_min == 100;
  report(2, "assembled curvature matches the closed forms", pass,
         "max relative error " + fmt(worst) + " (tol 1e-9)");
}

// 3. The commuting-flow matrices commute with the system matrix at 1000
//    random points for n=3 and n=4, and the n=3 generator choice
//    (0, 1, 3-2a1) reproduces the system matrix itself.
void check_flow_algebra() {
  const QuasiLinearSystem v3 = build_V(3);
  const QuasiLinearSystem v4 = build_V(4);
  const SymmetryFlow w3 =
      build_W(3, {variable("P"), variable("R"), variable("S")});
  const SymmetryFlow w4 = build_W(
      4, {variable("P"), variable("R"), variable("S"), variable("T")});
  Rng rng(90003);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Assignment at{{"P", rng.uniform(-3, 3)}, {"R", rng.uniform(-3, 3)},
                  {"S", rng.uniform(-3, 3)}, {"T", rng.uniform(-3, 3)}};
    for (int k = 0; k < 4; ++k)
      at["a" + std::to_string(k)] = rng.uniform(-2, 2);
    worst = std::max(worst, commutator_residual(v3, w3, at));
    worst = std::max(worst, commutator_residual(v4, w4, at));
  }

  const SymmetryFlow self =
      build_W(3, {constant(0), constant(1), parse("3 - 2*a1")});
  double self_worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    Assignment at;
    for (int k = 0; k < 3; ++k)
      at["a" + std::to_string(k)] = rng.uniform(-2, 2);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        self_worst = std::max(self_worst,
                              std::abs(evaluate(self.W[r][c], at) -
                                       evaluate(v3.V[r][c], at)));
  }
  const bool pass = worst <= 1e-12 && self_worst <= 1e-13;
  report(3, "commuting-flow algebra", pass,
         "max commutator " + fmt(worst) + " (tol 1e-12), self-consistency " +
             fmt(self_worst));
}

// 4. Cataloged generators solve their generator equation systems at 500
//    random points with a_{n-1} >= 0.2 (positive: the generators take
//    log(a_{n-1})), residual <= 1e-10 per equation.
void check_generator_equations() {
  struct Case {
    std::string id;
    int n;
    std::size_t equations;
  };
  const std::vector<Case> cases{{"ex1-implicit", 3, 7},
                                {"ex4-implicit", 3, 7},
                                {"ex5-implicit", 4, 12}};
  double worst = 0.0;
  bool shapes_ok = true;
  int evaluated_min = 500;
  for (const auto& c : cases) {
    const ExampleEntry e = get_example(c.id);
    const auto pts = sample_a_points(c.n, 500, 90004, -2.0, 2.0, 0.2,
                                     /*last_positive=*/true);
    const PdeResidualReport rep = symmetry_pde_residual(
        c.n, e.implicit_payload->hydrated_generators(), pts);
    shapes_ok = shapes_ok && rep.max_residual.size() == c.equations;
    worst = std::max(worst, rep.worst());
    evaluated_min = std::min(evaluated_min, rep.evaluated);
  }
  const bool pass = worst <= 1e-10 && shapes_ok && evaluated_min == 500;
  report(4, "generators solve their equation systems", pass,
         "max residual " + fmt(worst) + " (tol 1e-10)");
}

// 5. Continuation from the pinned anchors converges on each patch, and the
//    central-difference residual of the quasi-linear system drops with
//    order >= 1.9 across grids h, h/2, h/4.
void check_continuation() {
  struct Case {
    std::string id;
    GridSpec grid;
  };
  const std::vector<Case> cases{
      {"ex1-implicit", GridSpec{-0.1, 0.1, -1.9, -1.7, 41, 41}},
      {"ex6-implicit", GridSpec{-0.05, 0.0, -3.80, -3.75, 61, 61}},
      {"ex8-implicit", GridSpec{-0.05, 0.05, -25.75, -25.55, 11, 11}}};

  // anchor values are part of the contract
  const ExampleEntry e1 = get_example("ex1-implicit");
  const ExampleEntry e6 = get_example("ex6-implicit");
  const ExampleEntry e8 = get_example("ex8-implicit");
  const std::vector<double>& a8 = e8.implicit_payload->anchor_a;
  const auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  bool anchors_ok =
      e1.implicit_payload->anchor_t == 0.0 &&
      e1.implicit_payload->anchor_x == -1.5 &&
      e1.implicit_payload->anchor_a == std::vector<double>{-0.5, 0.0, 1.0} &&
      e6.implicit_payload->anchor_a.back() == 1.0 &&
      a8.size() == 5 && a8[4] == 1.0 && near(a8[3], 15.0 / 14.0) &&
      near(a8[0], 3.0 * a8[4] / 8.0) && near(a8[2], -3.0 * a8[4]) &&
      near(a8[1], -(6.0 * a8[3] + 15.0) / 8.0);

  double min_order = 1e9;
  bool converged_ok = true;
  for (const auto& c : cases) {
    const ExampleEntry e = get_example(c.id);
    const ImplicitPayload& pay = *e.implicit_payload;
    const QuasiLinearSystem sys =
        build_V(static_cast<int>(pay.system.unknowns.size()));
    std::vector<double> residuals;
    for (int f = 1; f <= 4; f *= 2) {
      GridSpec spec = c.grid;
      spec.nt = (c.grid.nt - 1) * f + 1;
      spec.nx = (c.grid.nx - 1) * f + 1;
      const GridSolution g = solve_on_grid(pay.system, spec, pay.anchor_a,
                                           pay.anchor_t, pay.anchor_x);
      converged_ok =
          converged_ok && g.count_converged() == spec.nt * spec.nx;
      residuals.push_back(pde_residual_on_grid(g, sys).max_residual);
    }
    min_order = std::min(min_order,
                         convergence_order(residuals[0], residuals[1]));
    min_order = std::min(min_order,
                         convergence_order(residuals[1], residuals[2]));
  }
  const bool pass = anchors_ok && converged_ok && min_order >= 1.9;
  report(5, "continuation grids converge at second order", pass,
         "min refinement order " + fmt(min_order) + " (need >= 1.9)" +
             (anchors_ok ? "" : ", anchor values off") +
             (converged_ok ? "" : ", unconverged nodes"));
}

// 6. Quadratic case: the closed-form solution family solves the diagonal
//    system (finite-difference residual <= 1e-8), and the potential built
//    from arbitrary polynomials solves its second-order equation to 1e-12
//    with exact derivatives.
void check_quadratic_case() {
  const Expr cube = parse("s^3");
  Rng rng(90006);
  double diag_worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r1 = rng.uniform(-2.0, -0.5);
    const double r2 = rng.uniform(0.5, 2.0);
    diag_worst = std::max(diag_worst, n2_diag_fd_residual(cube, cube, r1, r2));
  }

  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-2, 2);
    double b = rng.uniform(-2, 2);
    if (std::abs(a - b) < 0.05) b += 0.25;
    pts.emplace_back(a, b);
  }
  const EpdReport rep =
      epd_check(parse("s^4 - 2*s^2 + s"), parse("3*s^3 + s^2"), pts);
  const double epd_worst = std::max(
      {rep.epd_residual, rep.symm_residual, rep.cross_residual});
  const bool pass = diag_worst <= 1e-8 && epd_worst <= 1e-12 &&
                    rep.evaluated == 100;
  report(6, "quadratic-case closed form", pass,
         "diagonal-system residual " + fmt(diag_worst) +
             " (tol 1e-8), potential residual " + fmt(epd_worst) +
             " (tol 1e-12)");
}

// 7. Geodesic conservation: tol 1e-10 over t in [0,1] keeps the relative
//    drift of H and F under 1e-8, and reversing momenta retraces the
//    trajectory to 1e-6.
void check_conservation() {
  struct Case {
    std::string id;
    PhasePoint s0;
  };
  const std::vector<Case> cases{{"ex2-explicit", {1.0, 1.0, 0.7, -0.3}},
                                {"ex9-explicit", {0.0, 0.0, 1.0, 0.5}}};
  double drift_worst = 0.0, closure_worst = 0.0;
  for (const auto& c : cases) {
    const ExampleEntry e = get_example(c.id);
    const ExplicitPayload& pay = *e.explicit_payload;
    IntegrateOptions opt;
    opt.tol = 1e-10;
    opt.monitors = {pay.integral};
    opt.guards = pay.singular_loci;
    const GeodesicTrajectory traj = integrate(pay.metric, c.s0, 1.0, opt);
    const double h0 = traj.hamiltonian_values.front();
    const double f0 = traj.integral_values[0].front();
    drift_worst = std::max(
        drift_worst, traj.hamiltonian_drift() / std::max(1.0, std::abs(h0)));
    drift_worst = std::max(
        drift_worst, traj.integral_drift(0) / std::max(1.0, std::abs(f0)));

    const PhasePoint end = traj.states.back();
    const GeodesicTrajectory back = integrate(
        pay.metric, {end.u1, end.u2, -end.p1, -end.p2}, 1.0, opt);
    const PhasePoint ret = back.states.back();
    closure_worst = std::max(
        closure_worst,
        std::max({std::abs(ret.u1 - c.s0.u1), std::abs(ret.u2 - c.s0.u2),
                  std::abs(ret.p1 + c.s0.p1), std::abs(ret.p2 + c.s0.p2)}));
  }
  const bool pass = drift_worst <= 1e-8 && closure_worst <= 1e-6;
  report(7, "conservation along geodesics", pass,
         "max relative drift " + fmt(drift_worst) +
             " (tol 1e-8), reversal closure " + fmt(closure_worst) +
             " (tol 1e-6)");
}

// 8. Linear-integral criterion: a conformal f(x) metric keeps both
//    determinants under 1e-12 everywhere (consistent verdict); the two
//    cataloged obstructed metrics exceed the threshold on >= 90% of 200
//    admissible samples.
void check_criterion() {
  Metric2D conformal;
  conformal.g11 = parse("2 + x^2");
  conformal.g12 = constant(0.0);
  conformal.g22 = parse("2 + x^2");
  const SamplingBox cbox{-0.5, 0.5, -0.5, 0.5, ""};
  const CriterionReport crep = criterion_determinants(
      conformal, box_points(cbox, 200, 90007));
  double cdet = 0.0;
  for (const CriterionPoint& p : crep.points)
    cdet = std::max({cdet, std::abs(p.det_rl), std::abs(p.det_rdelta)});
  const bool conformal_ok =
      cdet <= 1e-12 &&
      crep.verdict == CriterionVerdict::ConsistentWithLinearIntegral;

  bool obstructed_ok = true;
  double fraction_min = 1.0;
  for (const std::string& id : {"ex2-explicit", "ex9-explicit"}) {
    const ExampleEntry e = get_example(id);
    const CriterionReport rep = criterion_determinants(
        e.explicit_payload->metric,
        box_points(e.explicit_payload->box, 200, 90008));
    obstructed_ok =
        obstructed_ok && rep.verdict == CriterionVerdict::Obstructed;
    fraction_min = std::min(fraction_min, rep.exceeding_fraction);
  }
  const bool pass = conformal_ok && obstructed_ok && fraction_min >= 0.9;
  report(8, "linear-integral criterion", pass,
         "conformal max determinant " + fmt(cdet) +
             " (tol 1e-12), obstructed fraction >= " + fmt(fraction_min));
}

// 9. Structure properties: bracket antisymmetry and the degree law,
//    the semi-Hamiltonian identity for v_i = sum of the other invariants,
//    and weak nonlinearity of the quadratic-case velocities.
void check_properties() {
  const ExampleEntry e = get_example("ex2-explicit");
  const MomentumPoly h = hamiltonian(e.explicit_payload->metric);
  const MomentumPoly f = e.explicit_payload->integral;
  const MomentumPoly fh = poisson_bracket(f, h);
  const MomentumPoly hf = poisson_bracket(h, f);
  const bool degree_ok = fh.degree() == f.degree() + h.degree() - 1;

  double anti_worst = 0.0;
  for (const auto& p : box_points(e.explicit_payload->box, 100, 90009)) {
    const Assignment at{{"x", p[0]}, {"y", p[1]}};
    for (int k = 0; k <= fh.degree(); ++k) {
      const double a = evaluate(fh.coeff[k], at);
      const double b = evaluate(hf.coeff[k], at);
      anti_worst = std::max(anti_worst,
                            std::abs(a + b) / (1.0 + std::abs(a) +
                                               std::abs(b)));
    }
  }

  const DiagonalSystem d = make_diagonal_system(
      {parse("r2 + r3"), parse("r1 + r3"), parse("r1 + r2")});
  Rng rng(90010);
  double semi_worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Assignment at{{"r1", rng.uniform(-2, -1)},
                        {"r2", rng.uniform(-0.5, 0.5)},
                        {"r3", rng.uniform(1, 2)}};
    semi_worst = std::max(semi_worst, semi_hamiltonian_residual(d, at));
  }

  const bool weak_ok = weak_nonlinearity_check_n2();
  const bool pass = degree_ok && anti_worst <= 1e-12 &&
                    semi_worst <= 1e-12 && weak_ok;
  report(9, "structure properties", pass,
         "antisymmetry " + fmt(anti_worst) + ", semi-hamiltonian " +
             fmt(semi_worst) + " (tol 1e-12), degree law " +
             (degree_ok ? "holds" : "broken") + ", weak nonlinearity " +
             (weak_ok ? "holds" : "broken"));
}

void run(int num, const std::string& title, void (*fn)()) {
  try {
    fn();
  } catch (const std::exception& ex) {
    report(num, title, false, std::string("exception: ") + ex.what());
  }
}

}  // namespace

int main() {
  run(1, "catalog integrals commute with their hamiltonians", check_bracket);
  run(2, "assembled curvature matches the closed forms", check_curvature);
  run(3, "commuting-flow algebra", check_flow_algebra);
  run(4, "generators solve their equation systems", check_generator_equations);
  run(5, "continuation grids converge at second order", check_continuation);
  run(6, "quadratic-case closed form", check_quadratic_case);
  run(7, "conservation along geodesics", check_conservation);
  run(8, "linear-integral criterion", check_criterion);
  run(9, "structure properties", check_properties);
  if (g_failures == 0) {
    std::cout << "all 9 acceptance checks passed\n";
    return 0;
  }
  std::cout << g_failures << " acceptance check(s) failed\n";
  return 1;
}
