#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "geoflow/hodograph.hpp"
#include "geoflow/rng.hpp"

using namespace geoflow;

namespace {

// Cubic-integral family from a linear generator seed: three relations in
// (a0,a1,a2) with one free constant k. Anchor: (t,x)=(0,-1.5) carries the
// exact solution (-1/2, 0, 1) at k=1.
ImplicitSystem cubic_family_system(double k = 1.0) {
  ImplicitSystem sys;
  sys.equations = {
      parse("2*a0 + a2"),
      parse("k*(a1 + 3*log(a2)) - t"),
      parse("2*x + k*(2*a1^2 + 3*a2^2)"),
  };
  sys.unknowns = {"a0", "a1", "a2"};
  sys.constants = {{"k", k}};
  return sys;
}

}  // namespace

TEST_CASE("hydration substitutes constants", "[hodograph]") {
  ImplicitSystem sys = cubic_family_system(2.0);
  std::vector<Expr> eqs = sys.hydrated();
  // second equation at the anchor fields with k=2: 2*(0 + 0) - t = -t
  Assignment at{{"a0", -0.5}, {"a1", 0.0}, {"a2", 1.0}, {"t", 3.0}, {"x", 0.0}};
  CHECK(evaluate(eqs[1], at) == Catch::Approx(-3.0));
}

TEST_CASE("newton reaches the anchor solution", "[hodograph]") {
  ImplicitSystem sys = cubic_family_system();
  std::vector<double> a = newton_solve(sys, 0.0, -1.5, {-0.4, 0.1, 0.9});
  REQUIRE(a.size() == 3);
  CHECK(a[0] == Catch::Approx(-0.5).margin(1e-10));
  CHECK(a[1] == Catch::Approx(0.0).margin(1e-10));
  CHECK(a[2] == Catch::Approx(1.0).margin(1e-10));

  NewtonSolver solver(sys);
  CHECK(solver.residual_at(0.0, -1.5, {-0.5, 0.0, 1.0}) <= 1e-11);
}

TEST_CASE("newton reports domain violations", "[hodograph]") {
  ImplicitSystem sys = cubic_family_system();
  NewtonSolver solver(sys);
  NewtonSolver::Result r = solver.solve(0.0, -1.5, {-0.4, 0.1, -1.0});
  CHECK_FALSE(r.converged);
  CHECK(r.failure.find("domain") != std::string::npos);
  CHECK_THROWS_AS(newton_solve(sys, 0.0, -1.5, {-0.4, 0.1, -1.0}), ExprError);
}

TEST_CASE("newton reports singular jacobians", "[hodograph]") {
  ImplicitSystem sys;
  sys.equations = {parse("a0*a1 - 1"), parse("2*a0*a1 - t")};
  sys.unknowns = {"a0", "a1"};
  NewtonSolver solver(sys);
  NewtonSolver::Result r = solver.solve(1.0, 0.0, {1.0, 0.5});
  CHECK_FALSE(r.converged);
  CHECK(r.failure.find("singular") != std::string::npos);
}

TEST_CASE("newton reports stalled line searches", "[hodograph]") {
  // no real solution: a0^2 + 1 = 0; the step keeps failing to descend
  ImplicitSystem sys;
  sys.equations = {parse("a0^2 + 1 + 0*t + 0*x")};
  sys.unknowns = {"a0"};
  NewtonSolver solver(sys);
  NewtonSolver::Result r = solver.solve(0.0, 0.0, {0.5});
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.failure.empty());
}

TEST_CASE("grid continuation covers a regular patch", "[hodograph]") {
  ImplicitSystem sys = cubic_family_system();
  GridSpec spec{-0.1, 0.1, -1.7, -1.5, 21, 21};
  GridSolution g = solve_on_grid(sys, spec, {-0.5, 0.0, 1.0}, 0.0, -1.5);
  CHECK(g.count_converged() == 21 * 21);
  CHECK(g.count_branch_jumps() == 0);
  NewtonSolver solver(sys);
  for (int it = 0; it < spec.nt; ++it)
    for (int ix = 0; ix < spec.nx; ++ix) {
      const double* a = g.a_at(it, ix);
      REQUIRE(a[2] > 0.0);  // a2 = g stays on the positive branch
      REQUIRE(solver.residual_at(spec.t_at(it), spec.x_at(ix),
                                 {a[0], a[1], a[2]}) <= 1e-11);
    }
}

TEST_CASE("single-node grid reduces to a point solve", "[hodograph]") {
  ImplicitSystem sys = cubic_family_system();
  GridSpec spec{0.0, 0.0, -1.5, -1.5, 1, 1};
  GridSolution g = solve_on_grid(sys, spec, {-0.4, 0.1, 0.9}, 0.0, -1.5);
  CHECK(g.count_converged() == 1);
  CHECK(g.a_at(0, 0)[0] == Catch::Approx(-0.5).margin(1e-10));
}

TEST_CASE("grid crossing the solvability boundary is flagged not fatal",
          "[hodograph]") {
  // eliminating a1 = t - 3*log(a2) leaves 2x = -(2 a1^2 + 3 a2^2), whose
  // right side is bounded above by about -2.62 near t = 0: columns with
  // x > -1.31 sit past the fold, have no real solution, and must come
  // back unconverged rather than abort the sweep
  ImplicitSystem sys = cubic_family_system();
  GridSpec spec{-0.05, 0.05, -1.5, -1.2, 5, 7};
  GridSolution g = solve_on_grid(sys, spec, {-0.5, 0.0, 1.0}, 0.0, -1.5);
  int total = spec.nt * spec.nx;
  CHECK(g.count_converged() < total);
  CHECK(g.count_converged() > 0);
  CHECK_THROWS_AS(pde_residual_on_grid(g, build_V(3)), ExprError);
}

TEST_CASE("fast-moving fields trip the branch-jump heuristic", "[hodograph]") {
  ImplicitSystem sys;
  sys.equations = {parse("a0 - 10*x^3 + 0*t")};
  sys.unknowns = {"a0"};
  GridSpec spec{0.0, 0.0, 0.5, 1.5, 1, 6};
  GridSolution g = solve_on_grid(sys, spec, {1.25}, 0.0, 0.5);
  CHECK(g.count_converged() == 6);
  CHECK(g.count_branch_jumps() >= 1);
}

TEST_CASE("constant fields have zero pde residual", "[hodograph]") {
  GridSolution g;
  g.spec = GridSpec{0.0, 1.0, 0.0, 1.0, 5, 5};
  g.n = 3;
  g.values.assign(5 * 5 * 3, 0.0);
  for (int node = 0; node < 25; ++node) {
    g.values[node * 3 + 0] = 0.3;
    g.values[node * 3 + 1] = 0.4;
    g.values[node * 3 + 2] = 1.2;
  }
  g.converged.assign(25, 1);
  g.branch_jump.assign(25, 0);
  GridPdeReport rep = pde_residual_on_grid(g, build_V(3));
  CHECK(rep.max_residual == 0.0);
  CHECK(rep.interior_nodes == 9);
}

TEST_CASE("grid fields satisfy the quasi-linear system at second order",
          "[hodograph]") {
  ImplicitSystem sys = cubic_family_system();
  QuasiLinearSystem v3 = build_V(3);
  auto residual_at = [&](int nodes) {
    GridSpec spec{-0.1, 0.1, -1.9, -1.7, nodes, nodes};
    GridSolution g = solve_on_grid(sys, spec, {-0.5, 0.0, 1.0}, 0.0, -1.5);
    REQUIRE(g.count_converged() == nodes * nodes);
    return pde_residual_on_grid(g, v3).max_residual;
  };
  double rh = residual_at(41);
  double rh2 = residual_at(81);
  double ratio = rh / rh2;
  CAPTURE(rh, rh2);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
  CHECK(convergence_order(rh, rh2) >= 1.9);
}

TEST_CASE("closed-form quadratic-case sample", "[hodograph]") {
  Expr cube = parse("s^3");
  N2Sample s = n2_general_solution_sample(cube, cube, -1.0, 1.0);
  CHECK(s.t == Catch::Approx(0.0).margin(1e-14));
  CHECK(s.x == Catch::Approx(-6.0));
  CHECK(s.a0 == Catch::Approx(1.0));
  CHECK(s.g == Catch::Approx(2.0));
  CHECK_FALSE(s.degenerate);

  N2Sample zero = n2_general_solution_sample(constant(0), constant(0), -1, 1);
  CHECK(zero.t == 0.0);
  CHECK(zero.x == 0.0);
  CHECK(zero.degenerate);

  CHECK_THROWS_AS(n2_general_solution_sample(cube, cube, 1.0, 2.0), ExprError);
}

TEST_CASE("quadratic-case map solves the diagonal system", "[hodograph]") {
  Expr cube = parse("s^3");
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    double r1 = rng.uniform(-2.0, -0.5);
    double r2 = rng.uniform(0.5, 2.0);
    REQUIRE(n2_diag_fd_residual(cube, cube, r1, r2) <= 1e-8);
  }
  // a mixed pair of generating functions stays on the solution family
  Expr quartic = parse("s^4 - s^2");
  for (int trial = 0; trial < 50; ++trial) {
    double r1 = rng.uniform(-2.0, -0.5);
    double r2 = rng.uniform(0.5, 2.0);
    REQUIRE(n2_diag_fd_residual(cube, quartic, r1, r2) <= 1e-8);
  }
  CHECK_THROWS_AS(n2_diag_fd_residual(constant(0), constant(0), -1, 1),
                  ExprError);
}

TEST_CASE("potential solves the euler-poisson-darboux equation", "[hodograph]") {
  Rng rng(52);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 50; ++i) {
    double a = rng.uniform(-2, 2);
    double b = rng.uniform_away_from_zero(-2, 2, 0.01);
    if (std::abs(a - b) < 0.05) b += 0.25;
    pts.emplace_back(a, b);
  }
  EpdReport rep = epd_check(parse("s^3"), parse("s^2"), pts);
  CHECK(rep.evaluated == 50);
  CHECK(rep.epd_residual <= 1e-12);
  CHECK(rep.symm_residual <= 1e-12);
  CHECK(rep.cross_residual <= 1e-12);

  EpdReport trivial = epd_check(constant(0), constant(0), {{0.3, 0.9}});
  CHECK(trivial.epd_residual == 0.0);

  EpdReport skip = epd_check(parse("s^3"), parse("s^2"), {{0.5, 0.5}, {0, 1}});
  CHECK(skip.skipped == 1);
  CHECK(skip.evaluated == 1);
}

TEST_CASE("grid fields close the bracket after reassembly", "[hodograph]") {
  ImplicitSystem sys = cubic_family_system();
  // second-order slope error: 161 nodes per axis puts the bracket residual
  // comfortably under the 1e-6 budget
  GridSpec spec{-0.1, 0.1, -1.9, -1.7, 161, 161};
  GridSolution g = solve_on_grid(sys, spec, {-0.5, 0.0, 1.0}, 0.0, -1.5);
  REQUIRE(g.count_converged() == 161 * 161);

  BracketClosureReport rep = bracket_closure_residual(g);
  CHECK(rep.interior_nodes == 159 * 159);
  CAPTURE(rep.max_residual, rep.mean_residual);
  CHECK(rep.max_residual < 1e-6);
}

TEST_CASE("constant fields close the bracket exactly", "[hodograph]") {
  GridSolution g;
  g.spec = GridSpec{0.0, 1.0, 0.0, 1.0, 5, 5};
  g.n = 3;
  g.values.assign(5 * 5 * 3, 0.0);
  for (int node = 0; node < 25; ++node) {
    g.values[node * 3 + 0] = 0.3;
    g.values[node * 3 + 1] = 0.4;
    g.values[node * 3 + 2] = 1.2;
  }
  g.converged.assign(25, 1);
  g.branch_jump.assign(25, 0);
  BracketClosureReport rep = bracket_closure_residual(g);
  CHECK(rep.max_residual < 1e-14);
  CHECK(rep.interior_nodes == 9);
}
