#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "geoflow/geodesic.hpp"
#include "geoflow/registry.hpp"

using namespace geoflow;

namespace {

Metric2D flat_metric() {
  Metric2D m;
  m.g11 = parse("1");
  m.g12 = parse("0");
  m.g22 = parse("1");
  return m;
}

// Numeric value of a momentum polynomial at a phase point.
double poly_value(const MomentumPoly& f, const PhasePoint& s) {
  const int n = f.degree();
  Assignment at{{f.u1, s.u1}, {f.u2, s.u2}};
  double acc = 0.0;
  for (int k = 0; k <= n; ++k)
    acc += evaluate(f.coeff[k], at) * std::pow(s.p1, n - k) * std::pow(s.p2, k);
  return acc;
}

PhasePoint last_state(const GeodesicTrajectory& traj) {
  return traj.states.back();
}

}  // namespace

TEST_CASE("equations of motion match the flat-space flow", "[geodesic]") {
  Metric2D m = flat_metric();
  auto v = hamiltonian_rhs(m, PhasePoint{0.0, 0.0, 1.0, 0.0});
  CHECK(v[0] == Catch::Approx(1.0));
  CHECK(v[1] == Catch::Approx(0.0).margin(1e-15));
  CHECK(v[2] == Catch::Approx(0.0).margin(1e-15));
  CHECK(v[3] == Catch::Approx(0.0).margin(1e-15));

  auto w = hamiltonian_rhs(m, PhasePoint{0.3, 0.7, 0.2, -0.4});
  CHECK(w[0] == Catch::Approx(0.2));
  CHECK(w[1] == Catch::Approx(-0.4));
  CHECK(w[2] == Catch::Approx(0.0).margin(1e-15));
  CHECK(w[3] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("constant-profile strip metric freezes both momenta", "[geodesic]") {
  // ds^2 = 4 dt^2 + dx^2: coordinates never enter H, so the momenta are flat.
  Metric2D m;
  m.g11 = parse("4");
  m.g12 = parse("0");
  m.g22 = parse("1");
  m.u1 = "t";
  m.u2 = "x";
  auto v = hamiltonian_rhs(m, PhasePoint{0.3, -0.2, 0.8, 0.5});
  CHECK(v[0] == Catch::Approx(0.2));
  CHECK(v[1] == Catch::Approx(0.5));
  CHECK(v[2] == Catch::Approx(0.0).margin(1e-15));
  CHECK(v[3] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("equations of motion agree with finite differences of the energy",
          "[geodesic]") {
  ExampleEntry e = get_example("ex2-explicit");
  const Metric2D& m = e.explicit_payload->metric;
  const MomentumPoly h = hamiltonian(m);
  const PhasePoint s{1.0, 1.0, 0.7, -0.3};

  auto v = hamiltonian_rhs(m, s);
  const double d = 1e-6;
  auto shift = [&](int c, double eps) {
    PhasePoint q = s;
    (c == 0 ? q.u1 : c == 1 ? q.u2 : c == 2 ? q.p1 : q.p2) += eps;
    return poly_value(h, q);
  };
  auto fd = [&](int c) { return (shift(c, d) - shift(c, -d)) / (2.0 * d); };
  CHECK(std::abs(v[0] - fd(2)) < 1e-6);
  CHECK(std::abs(v[1] - fd(3)) < 1e-6);
  CHECK(std::abs(v[2] + fd(0)) < 1e-6);
  CHECK(std::abs(v[3] + fd(1)) < 1e-6);
}

TEST_CASE("degenerate metric at the sample point is reported", "[geodesic]") {
  Metric2D m;
  m.g11 = parse("x");
  m.g12 = parse("0");
  m.g22 = parse("1");
  CHECK_THROWS_WITH(hamiltonian_rhs(m, PhasePoint{0.0, 0.5, 1.0, 0.0}),
                    Catch::Matchers::ContainsSubstring("singular"));
}

TEST_CASE("flat trajectories stay straight to machine precision",
          "[geodesic]") {
  Metric2D m = flat_metric();
  const PhasePoint s0{0.1, -0.2, 0.6, 0.3};
  GeodesicTrajectory traj = integrate(m, s0, 2.0, {});

  REQUIRE(traj.times.size() >= 100);
  REQUIRE(traj.states.size() == traj.times.size());
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == Catch::Approx(2.0));
  CHECK_FALSE(traj.early_termination);
  for (std::size_t i = 1; i < traj.times.size(); ++i)
    REQUIRE(traj.times[i] > traj.times[i - 1]);

  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    CHECK(std::abs(traj.states[i].u1 - (0.1 + 0.6 * t)) < 1e-12);
    CHECK(std::abs(traj.states[i].u2 - (-0.2 + 0.3 * t)) < 1e-12);
    CHECK(std::abs(traj.states[i].p1 - 0.6) < 1e-14);
    CHECK(std::abs(traj.states[i].p2 - 0.3) < 1e-14);
  }
  CHECK(traj.hamiltonian_drift() < 1e-13);
}

TEST_CASE("cubic-integral flow conserves energy and the cubic", "[geodesic]") {
  ExampleEntry e = get_example("ex2-explicit");
  IntegrateOptions opt;
  opt.tol = 1e-10;
  opt.monitors = {e.explicit_payload->integral};
  GeodesicTrajectory traj =
      integrate(e.explicit_payload->metric, PhasePoint{1.0, 1.0, 0.7, -0.3},
                1.0, opt);

  REQUIRE(traj.integral_names == std::vector<std::string>{"F1"});
  REQUIRE(traj.integral_values.size() == 1);
  REQUIRE(traj.integral_values[0].size() == traj.times.size());
  CHECK_FALSE(traj.early_termination);

  const double h0 = std::abs(traj.hamiltonian_values.front());
  const double f0 = std::abs(traj.integral_values[0].front());
  REQUIRE(h0 > 0.0);
  REQUIRE(f0 > 0.0);
  CHECK(traj.hamiltonian_drift() / h0 < 1e-8);
  CHECK(traj.integral_drift(0) / f0 < 1e-8);
}

TEST_CASE("quintic-integral flow conserves energy and the quintic",
          "[geodesic]") {
  ExampleEntry e = get_example("ex9-explicit");
  IntegrateOptions opt;
  opt.tol = 1e-10;
  opt.monitors = {e.explicit_payload->integral};
  opt.monitor_names = {"F5"};
  GeodesicTrajectory traj = integrate(
      e.explicit_payload->metric, PhasePoint{0.0, 0.0, 1.0, 0.5}, 1.0, opt);

  REQUIRE(traj.integral_names == std::vector<std::string>{"F5"});
  CHECK_FALSE(traj.early_termination);
  const double h0 = std::abs(traj.hamiltonian_values.front());
  const double f0 = std::abs(traj.integral_values[0].front());
  REQUIRE(h0 > 0.0);
  REQUIRE(f0 > 0.0);
  CHECK(traj.hamiltonian_drift() / h0 < 1e-8);
  CHECK(traj.integral_drift(0) / f0 < 1e-8);
}

TEST_CASE("zero-length runs return the initial sample", "[geodesic]") {
  ExampleEntry e = get_example("ex2-explicit");
  GeodesicTrajectory traj = integrate(e.explicit_payload->metric,
                                      PhasePoint{1.0, 1.0, 0.7, -0.3}, 0.0, {});
  REQUIRE(traj.times.size() == 1);
  CHECK(traj.times[0] == 0.0);
  CHECK(traj.hamiltonian_drift() == 0.0);
}

TEST_CASE("tightening the tolerance does not worsen conservation",
          "[geodesic]") {
  ExampleEntry e = get_example("ex2-explicit");
  const PhasePoint s0{1.0, 1.0, 0.7, -0.3};
  auto drift_at = [&](double tol) {
    IntegrateOptions opt;
    opt.tol = tol;
    GeodesicTrajectory traj =
        integrate(e.explicit_payload->metric, s0, 1.0, opt);
    return traj.hamiltonian_drift();
  };
  const double coarse = drift_at(1e-6);
  const double fine = drift_at(5e-7);
  CHECK(fine <= 2.0 * coarse + 1e-14);
}

TEST_CASE("a symbolically conserved integral drifts below the budget",
          "[geodesic]") {
  const double tol = 1e-9;

  SECTION("separable-sum metric with its quadratic integral") {
    ExampleEntry e = get_example("liouville-n2");
    IntegrateOptions opt;
    opt.tol = tol;
    opt.monitors = {e.explicit_payload->integral};
    GeodesicTrajectory traj = integrate(
        e.explicit_payload->metric, PhasePoint{0.2, -0.3, 0.7, 0.4}, 1.0, opt);
    const double f0 = std::abs(traj.integral_values[0].front());
    REQUIRE(f0 > 0.0);
    CHECK(traj.integral_drift(0) / f0 < 100.0 * tol);
  }

  SECTION("profile metric conserves the momentum along the symmetry") {
    Metric2D m;
    m.g11 = parse("2 + x^2");
    m.g12 = parse("0");
    m.g22 = parse("2 + x^2");
    MomentumPoly p2;
    p2.coeff = {parse("0"), parse("1")};
    IntegrateOptions opt;
    opt.tol = tol;
    opt.monitors = {p2};
    GeodesicTrajectory traj =
        integrate(m, PhasePoint{0.5, 0.0, 0.3, 0.8}, 1.0, opt);
    const double f0 = std::abs(traj.integral_values[0].front());
    REQUIRE(f0 > 0.0);
    CHECK(traj.integral_drift(0) / f0 < 100.0 * tol);
  }
}

TEST_CASE("time reversal returns to the start", "[geodesic]") {
  ExampleEntry e = get_example("ex2-explicit");
  const PhasePoint s0{1.0, 1.0, 0.7, -0.3};
  IntegrateOptions opt;
  opt.tol = 1e-10;
  GeodesicTrajectory fwd = integrate(e.explicit_payload->metric, s0, 1.0, opt);
  PhasePoint turn = last_state(fwd);
  turn.p1 = -turn.p1;
  turn.p2 = -turn.p2;
  GeodesicTrajectory back =
      integrate(e.explicit_payload->metric, turn, 1.0, opt);
  PhasePoint end = last_state(back);
  CHECK(std::abs(end.u1 - s0.u1) < 1e-6);
  CHECK(std::abs(end.u2 - s0.u2) < 1e-6);
  CHECK(std::abs(end.p1 + s0.p1) < 1e-6);
  CHECK(std::abs(end.p2 + s0.p2) < 1e-6);
}

TEST_CASE("the singularity guard halts before the locus", "[geodesic]") {
  Metric2D m = flat_metric();
  IntegrateOptions opt;
  opt.guards = {parse("x - 1")};

  SECTION("mid-flight trip keeps the partial trajectory") {
    GeodesicTrajectory traj =
        integrate(m, PhasePoint{0.0, 0.0, 1.0, 0.0}, 2.0, opt);
    CHECK(traj.early_termination);
    CHECK(traj.termination_reason == "singularity guard tripped");
    REQUIRE(traj.times.size() >= 2);
    CHECK(traj.times.back() < 2.0);
    const double x_end = traj.states.back().u1;
    CHECK(x_end > 0.9);
    CHECK(x_end < 1.0);
  }

  SECTION("a start already inside the margin stops immediately") {
    GeodesicTrajectory traj =
        integrate(m, PhasePoint{0.97, 0.0, 1.0, 0.0}, 2.0, opt);
    CHECK(traj.early_termination);
    CHECK(traj.termination_reason ==
          "singularity guard tripped at the start");
    CHECK(traj.times.size() == 1);
  }
}

TEST_CASE("sample density honors the request", "[geodesic]") {
  Metric2D m = flat_metric();
  IntegrateOptions opt;
  opt.min_samples = 7;
  GeodesicTrajectory traj =
      integrate(m, PhasePoint{0.0, 0.0, 0.5, 0.1}, 1.4, opt);
  REQUIRE(traj.times.size() == 7);
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    CHECK(traj.times[i] == Catch::Approx(1.4 * i / 6.0));
}

TEST_CASE("bad integration requests are rejected", "[geodesic]") {
  Metric2D m = flat_metric();
  CHECK_THROWS(integrate(m, PhasePoint{0, 0, 1, 0}, -1.0, {}));
  IntegrateOptions opt;
  opt.tol = 0.0;
  CHECK_THROWS(integrate(m, PhasePoint{0, 0, 1, 0}, 1.0, opt));
}
