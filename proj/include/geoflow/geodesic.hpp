#pragma once

// Hamiltonian integration of geodesic flows with conservation monitoring.
// The integrator is a deliberately non-symplectic adaptive embedded
// Runge-Kutta 5(4) pair: conservation of H and of candidate first integrals
// is the quantity under test, so nothing may conserve it by construction.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "geoflow/expr.hpp"
#include "geoflow/geometry.hpp"

namespace geoflow {

struct PhasePoint {
  double u1 = 0.0, u2 = 0.0, p1 = 0.0, p2 = 0.0;
};

struct GeodesicTrajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<double> hamiltonian_values;
  std::vector<std::string> integral_names;
  std::vector<std::vector<double>> integral_values;  // [monitor][sample]
  bool early_termination = false;
  std::string termination_reason;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  // Drift of a monitored sequence: max over samples of |v_i - v_0|.
  static double drift_of(const std::vector<double>& v) {
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - v.front()));
    return worst;
  }
  double hamiltonian_drift() const { return drift_of(hamiltonian_values); }
  double integral_drift(std::size_t m) const {
    return drift_of(integral_values.at(m));
  }
};

namespace detail {

// Degree-2 momentum polynomial H plus its coordinate gradient, compiled.
struct HamiltonianTapes {
  std::vector<CompiledExpr> h;     // h0, h1, h2 over (u1, u2)
  std::vector<CompiledExpr> h_u1;  // du1 derivatives
  std::vector<CompiledExpr> h_u2;  // du2 derivatives

  explicit HamiltonianTapes(const Metric2D& m) {
    const MomentumPoly ham = hamiltonian(m);
    const std::vector<std::string> order = {m.u1, m.u2};
    for (const Expr& c : ham.coeff) {
      h.emplace_back(c, order);
      h_u1.emplace_back(differentiate(c, m.u1), order);
      h_u2.emplace_back(differentiate(c, m.u2), order);
    }
  }

  std::array<double, 4> rhs(const std::array<double, 4>& y) const {
    const double u[2] = {y[0], y[1]};
    const double p1 = y[2], p2 = y[3];
    const double h0 = h[0].eval(u), h1 = h[1].eval(u), h2 = h[2].eval(u);
    const double d1h0 = h_u1[0].eval(u), d1h1 = h_u1[1].eval(u),
                 d1h2 = h_u1[2].eval(u);
    const double d2h0 = h_u2[0].eval(u), d2h1 = h_u2[1].eval(u),
                 d2h2 = h_u2[2].eval(u);
    return {2.0 * h0 * p1 + h1 * p2, h1 * p1 + 2.0 * h2 * p2,
            -(d1h0 * p1 * p1 + d1h1 * p1 * p2 + d1h2 * p2 * p2),
            -(d2h0 * p1 * p1 + d2h1 * p1 * p2 + d2h2 * p2 * p2)};
  }

  double value(const std::array<double, 4>& y) const {
    const double u[2] = {y[0], y[1]};
    return h[0].eval(u) * y[2] * y[2] + h[1].eval(u) * y[2] * y[3] +
           h[2].eval(u) * y[3] * y[3];
  }
};

// A monitored momentum polynomial compiled over the metric's coordinates.
struct MonitorTapes {
  std::vector<CompiledExpr> coeff;
  int degree;

  MonitorTapes(const MomentumPoly& f, const std::string& u1,
               const std::string& u2)
      : degree(f.degree()) {
    const std::vector<std::string> order{u1, u2};
    for (const Expr& c : f.coeff) coeff.emplace_back(c, order);
  }

  double value(const std::array<double, 4>& y) const {
    const double u[2] = {y[0], y[1]};
    double acc = 0.0;
    for (std::size_t k = 0; k < coeff.size(); ++k)
      acc += coeff[k].eval(u) *
             std::pow(y[2], static_cast<double>(coeff.size() - 1 - k)) *
             std::pow(y[3], static_cast<double>(k));
    return acc;
  }
};

// Signed-distance estimate |phi| / |grad phi| to the zero set of phi(u).
struct GuardTapes {
  CompiledExpr value, d1, d2;

  GuardTapes(const Expr& phi, const std::string& u1, const std::string& u2)
      : value(phi, {u1, u2}),
        d1(differentiate(phi, u1), {u1, u2}),
        d2(differentiate(phi, u2), {u1, u2}) {}

  double distance(const std::array<double, 4>& y) const {
    const double u[2] = {y[0], y[1]};
    const double v = value.eval(u);
    const double g = std::hypot(d1.eval(u), d2.eval(u));
    if (!std::isfinite(v) || !std::isfinite(g)) return 0.0;
    if (g == 0.0) return std::abs(v) > 0.0 ? 1e300 : 0.0;
    return std::abs(v) / g;
  }
};

}  // namespace detail

// Exact right-hand side of Hamilton's equations at one phase point:
// (dH/dp1, dH/dp2, -dH/du1, -dH/du2).
inline std::array<double, 4> hamiltonian_rhs(const Metric2D& m,
                                             const PhasePoint& s) {
  const Assignment at{{m.u1, s.u1}, {m.u2, s.u2}};
  if (evaluate(m.det(), at) == 0.0)
    throw ExprError("hamiltonian_rhs: metric singular at (" +
                    std::to_string(s.u1) + ", " + std::to_string(s.u2) + ")");
  detail::HamiltonianTapes tapes(m);
  return tapes.rhs({s.u1, s.u2, s.p1, s.p2});
}

// Numeric description of a flow for the integrator core. Besides the
// symbolic path below, this admits right-hand sides evaluated from
// interpolated grid data, where no closed-form metric exists.
struct FlowSystem {
  using State = std::array<double, 4>;
  std::function<State(const State&)> rhs;
  std::function<double(const State&)> energy;
  std::vector<std::function<double(const State&)>> monitors;
  std::vector<std::string> monitor_names;  // defaults to F1..Fm
  // distance estimates to singular sets; the run stops inside the margin
  std::vector<std::function<double(const State&)>> guard_distances;
};

struct FlowIntegrateOptions {
  double tol = 1e-10;     // local error tolerance (abs and rel)
  int min_samples = 100;  // dense-output rows, endpoints included
  double guard_distance = 0.05;
};

// Integrates a flow from s0 over [0, t_end] with a Dormand-Prince 5(4)
// pair. Samples are uniform in time; the step is clipped to land on each
// sample. Crossing into a guard margin or step underflow terminates early
// with the partial trajectory flagged.
inline GeodesicTrajectory integrate_flow(const FlowSystem& sys,
                                         const PhasePoint& s0, double t_end,
                                         const FlowIntegrateOptions& opt = {}) {
  if (!(t_end >= 0.0))
    throw ExprError("integrate: t_end must be non-negative");
  if (opt.tol <= 0.0) throw ExprError("integrate: tol must be positive");

  GeodesicTrajectory out;
  for (std::size_t i = 0; i < sys.monitors.size(); ++i)
    out.integral_names.push_back(i < sys.monitor_names.size()
                                     ? sys.monitor_names[i]
                                     : "F" + std::to_string(i + 1));
  out.integral_values.resize(sys.monitors.size());

  std::array<double, 4> y = {s0.u1, s0.u2, s0.p1, s0.p2};
  auto emit = [&](double t) {
    out.times.push_back(t);
    out.states.push_back({y[0], y[1], y[2], y[3]});
    out.hamiltonian_values.push_back(sys.energy(y));
    for (std::size_t i = 0; i < sys.monitors.size(); ++i)
      out.integral_values[i].push_back(sys.monitors[i](y));
  };

  for (const auto& g : sys.guard_distances)
    if (g(y) < opt.guard_distance) {
      out.early_termination = true;
      out.termination_reason = "singularity guard tripped at the start";
      emit(0.0);
      return out;
    }
  emit(0.0);
  if (t_end == 0.0) return out;

  // Dormand-Prince coefficients; the last stage row doubles as the 5th
  // order weights (FSAL).
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
       11.0 / 84}};
  static const double B4[7] = {5179.0 / 57600,    0.0,
                               7571.0 / 16695,    393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100,
                               1.0 / 40};

  const int samples = std::max(2, opt.min_samples);
  const double sample_dt = t_end / (samples - 1);
  const double dt_floor = 1e-14 * std::max(1.0, t_end);

  double t = 0.0;
  double dt = sample_dt / 8.0;
  std::array<double, 4> k[7];
  k[0] = sys.rhs(y);

  for (int s = 1; s < samples; ++s) {
    const double target = (s == samples - 1) ? t_end : s * sample_dt;
    while (target - t > dt_floor) {
      const double h = std::min(dt, target - t);
      if (h < dt_floor) {
        out.early_termination = true;
        out.termination_reason = "step size underflow";
        return out;
      }
      bool finite = true;
      for (int stage = 1; stage < 7 && finite; ++stage) {
        std::array<double, 4> ys = y;
        for (int j = 0; j < stage; ++j)
          for (int c = 0; c < 4; ++c) ys[c] += h * A[stage][j] * k[j][c];
        k[stage] = sys.rhs(ys);
        for (double v : k[stage])
          if (!std::isfinite(v)) finite = false;
      }
      if (!finite) {
        ++out.rejected_steps;
        dt = h * 0.25;
        continue;
      }
      // 5th order solution is stage 7's base point (A[6] == b5 weights),
      // so k[6] from the stage loop already holds the derivative at y5.
      std::array<double, 4> y5 = y, y4 = y;
      for (int j = 0; j < 6; ++j)
        for (int c = 0; c < 4; ++c) y5[c] += h * A[6][j] * k[j][c];
      for (int j = 0; j < 7; ++j)
        for (int c = 0; c < 4; ++c) y4[c] += h * B4[j] * k[j][c];
      double err = 0.0;
      for (int c = 0; c < 4; ++c) {
        const double scale =
            opt.tol + opt.tol * std::max(std::abs(y[c]), std::abs(y5[c]));
        const double e = (y5[c] - y4[c]) / scale;
        err += e * e;
      }
      err = std::sqrt(err / 4.0);
      if (!std::isfinite(err) || err > 1.0) {
        ++out.rejected_steps;
        const double shrink = std::isfinite(err)
                                  ? std::max(0.2, 0.9 * std::pow(err, -0.2))
                                  : 0.25;
        dt = h * shrink;  // y unchanged, k[0] still valid
        continue;
      }
      ++out.accepted_steps;
      y = y5;
      t += h;
      k[0] = k[6];  // FSAL
      const double grow =
          err == 0.0 ? 5.0
                     : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      dt = h * grow;
      for (const auto& g : sys.guard_distances)
        if (g(y) < opt.guard_distance) {
          out.early_termination = true;
          out.termination_reason = "singularity guard tripped";
          emit(t);
          return out;
        }
    }
    emit(target);
  }
  return out;
}

struct IntegrateOptions {
  double tol = 1e-10;                  // local error tolerance (abs and rel)
  int min_samples = 100;               // dense-output rows, endpoints included
  std::vector<MomentumPoly> monitors;  // candidate integrals to track
  std::vector<std::string> monitor_names;  // defaults to F1..Fm
  std::vector<Expr> guards;                // singular level sets phi(u1,u2)
  double guard_distance = 0.05;  // stop when closer than this to a guard
};

// Symbolic front end: compiles the metric's Hamiltonian, the monitored
// polynomials, and the guard level sets into tapes and hands them to the
// integrator core.
inline GeodesicTrajectory integrate(const Metric2D& m, const PhasePoint& s0,
                                    double t_end,
                                    const IntegrateOptions& opt = {}) {
  FlowSystem sys;
  const detail::HamiltonianTapes ham(m);
  sys.rhs = [ham](const std::array<double, 4>& y) { return ham.rhs(y); };
  sys.energy = [ham](const std::array<double, 4>& y) { return ham.value(y); };
  for (const MomentumPoly& f : opt.monitors) {
    detail::MonitorTapes tapes(f, m.u1, m.u2);
    sys.monitors.push_back(
        [tapes = std::move(tapes)](const std::array<double, 4>& y) {
          return tapes.value(y);
        });
  }
  sys.monitor_names = opt.monitor_names;
  for (const Expr& phi : opt.guards) {
    detail::GuardTapes tapes(phi, m.u1, m.u2);
    sys.guard_distances.push_back(
        [tapes = std::move(tapes)](const std::array<double, 4>& y) {
          return tapes.distance(y);
        });
  }

  FlowIntegrateOptions base;
  base.tol = opt.tol;
  base.min_samples = opt.min_samples;
  base.guard_distance = opt.guard_distance;
  return integrate_flow(sys, s0, t_end, base);
}

}  // namespace geoflow
