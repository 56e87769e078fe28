#pragma once

// Implicit algebraic systems defining the integral coefficients a_k(t,x),
// a damped Newton solver with exact Jacobians, grid continuation from an
// anchor, finite-difference verification that grid fields satisfy their
// quasi-linear system, and the closed-form machinery of the n=2 case.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geoflow/expr.hpp"
#include "geoflow/flows.hpp"
#include "geoflow/geometry.hpp"

namespace geoflow {

// m equations F_i(a_0..a_{m-1}, t, x; constants) = 0. Constants are
// substituted once at hydration, so the solver sees numbers only.
struct ImplicitSystem {
  std::vector<Expr> equations;
  std::vector<std::string> unknowns;
  std::map<std::string, double> constants;

  std::vector<Expr> hydrated() const {
    std::map<std::string, Expr> repl;
    for (auto& [name, value] : constants) repl[name] = constant(value);
    std::vector<Expr> out;
    out.reserve(equations.size());
    for (auto& e : equations) out.push_back(substitute(e, repl));
    return out;
  }
};

// Newton iteration with step halving. Equations and Jacobian are compiled
// to tapes once; domain exits surface as non-finite values and reject the
// step during the line search.
class NewtonSolver {
 public:
  explicit NewtonSolver(const ImplicitSystem& sys)
      : m_(static_cast<int>(sys.unknowns.size())) {
    if (sys.equations.size() != sys.unknowns.size())
      throw ExprError("NewtonSolver: need as many equations as unknowns");
    std::vector<std::string> order = sys.unknowns;
    order.push_back("t");
    order.push_back("x");
    std::vector<Expr> eqs = sys.hydrated();
    for (auto& e : eqs) {
      f_.emplace_back(e, order);
      for (auto& u : sys.unknowns) jac_.emplace_back(differentiate(e, u), order);
    }
  }

  struct Result {
    std::vector<double> a;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string failure;  // empty on success
  };

  Result solve(double t, double x, const std::vector<double>& seed,
               double tol = 1e-11, int max_iter = 60) const {
    if (static_cast<int>(seed.size()) != m_)
      throw ExprError("NewtonSolver: seed size mismatch");
    std::vector<double> vals(m_ + 2);
    std::copy(seed.begin(), seed.end(), vals.begin());
    vals[m_] = t;
    vals[m_ + 1] = x;

    Result res;
    Eigen::VectorXd F(m_);
    Eigen::MatrixXd J(m_, m_);
    double fnorm = eval_residual(vals, F);
    if (!std::isfinite(fnorm)) {
      res.failure = "domain violation at seed";
      res.a = seed;
      res.residual = fnorm;
      return res;
    }
    for (int iter = 0; iter < max_iter; ++iter) {
      res.iterations = iter;
      if (fnorm <= tol) {
        res.converged = true;
        break;
      }
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j)
          J(i, j) = jac_[i * m_ + j].eval(vals.data());
      if (!J.allFinite()) {
        res.failure = "domain violation in jacobian";
        break;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
      if (!lu.isInvertible()) {
        res.failure = "singular jacobian";
        break;
      }
      Eigen::VectorXd step = lu.solve(-F);
      double lambda = 1.0;
      bool accepted = false;
      std::vector<double> trial = vals;
      for (int halve = 0; halve <= 20; ++halve) {
        for (int k = 0; k < m_; ++k) trial[k] = vals[k] + lambda * step(k);
        Eigen::VectorXd Ft(m_);
        double tnorm = eval_residual(trial, Ft);
        if (std::isfinite(tnorm) && tnorm < fnorm) {
          vals = trial;
          F = Ft;
          fnorm = tnorm;
          accepted = true;
          break;
        }
        lambda /= 2;
      }
      if (!accepted) {
        res.failure = "line search stalled after 20 halvings";
        break;
      }
    }
    if (!res.converged && res.failure.empty())
      res.failure = "no convergence within iteration budget";
    res.a.assign(vals.begin(), vals.begin() + m_);
    res.residual = fnorm;
    return res;
  }

  // Residual max-norm of the system at given fields (diagnostic).
  double residual_at(double t, double x, const std::vector<double>& a) const {
    std::vector<double> vals(m_ + 2);
    std::copy(a.begin(), a.end(), vals.begin());
    vals[m_] = t;
    vals[m_ + 1] = x;
    Eigen::VectorXd F(m_);
    return eval_residual(vals, F);
  }

  int num_unknowns() const { return m_; }

 private:
  double eval_residual(const std::vector<double>& vals,
                       Eigen::VectorXd& F) const {
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      F(i) = f_[i].eval(vals.data());
      if (!std::isfinite(F(i))) return std::numeric_limits<double>::quiet_NaN();
      worst = std::max(worst, std::abs(F(i)));
    }
    return worst;
  }

  int m_;
  std::vector<CompiledExpr> f_;
  std::vector<CompiledExpr> jac_;
};

// Throwing convenience wrapper for single-point solves.
inline std::vector<double> newton_solve(const ImplicitSystem& sys, double t,
                                        double x,
                                        const std::vector<double>& seed,
                                        double tol = 1e-11) {
  NewtonSolver solver(sys);
  NewtonSolver::Result r = solver.solve(t, x, seed, tol);
  if (!r.converged)
    throw ExprError("newton_solve: " + r.failure + " at t=" +
                    std::to_string(t) + ", x=" + std::to_string(x));
  return r.a;
}

struct GridSpec {
  double t0 = 0, t1 = 0, x0 = 0, x1 = 0;
  int nt = 1, nx = 1;

  double dt() const { return nt > 1 ? (t1 - t0) / (nt - 1) : 0.0; }
  double dx() const { return nx > 1 ? (x1 - x0) / (nx - 1) : 0.0; }
  double t_at(int it) const { return t0 + it * dt(); }
  double x_at(int ix) const { return x0 + ix * dx(); }
};

struct GridSolution {
  GridSpec spec;
  int n = 0;  // fields per node
  std::vector<double> values;       // node-major, n values per node
  std::vector<std::uint8_t> converged;
  std::vector<std::uint8_t> branch_jump;

  int index(int it, int ix) const { return it * spec.nx + ix; }
  const double* a_at(int it, int ix) const {
    return values.data() + static_cast<size_t>(index(it, ix)) * n;
  }
  bool node_converged(int it, int ix) const {
    return converged[index(it, ix)] != 0;
  }
  int count_converged() const {
    int c = 0;
    for (auto f : converged) c += (f != 0);
    return c;
  }
  int count_branch_jumps() const {
    int c = 0;
    for (auto f : branch_jump) c += (f != 0);
    return c;
  }
};

// Wavefront continuation: the node nearest the anchor is solved from the
// given seed, every other node from an already-solved neighbor. A converged
// node whose fields moved more than 10 grid steps from its parent is flagged
// as a branch jump; non-convergent nodes are flagged and not expanded.
inline GridSolution solve_on_grid(const ImplicitSystem& sys,
                                  const GridSpec& spec,
                                  const std::vector<double>& anchor_seed,
                                  double anchor_t, double anchor_x,
                                  double tol = 1e-11) {
  NewtonSolver solver(sys);
  const int n = solver.num_unknowns();
  GridSolution g;
  g.spec = spec;
  g.n = n;
  const int nodes = spec.nt * spec.nx;
  g.values.assign(static_cast<size_t>(nodes) * n, 0.0);
  g.converged.assign(nodes, 0);
  g.branch_jump.assign(nodes, 0);

  int it0 = spec.nt > 1
                ? std::clamp(static_cast<int>(std::lround(
                                 (anchor_t - spec.t0) / spec.dt())),
                             0, spec.nt - 1)
                : 0;
  int ix0 = spec.nx > 1
                ? std::clamp(static_cast<int>(std::lround(
                                 (anchor_x - spec.x0) / spec.dx())),
                             0, spec.nx - 1)
                : 0;

  NewtonSolver::Result first =
      solver.solve(spec.t_at(it0), spec.x_at(ix0), anchor_seed, tol);
  if (!first.converged)
    throw ExprError("solve_on_grid: anchor node failed: " + first.failure);
  std::copy(first.a.begin(), first.a.end(),
            g.values.begin() + static_cast<size_t>(g.index(it0, ix0)) * n);
  g.converged[g.index(it0, ix0)] = 1;

  const double jump_scale = 10.0 * std::max(spec.dt(), spec.dx());
  std::vector<std::uint8_t> visited(nodes, 0);
  visited[g.index(it0, ix0)] = 1;
  std::vector<std::pair<int, int>> frontier{{it0, ix0}};
  const int dit[] = {1, -1, 0, 0};
  const int dix[] = {0, 0, 1, -1};
  while (!frontier.empty()) {
    std::vector<std::pair<int, int>> next;
    for (auto [it, ix] : frontier) {
      const double* parent = g.a_at(it, ix);
      std::vector<double> seed(parent, parent + n);
      for (int d = 0; d < 4; ++d) {
        int jt = it + dit[d], jx = ix + dix[d];
        if (jt < 0 || jt >= spec.nt || jx < 0 || jx >= spec.nx) continue;
        int idx = g.index(jt, jx);
        if (visited[idx]) continue;
        visited[idx] = 1;
        NewtonSolver::Result r =
            solver.solve(spec.t_at(jt), spec.x_at(jx), seed, tol);
        if (!r.converged) continue;  // flag stays 0; node not expanded
        std::copy(r.a.begin(), r.a.end(),
                  g.values.begin() + static_cast<size_t>(idx) * n);
        g.converged[idx] = 1;
        double moved = 0.0;
        for (int k = 0; k < n; ++k)
          moved = std::max(moved, std::abs(r.a[k] - seed[k]));
        if (jump_scale > 0 && moved > jump_scale) g.branch_jump[idx] = 1;
        next.emplace_back(jt, jx);
      }
    }
    frontier = std::move(next);
  }
  return g;
}

struct GridPdeReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  int interior_nodes = 0;
  double dt = 0.0, dx = 0.0;
};

// Residual of u_t + V(u) u_x at interior grid nodes, with both derivatives
// approximated by second-order central differences of the grid fields.
inline GridPdeReport pde_residual_on_grid(const GridSolution& g,
                                          const QuasiLinearSystem& sys) {
  const int n = g.n;
  if (sys.n != n)
    throw ExprError("pde_residual_on_grid: field count mismatch");
  if (g.spec.nt < 3 || g.spec.nx < 3)
    throw ExprError("pde_residual_on_grid: grid too small for interior stencil");
  static const int oit[] = {0, 1, -1, 0, 0};
  static const int oix[] = {0, 0, 0, 1, -1};
  int bad = 0;
  for (int it = 1; it + 1 < g.spec.nt; ++it)
    for (int ix = 1; ix + 1 < g.spec.nx; ++ix)
      for (int d = 0; d < 5; ++d)
        if (!g.node_converged(it + oit[d], ix + oix[d])) ++bad;
  if (bad > 0)
    throw ExprError("pde_residual_on_grid: " + std::to_string(bad) +
                    " unconverged nodes touch the interior stencil");

  std::vector<CompiledExpr> v;
  v.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v.emplace_back(sys.V[i][j], sys.vars);

  GridPdeReport rep;
  rep.dt = g.spec.dt();
  rep.dx = g.spec.dx();
  double total = 0.0;
  std::vector<double> ut(n), ux(n);
  for (int it = 1; it + 1 < g.spec.nt; ++it) {
    for (int ix = 1; ix + 1 < g.spec.nx; ++ix) {
      const double* c = g.a_at(it, ix);
      const double* tp = g.a_at(it + 1, ix);
      const double* tm = g.a_at(it - 1, ix);
      const double* xp = g.a_at(it, ix + 1);
      const double* xm = g.a_at(it, ix - 1);
      for (int k = 0; k < n; ++k) {
        ut[k] = (tp[k] - tm[k]) / (2 * rep.dt);
        ux[k] = (xp[k] - xm[k]) / (2 * rep.dx);
      }
      double node = 0.0;
      for (int i = 0; i < n; ++i) {
        double r = ut[i];
        for (int j = 0; j < n; ++j) r += v[i * n + j].eval(c) * ux[j];
        node = std::max(node, std::abs(r));
      }
      rep.max_residual = std::max(rep.max_residual, node);
      total += node;
      ++rep.interior_nodes;
    }
  }
  if (rep.interior_nodes > 0) rep.mean_residual = total / rep.interior_nodes;
  return rep;
}

inline double convergence_order(double coarse_residual, double fine_residual) {
  return std::log2(coarse_residual / fine_residual);
}

// Cross-check of a converged grid that bypasses the quasi-linear system: the
// fields and their central-difference slopes are re-assembled into the
// semi-geodesic metric and its momentum polynomial, and the Poisson bracket
// is taken symbolically. The bracket consumes only first derivatives of the
// coefficients, so linearized fields with the measured slopes reproduce it at
// the node up to the finite-difference error of the slopes.
struct BracketClosureReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  int interior_nodes = 0;
};

inline BracketClosureReport bracket_closure_residual(const GridSolution& g) {
  const int n = g.n;
  if (g.spec.nt < 3 || g.spec.nx < 3)
    throw ExprError(
        "bracket_closure_residual: grid too small for interior stencil");
  static const int oit[] = {0, 1, -1, 0, 0};
  static const int oix[] = {0, 0, 0, 1, -1};
  int bad = 0;
  for (int it = 1; it + 1 < g.spec.nt; ++it)
    for (int ix = 1; ix + 1 < g.spec.nx; ++ix)
      for (int d = 0; d < 5; ++d)
        if (!g.node_converged(it + oit[d], ix + oix[d])) ++bad;
  if (bad > 0)
    throw ExprError("bracket_closure_residual: " + std::to_string(bad) +
                    " unconverged nodes touch the interior stencil");

  // Placeholder fields a_k = c_k + s_k t + q_k x; the node supplies the
  // values c_k and the measured slopes (s_k, q_k), and the bracket
  // coefficients are evaluated at the node's local origin t = x = 0.
  std::vector<std::string> order{"t", "x"};
  std::vector<Expr> fields;
  for (int k = 0; k < n; ++k) {
    const std::string i = std::to_string(k);
    fields.push_back(sum({variable("c" + i),
                          mul(variable("s" + i), variable("t")),
                          mul(variable("q" + i), variable("x"))}));
  }
  for (int k = 0; k < n; ++k) order.push_back("c" + std::to_string(k));
  for (int k = 0; k < n; ++k) order.push_back("s" + std::to_string(k));
  for (int k = 0; k < n; ++k) order.push_back("q" + std::to_string(k));

  std::vector<Expr> a = fields;
  a.push_back(constant(1.0));
  auto [metric, f] = semi_geodesic_assembly(fields[n - 1], a, n);
  MomentumPoly bracket = poisson_bracket(f, hamiltonian(metric));
  std::vector<CompiledExpr> coeffs;
  for (const Expr& c : bracket.coeff) coeffs.emplace_back(c, order);

  BracketClosureReport rep;
  const double dt = g.spec.dt(), dx = g.spec.dx();
  std::vector<double> vals(order.size(), 0.0);
  double total = 0.0;
  for (int it = 1; it + 1 < g.spec.nt; ++it) {
    for (int ix = 1; ix + 1 < g.spec.nx; ++ix) {
      const double* c = g.a_at(it, ix);
      const double* tp = g.a_at(it + 1, ix);
      const double* tm = g.a_at(it - 1, ix);
      const double* xp = g.a_at(it, ix + 1);
      const double* xm = g.a_at(it, ix - 1);
      for (int k = 0; k < n; ++k) {
        vals[2 + k] = c[k];
        vals[2 + n + k] = (tp[k] - tm[k]) / (2 * dt);
        vals[2 + 2 * n + k] = (xp[k] - xm[k]) / (2 * dx);
      }
      double node = 0.0;
      for (const CompiledExpr& ce : coeffs)
        node = std::max(node, std::abs(ce.eval(vals)));
      rep.max_residual = std::max(rep.max_residual, node);
      total += node;
      ++rep.interior_nodes;
    }
  }
  if (rep.interior_nodes > 0) rep.mean_residual = total / rep.interior_nodes;
  return rep;
}

// ---------------------------------------------------------------------------
// The n=2 case in closed form. Two arbitrary one-variable functions u, v (in
// the variable "s") generate the full solution family of the diagonal system
// r^i_t + v_i(r) r^i_x = 0, v_1 = 2r^2, v_2 = 2r^1, through the map
// t = -1/2 (u''(r1) + v''(r2)), x = u' + v' - r1 u'' - r2 v''.

struct N2Sample {
  double t, x, a0, g;
  double jacobian;  // det d(t,x)/d(r1,r2) = 1/2 u'''(r1) v'''(r2) (r2-r1)
  bool degenerate;  // map not locally invertible at this point
};

namespace detail {

struct N2Map {
  Expr t, x;  // in variables r1, r2

  explicit N2Map(const Expr& u, const Expr& v) {
    Expr r1 = variable("r1"), r2 = variable("r2");
    Expr u1 = differentiate(u, "s");
    Expr u2 = differentiate(u1, "s");
    Expr v1 = differentiate(v, "s");
    Expr v2 = differentiate(v1, "s");
    auto at1 = [&](const Expr& e) { return substitute(e, {{"s", r1}}); };
    auto at2 = [&](const Expr& e) { return substitute(e, {{"s", r2}}); };
    t = mul(constant(-0.5), add(at1(u2), at2(v2)));
    x = sum({at1(u1), at2(v1), neg(mul(r1, at1(u2))), neg(mul(r2, at2(v2)))});
  }
};

}  // namespace detail

inline N2Sample n2_general_solution_sample(const Expr& u, const Expr& v,
                                           double r1, double r2) {
  if (r1 * r2 >= 0)
    throw ExprError("n2_general_solution_sample: needs r1*r2 < 0 for a real g");
  detail::N2Map map(u, v);
  Assignment at{{"r1", r1}, {"r2", r2}};
  N2Sample s;
  s.t = evaluate(map.t, at);
  s.x = evaluate(map.x, at);
  s.a0 = 1 - r1 - r2;
  s.g = std::sqrt(-4 * r1 * r2);
  Expr u3 = differentiate(differentiate(differentiate(u, "s"), "s"), "s");
  Expr v3 = differentiate(differentiate(differentiate(v, "s"), "s"), "s");
  s.jacobian = 0.5 * evaluate(u3, {{"s", r1}}) * evaluate(v3, {{"s", r2}}) *
               (r2 - r1);
  s.degenerate = std::abs(s.jacobian) <= 1e-12;
  return s;
}

// Finite-difference residual of the diagonal system along the implicit map:
// derivatives of (t,x) w.r.t. (r1,r2) are approximated centrally with step h,
// inverted, and plugged into r^i_t + v_i r^i_x.
inline double n2_diag_fd_residual(const Expr& u, const Expr& v, double r1,
                                  double r2, double h = 1e-4) {
  detail::N2Map map(u, v);
  auto tx = [&](double a, double b) {
    Assignment at{{"r1", a}, {"r2", b}};
    return std::pair<double, double>{evaluate(map.t, at),
                                     evaluate(map.x, at)};
  };
  auto [tp1, xp1] = tx(r1 + h, r2);
  auto [tm1, xm1] = tx(r1 - h, r2);
  auto [tp2, xp2] = tx(r1, r2 + h);
  auto [tm2, xm2] = tx(r1, r2 - h);
  double t_r1 = (tp1 - tm1) / (2 * h), t_r2 = (tp2 - tm2) / (2 * h);
  double x_r1 = (xp1 - xm1) / (2 * h), x_r2 = (xp2 - xm2) / (2 * h);
  double det = t_r1 * x_r2 - t_r2 * x_r1;
  if (std::abs(det) <= 1e-12)
    throw ExprError("n2_diag_fd_residual: map is degenerate at this point");
  // inverse map derivatives
  double r1_t = x_r2 / det, r1_x = -t_r2 / det;
  double r2_t = -x_r1 / det, r2_x = t_r1 / det;
  double v1 = 2 * r2, v2 = 2 * r1;
  return std::max(std::abs(r1_t + v1 * r1_x), std::abs(r2_t + v2 * r2_x));
}

// Commuting-flow potential for n=2. Any pair (u,v) yields a potential
// Psi whose gradients (w1,w2) solve the symmetry relations; the potential
// itself solves the Euler-Poisson-Darboux equation.
struct EpdReport {
  double epd_residual = 0.0;    // Psi_{r1 r2} + (Psi_{r1}-Psi_{r2})/(r1-r2)
  double symm_residual = 0.0;   // the two first-order symmetry relations
  double cross_residual = 0.0;  // d w1/d r2 - d w2/d r1
  int evaluated = 0;
  int skipped = 0;  // points with r1 = r2
};

inline EpdReport epd_check(const Expr& u, const Expr& v,
                           const std::vector<std::pair<double, double>>& pts) {
  Expr r1 = variable("r1"), r2 = variable("r2");
  Expr u_at1 = substitute(u, {{"s", r1}});
  Expr v_at2 = substitute(v, {{"s", r2}});
  Expr du_at1 = substitute(differentiate(u, "s"), {{"s", r1}});
  Expr dv_at2 = substitute(differentiate(v, "s"), {{"s", r2}});
  Expr psi = sum({mul(constant(2.0), u_at1), mul(constant(2.0), v_at2),
                  mul(sub(r1, r2), sub(dv_at2, du_at1))});
  Expr w1 = differentiate(psi, "r1");
  Expr w2 = differentiate(psi, "r2");
  Expr epd = add(differentiate(w1, "r2"),
                 quotient(sub(w1, w2), sub(r1, r2)));
  Expr symm1 = sub(differentiate(w1, "r2"),
                   quotient(sub(w1, w2), sub(r2, r1)));
  Expr symm2 = sub(differentiate(w2, "r1"),
                   quotient(sub(w2, w1), sub(r1, r2)));
  Expr cross = sub(differentiate(w1, "r2"), differentiate(w2, "r1"));

  EpdReport rep;
  for (auto [a, b] : pts) {
    if (a == b) {
      ++rep.skipped;
      continue;
    }
    Assignment at{{"r1", a}, {"r2", b}};
    rep.epd_residual = std::max(rep.epd_residual,
                                std::abs(evaluate(epd, at)));
    rep.symm_residual =
        std::max({rep.symm_residual, std::abs(evaluate(symm1, at)),
                  std::abs(evaluate(symm2, at))});
    rep.cross_residual = std::max(rep.cross_residual,
                                  std::abs(evaluate(cross, at)));
    ++rep.evaluated;
  }
  return rep;
}

}  // namespace geoflow
