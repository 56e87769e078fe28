#pragma once

// Quasi-linear systems u_t + V(u) u_x = 0 governing the integral coefficients
// a_0..a_{n-1}, the commuting-flow matrices W built from generator functions,
// the generator PDE systems, and diagnostics: commutators, hyperbolicity,
// the semi-Hamiltonian property, and the n=2 Riemann-invariant reduction.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "geoflow/expr.hpp"
#include "geoflow/rng.hpp"

namespace geoflow {

using ExprMatrix = std::vector<std::vector<Expr>>;

inline std::vector<std::string> field_names(int n) {
  std::vector<std::string> v;
  for (int k = 0; k < n; ++k) v.push_back("a" + std::to_string(k));
  return v;
}

struct QuasiLinearSystem {
  int n = 0;
  std::vector<std::string> vars;  // a_0..a_{n-1}
  ExprMatrix V;
};

struct SymmetryFlow {
  int n = 0;
  std::vector<Expr> generators;  // P,R,S (n=3) or P,R,S,T (n=4)
  ExprMatrix W;
};

// Coefficient matrix of the quasi-linear system. Subdiagonal entries are
// a_{n-1}; the last column in row k is (k+1)a_{k+1} - (n-k+1)a_{k-1} with
// a_{-1}:=0 and a_n:=1; everything else is zero.
inline QuasiLinearSystem build_V(int n, std::vector<std::string> vars = {}) {
  if (n < 1 || n > 5)
    throw ExprError("build_V: n must be between 1 and 5");
  if (vars.empty()) vars = field_names(n);
  if (static_cast<int>(vars.size()) != n)
    throw ExprError("build_V: need one variable name per field");
  auto a = [&](int k) -> Expr {
    if (k < 0) return constant(0.0);
    if (k == n) return constant(1.0);
    return variable(vars[k]);
  };
  ExprMatrix V(n, std::vector<Expr>(n, constant(0.0)));
  for (int row = 1; row < n; ++row) V[row][row - 1] = a(n - 1);
  for (int k = 0; k < n; ++k)
    V[k][n - 1] = sub(mul(constant(static_cast<double>(k + 1)), a(k + 1)),
                      mul(constant(static_cast<double>(n - k + 1)), a(k - 1)));
  return {n, std::move(vars), std::move(V)};
}

// Commuting-flow matrix for n=3: every W of this shape satisfies [V,W]=0
// identically in the a-variables, for arbitrary generators P,R,S.
inline ExprMatrix symmetry_matrix_n3(const Expr& P, const Expr& R,
                                     const Expr& S) {
  Expr a0 = variable("a0"), a1 = variable("a1"), a2 = variable("a2");
  Expr c3 = sub(mul(constant(2.0), a1), constant(3.0));  // 2a1-3
  return {
      {sum({mul(sub(mul(constant(3.0), a0), mul(constant(2.0), a2)), P),
            mul(c3, R), S}),
       mul(a1, P), mul(a1, R)},
      {add(mul(c3, P), mul(a2, R)), add(mul(c3, R), S),
       add(mul(a1, P),
           mul(sub(mul(constant(2.0), a2), mul(constant(3.0), a0)), R))},
      {mul(a2, P), mul(a2, R), S},
  };
}

// Commuting-flow matrix for n=4, same algebraic property with P,R,S,T.
inline ExprMatrix symmetry_matrix_n4(const Expr& P, const Expr& R,
                                     const Expr& S, const Expr& T) {
  Expr a0 = variable("a0"), a1 = variable("a1"), a2 = variable("a2"),
       a3 = variable("a3");
  Expr two = constant(2.0), three = constant(3.0);
  Expr d20 = sub(a2, mul(two, a0));   // a2-2a0
  Expr d22 = sub(a2, two);            // a2-2
  Expr d13 = sub(a1, a3);             // a1-a3
  Expr w1 = sum({mul(mul(two, neg(d20)), P), mul(mul(three, d13), R),
                 mul(mul(two, d22), S), T});
  Expr w2 = sum({mul(mul(three, d13), P), mul(mul(two, d22), R), mul(a3, S)});
  Expr w3 = sum({mul(mul(three, d13), R), mul(mul(two, d22), S), T});
  Expr w4 = sum({mul(a1, P), mul(mul(two, d20), R),
                 mul(mul(three, neg(d13)), S)});
  return {
      {w1, mul(a1, P), mul(a1, R), mul(a1, S)},
      {w2, w3, add(mul(a1, P), mul(mul(two, d20), R)),
       add(mul(a1, R), mul(mul(two, d20), S))},
      {add(mul(a3, R), mul(mul(two, d22), P)),
       add(mul(a3, S), mul(mul(two, d22), R)), add(T, mul(mul(two, d22), S)),
       w4},
      {mul(a3, P), mul(a3, R), mul(a3, S), T},
  };
}

inline SymmetryFlow build_W(int n, const std::vector<Expr>& generators) {
  if (n == 3) {
    if (generators.size() != 3)
      throw ExprError("build_W: n=3 takes generators P,R,S");
    return {3, generators,
            symmetry_matrix_n3(generators[0], generators[1], generators[2])};
  }
  if (n == 4) {
    if (generators.size() != 4)
      throw ExprError("build_W: n=4 takes generators P,R,S,T");
    return {4, generators,
            symmetry_matrix_n4(generators[0], generators[1], generators[2],
                               generators[3])};
  }
  throw ExprError("build_W: only n=3 and n=4 have a full matrix form");
}

namespace detail {

inline Eigen::MatrixXd eval_matrix(const ExprMatrix& m, const Assignment& at) {
  Eigen::MatrixXd out(m.size(), m.empty() ? 0 : m[0].size());
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m[i].size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          evaluate(m[i][j], at);
  return out;
}

}  // namespace detail

inline double commutator_residual(const ExprMatrix& V, const ExprMatrix& W,
                                  const Assignment& at) {
  if (V.size() != W.size())
    throw ExprError("commutator_residual: dimension mismatch");
  Eigen::MatrixXd v = detail::eval_matrix(V, at);
  Eigen::MatrixXd w = detail::eval_matrix(W, at);
  return (v * w - w * v).cwiseAbs().maxCoeff();
}

inline double commutator_residual(const QuasiLinearSystem& sys,
                                  const SymmetryFlow& flow,
                                  const Assignment& at) {
  return commutator_residual(sys.V, flow.W, at);
}

// ---------------------------------------------------------------------------
// Generator PDE systems. The matrix ansatz reduces the commuting-flow
// condition to these first-order systems in the generators; the final
// equation of each row set is the second-order compatibility condition
// the n=3 system implies for P.

struct PdeResidualReport {
  std::vector<double> max_residual;  // one slot per equation
  int evaluated = 0;
  int skipped = 0;  // points where a denominator (a2 resp. a3) vanished
  double worst() const {
    double w = 0.0;
    for (double r : max_residual) w = std::max(w, r);
    return w;
  }
};

namespace detail {

inline std::vector<Expr> generator_pde_equations_n3(const Expr& P,
                                                    const Expr& R,
                                                    const Expr& S) {
  Expr a0 = variable("a0"), a1 = variable("a1"), a2 = variable("a2");
  auto d = [](const Expr& f, int k) {
    return differentiate(f, "a" + std::to_string(k));
  };
  Expr dP0 = d(P, 0), dP1 = d(P, 1), dP2 = d(P, 2);
  Expr dR0 = d(R, 0), dR1 = d(R, 1), dR2 = d(R, 2);
  Expr dS0 = d(S, 0), dS1 = d(S, 1), dS2 = d(S, 2);
  Expr c3 = sub(mul(constant(2.0), a1), constant(3.0));
  std::vector<Expr> eq;
  eq.push_back(sub(mul(a1, dP0),
                   sum({mul(sub(mul(constant(3.0), a0), mul(constant(2.0), a2)),
                            dR0),
                        mul(c3, dR1), mul(a2, dR2)})));
  eq.push_back(sub(dP1, dR0));
  eq.push_back(sub(dP2, dR1));
  eq.push_back(sub(dS0, sub(mul(a2, dR1), mul(constant(2.0), P))));
  eq.push_back(sub(dS1, sub(mul(a2, dR2), mul(constant(2.0), R))));
  eq.push_back(sub(
      dS2, sum({mul(a1, dR0),
                mul(sub(mul(constant(2.0), a2), mul(constant(3.0), a0)), dR1),
                mul(sub(constant(3.0), mul(constant(2.0), a1)), dR2), P})));
  eq.push_back(sub(d(dP0, 2), d(dP1, 1)));
  return eq;
}

inline std::vector<Expr> generator_pde_equations_n4(const Expr& P,
                                                    const Expr& R,
                                                    const Expr& S,
                                                    const Expr& T) {
  Expr a0 = variable("a0"), a1 = variable("a1"), a2 = variable("a2"),
       a3 = variable("a3");
  auto d = [](const Expr& f, int k) {
    return differentiate(f, "a" + std::to_string(k));
  };
  Expr dP[4], dR[4], dS[4], dT[4];
  for (int k = 0; k < 4; ++k) {
    dP[k] = d(P, k);
    dR[k] = d(R, k);
    dS[k] = d(S, k);
    dT[k] = d(T, k);
  }
  Expr two = constant(2.0), three = constant(3.0);
  Expr d20 = sub(a2, mul(two, a0));
  Expr d22 = sub(a2, two);
  Expr d13 = sub(a1, a3);
  // the combination shared by the S- and T-rows
  Expr common = sum({mul(a1, dR[0]), mul(mul(two, d20), dR[1]),
                     mul(mul(three, neg(d13)), dR[2]),
                     mul(mul(two, neg(d22)), dR[3]), P});
  Expr g0 = mul(mul(two, a1), sub(two, a2));
  Expr g1 = sum({mul(constant(-4.0), pow_int(a2, 2)),
                 mul(constant(8.0), mul(a0, a2)), mul(a1, a3),
                 mul(constant(-16.0), a0), mul(constant(8.0), a2)});
  Expr g2 = sum({mul(constant(-4.0), mul(a0, a3)),
                 mul(constant(6.0), mul(a1, a2)),
                 mul(constant(-4.0), mul(a2, a3)), mul(constant(-12.0), a1),
                 mul(constant(12.0), a3)});
  Expr g3 = sum({mul(constant(4.0), pow_int(d22, 2)),
                 mul(constant(-3.0), mul(a1, a3)),
                 mul(constant(3.0), pow_int(a3, 2))});
  std::vector<Expr> eq;
  eq.push_back(sub(mul(a1, dP[0]),
                   sum({mul(mul(two, neg(d20)), dR[0]),
                        mul(mul(three, d13), dR[1]), mul(mul(two, d22), dR[2]),
                        mul(a3, dR[3]), R})));
  eq.push_back(sub(dP[1], dR[0]));
  eq.push_back(sub(dP[2], dR[1]));
  eq.push_back(sub(dP[3], dR[2]));
  eq.push_back(sub(dS[0], dR[1]));
  eq.push_back(sub(dS[1], dR[2]));
  eq.push_back(sub(dS[2], dR[3]));
  eq.push_back(sub(mul(a3, dS[3]), common));
  eq.push_back(sub(dT[0], sub(mul(a3, dR[2]), mul(two, P))));
  eq.push_back(sub(dT[1], sub(mul(a3, dR[3]), mul(two, R))));
  eq.push_back(sub(dT[2], sub(common, mul(two, S))));
  eq.push_back(sub(mul(a3, dT[3]),
                   sum({mul(g0, dR[0]), mul(g1, dR[1]), mul(g2, dR[2]),
                        mul(g3, dR[3]), mul(mul(two, sub(two, a2)), P),
                        mul(mul(two, a3), R)})));
  return eq;
}

}  // namespace detail

inline std::vector<Expr> generator_pde_equations(
    int n, const std::vector<Expr>& generators) {
  if (n == 3 && generators.size() == 3)
    return detail::generator_pde_equations_n3(generators[0], generators[1],
                                              generators[2]);
  if (n == 4 && generators.size() == 4)
    return detail::generator_pde_equations_n4(generators[0], generators[1],
                                              generators[2], generators[3]);
  throw ExprError("generator_pde_equations: n=3 takes P,R,S; n=4 takes P,R,S,T");
}

inline PdeResidualReport symmetry_pde_residual(
    int n, const std::vector<Expr>& generators,
    const std::vector<Assignment>& points) {
  std::vector<Expr> eqs = generator_pde_equations(n, generators);
  PdeResidualReport report;
  report.max_residual.assign(eqs.size(), 0.0);
  for (const auto& at : points) {
    std::vector<double> vals(eqs.size());
    bool ok = true;
    for (size_t i = 0; i < eqs.size() && ok; ++i) {
      try {
        vals[i] = evaluate(eqs[i], at);
      } catch (const ExprError&) {
        ok = false;  // a denominator vanished at this point
      }
    }
    if (!ok) {
      ++report.skipped;
      continue;
    }
    ++report.evaluated;
    for (size_t i = 0; i < eqs.size(); ++i)
      report.max_residual[i] = std::max(report.max_residual[i],
                                        std::abs(vals[i]));
  }
  return report;
}

// Uniform a-samples in [lo,hi]^n with |a_{n-1}| >= last_margin; set
// last_positive when generators involve log(a_{n-1}).
inline std::vector<Assignment> sample_a_points(int n, int count,
                                               std::uint64_t seed,
                                               double lo = -2.0,
                                               double hi = 2.0,
                                               double last_margin = 0.2,
                                               bool last_positive = false) {
  Rng rng(seed);
  std::vector<Assignment> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    Assignment at;
    for (int k = 0; k < n; ++k) {
      std::string name = "a" + std::to_string(k);
      if (k == n - 1) {
        at[name] = last_positive
                       ? rng.uniform(last_margin, hi)
                       : rng.uniform_away_from_zero(lo, hi, last_margin);
      } else {
        at[name] = rng.uniform(lo, hi);
      }
    }
    pts.push_back(std::move(at));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Diagonal systems r^i_t + v_i(r) r^i_x = 0 and the semi-Hamiltonian test
// d_i(d_j v_k / (v_j - v_k)) = d_j(d_i v_k / (v_i - v_k)) for distinct i,j,k.

struct DiagonalSystem {
  int n = 0;
  std::vector<std::string> vars;  // r1..rn
  std::vector<Expr> v;
};

inline DiagonalSystem make_diagonal_system(std::vector<Expr> velocities) {
  DiagonalSystem d;
  d.n = static_cast<int>(velocities.size());
  for (int i = 1; i <= d.n; ++i) d.vars.push_back("r" + std::to_string(i));
  d.v = std::move(velocities);
  return d;
}

inline double semi_hamiltonian_residual(const DiagonalSystem& d,
                                        const Assignment& at) {
  if (d.n < 3)
    throw ExprError("semi_hamiltonian_residual: needs at least three fields");
  std::vector<double> vvals(d.n);
  for (int i = 0; i < d.n; ++i) vvals[i] = evaluate(d.v[i], at);
  for (int i = 0; i < d.n; ++i)
    for (int j = i + 1; j < d.n; ++j)
      if (std::abs(vvals[i] - vvals[j]) <= 1e-12 * (1 + std::abs(vvals[i])))
        throw ExprError("semi_hamiltonian_residual: coinciding velocities at point");
  double worst = 0.0;
  for (int k = 0; k < d.n; ++k) {
    for (int i = 0; i < d.n; ++i) {
      if (i == k) continue;
      for (int j = i + 1; j < d.n; ++j) {
        if (j == k) continue;
        Expr qi = quotient(differentiate(d.v[k], d.vars[j]),
                           sub(d.v[j], d.v[k]));
        Expr qj = quotient(differentiate(d.v[k], d.vars[i]),
                           sub(d.v[i], d.v[k]));
        Expr res = sub(differentiate(qi, d.vars[i]),
                       differentiate(qj, d.vars[j]));
        worst = std::max(worst, std::abs(evaluate(res, at)));
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// n=2 reduction. Fields (a0, a1=g) map to Riemann invariants r1 <= r2 with
// a0 = 1 - r1 - r2 and g^2 = -4 r1 r2; the diagonal velocities are
// v1 = 2 r2, v2 = 2 r1, each independent of its own invariant.

struct RiemannInvariantsN2 {
  double r1, r2;  // r1 <= r2
  double v1() const { return 2 * r2; }
  double v2() const { return 2 * r1; }
};

inline RiemannInvariantsN2 riemann_invariants_n2(double a0, double a1) {
  if (a1 == 0.0)
    throw ExprError("riemann_invariants_n2: a1 = 0 degenerates the metric");
  double s = 1.0 - a0;
  double disc = std::sqrt(s * s + a1 * a1);
  return {(s - disc) / 2, (s + disc) / 2};
}

inline bool weak_nonlinearity_check_n2(const Expr& v1, const Expr& v2) {
  Expr d1 = differentiate(v1, "r1");
  Expr d2 = differentiate(v2, "r2");
  Rng rng(424242);
  for (int i = 0; i < 32; ++i) {
    Assignment at{{"r1", rng.uniform(-2.0, 2.0)}, {"r2", rng.uniform(-2.0, 2.0)}};
    if (std::abs(evaluate(d1, at)) > 1e-12) return false;
    if (std::abs(evaluate(d2, at)) > 1e-12) return false;
  }
  return true;
}

inline bool weak_nonlinearity_check_n2() {
  return weak_nonlinearity_check_n2(parse("2*r2"), parse("2*r1"));
}

// ---------------------------------------------------------------------------
// Spectrum of V at a point; the system is hyperbolic there when all
// eigenvalues are real and pairwise distinct.

struct EigenReport {
  std::vector<std::complex<double>> eigenvalues;
  bool hyperbolic = false;
};

inline EigenReport eigenvalues_V(const QuasiLinearSystem& sys,
                                 const Assignment& at) {
  Eigen::MatrixXd m = detail::eval_matrix(sys.V, at);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  EigenReport report;
  double scale = 1.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> ev = es.eigenvalues()(i);
    report.eigenvalues.push_back(ev);
    scale = std::max(scale, std::abs(ev));
  }
  const double tol = 1e-10;
  report.hyperbolic = true;
  for (auto& ev : report.eigenvalues)
    if (std::abs(ev.imag()) > tol * scale) report.hyperbolic = false;
  for (size_t i = 0; i < report.eigenvalues.size() && report.hyperbolic; ++i)
    for (size_t j = i + 1; j < report.eigenvalues.size(); ++j)
      if (std::abs(report.eigenvalues[i] - report.eigenvalues[j]) <=
          tol * scale)
        report.hyperbolic = false;
  return report;
}

}  // namespace geoflow
