#pragma once

// 2-D metrics, Hamiltonians of geodesic flows, momentum polynomials with
// symbolic coefficients, Poisson brackets, and Gauss curvature.

#include <string>
#include <utility>
#include <vector>

#include "geoflow/expr.hpp"

namespace geoflow {

struct Metric2D {
  Expr g11, g12, g22;
  std::string u1 = "x", u2 = "y";

  Expr det() const { return sub(mul(g11, g22), pow_int(g12, 2)); }
};

// Homogeneous polynomial in the momenta: sum over k of coeff[k]*p1^(n-k)*p2^k,
// with coefficients depending on the coordinates named (u1,u2).
struct MomentumPoly {
  std::vector<Expr> coeff;  // size degree()+1
  std::string u1 = "x", u2 = "y";

  int degree() const { return static_cast<int>(coeff.size()) - 1; }
};

inline MomentumPoly hamiltonian(const Metric2D& m) {
  Expr det = m.det();
  if (det->kind == ExprKind::Constant && det->cval == 0.0)
    throw ExprError("hamiltonian: metric determinant is identically zero");
  Expr half = constant(0.5);
  MomentumPoly h;
  h.u1 = m.u1;
  h.u2 = m.u2;
  h.coeff = {quotient(mul(half, m.g22), det),
             quotient(neg(m.g12), det),
             quotient(mul(half, m.g11), det)};
  return h;
}

namespace detail {

// Product of homogeneous momentum polynomials given as coefficient vectors.
inline std::vector<Expr> poly_mul(const std::vector<Expr>& a,
                                  const std::vector<Expr>& b) {
  std::vector<std::vector<Expr>> acc(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      acc[i + j].push_back(mul(a[i], b[j]));
  std::vector<Expr> out(acc.size());
  for (size_t k = 0; k < acc.size(); ++k) out[k] = sum(std::move(acc[k]));
  return out;
}

inline std::vector<Expr> poly_add(const std::vector<Expr>& a,
                                  const std::vector<Expr>& b) {
  std::vector<Expr> out(std::max(a.size(), b.size()), constant(0.0));
  for (size_t k = 0; k < a.size(); ++k) out[k] = add(out[k], a[k]);
  for (size_t k = 0; k < b.size(); ++k) out[k] = add(out[k], b[k]);
  return out;
}

inline std::vector<Expr> poly_neg(const std::vector<Expr>& a) {
  std::vector<Expr> out;
  out.reserve(a.size());
  for (auto& c : a) out.push_back(neg(c));
  return out;
}

// d/dp1 lowers the p1 power: coefficient of p1^(n-1-k) p2^k is (n-k)*c_k.
inline std::vector<Expr> d_dp1(const MomentumPoly& f) {
  int n = f.degree();
  std::vector<Expr> out;
  for (int k = 0; k < n; ++k)
    out.push_back(mul(constant(static_cast<double>(n - k)), f.coeff[k]));
  return out;
}

// d/dp2 lowers the p2 power: coefficient of p1^(n-1-j) p2^j is (j+1)*c_{j+1}.
inline std::vector<Expr> d_dp2(const MomentumPoly& f) {
  int n = f.degree();
  std::vector<Expr> out;
  for (int j = 0; j < n; ++j)
    out.push_back(mul(constant(static_cast<double>(j + 1)), f.coeff[j + 1]));
  return out;
}

inline std::vector<Expr> d_du(const MomentumPoly& f, const std::string& var) {
  std::vector<Expr> out;
  out.reserve(f.coeff.size());
  for (auto& c : f.coeff) out.push_back(differentiate(c, var));
  return out;
}

}  // namespace detail

// {f,h} = sum_i (df/du_i dh/dp_i - df/dp_i dh/du_i); degrees (m,n) -> m+n-1.
inline MomentumPoly poisson_bracket(const MomentumPoly& f,
                                    const MomentumPoly& h) {
  if (f.u1 != h.u1 || f.u2 != h.u2)
    throw ExprError("poisson_bracket: mismatched coordinate variables");
  using namespace detail;
  auto term = [](const std::vector<Expr>& a, const std::vector<Expr>& b) {
    return poly_mul(a, b);
  };
  std::vector<Expr> out =
      poly_add(term(d_du(f, f.u1), d_dp1(h)), term(d_du(f, f.u2), d_dp2(h)));
  out = poly_add(out, poly_neg(term(d_dp1(f), d_du(h, h.u1))));
  out = poly_add(out, poly_neg(term(d_dp2(f), d_du(h, h.u2))));
  MomentumPoly r;
  r.u1 = f.u1;
  r.u2 = f.u2;
  r.coeff = std::move(out);
  return r;
}

// Product of momentum polynomials; degrees add.
inline MomentumPoly momentum_product(const MomentumPoly& f,
                                     const MomentumPoly& h) {
  if (f.u1 != h.u1 || f.u2 != h.u2)
    throw ExprError("momentum_product: mismatched coordinate variables");
  MomentumPoly r;
  r.u1 = f.u1;
  r.u2 = f.u2;
  r.coeff = detail::poly_mul(f.coeff, h.coeff);
  return r;
}

// Scales every coefficient by a coordinate-dependent factor.
inline MomentumPoly momentum_scale(const MomentumPoly& f, const Expr& s) {
  MomentumPoly r = f;
  for (auto& c : r.coeff) c = mul(s, c);
  return r;
}

// Gauss curvature via the Brioschi formula: only first and second derivatives
// of the components enter, all computed exactly.
inline Expr gauss_curvature(const Metric2D& m) {
  const Expr& E = m.g11;
  const Expr& F = m.g12;
  const Expr& G = m.g22;
  const std::string& u = m.u1;
  const std::string& v = m.u2;
  Expr half = constant(0.5);

  Expr Eu = differentiate(E, u), Ev = differentiate(E, v);
  Expr Gu = differentiate(G, u), Gv = differentiate(G, v);
  Expr Fu = differentiate(F, u), Fv = differentiate(F, v);
  Expr Evv = differentiate(Ev, v);
  Expr Guu = differentiate(Gu, u);
  Expr Fuv = differentiate(Fu, v);

  auto det3 = [](std::vector<std::vector<Expr>> a) {
    return sum({mul(a[0][0], sub(mul(a[1][1], a[2][2]), mul(a[1][2], a[2][1]))),
                neg(mul(a[0][1],
                        sub(mul(a[1][0], a[2][2]), mul(a[1][2], a[2][0])))),
                mul(a[0][2],
                    sub(mul(a[1][0], a[2][1]), mul(a[1][1], a[2][0])))});
  };

  Expr m1 = det3({{sum({mul(constant(-0.5), Evv), Fuv,
                        mul(constant(-0.5), Guu)}),
                   mul(half, Eu), sub(Fu, mul(half, Ev))},
                  {sub(Fv, mul(half, Gu)), E, F},
                  {mul(half, Gv), F, G}});
  Expr m2 = det3({{constant(0.0), mul(half, Ev), mul(half, Gu)},
                  {mul(half, Ev), E, F},
                  {mul(half, Gu), F, G}});

  return quotient(sub(m1, m2), pow_int(m.det(), 2));
}

inline Expr scalar_curvature(const Metric2D& m) {
  return mul(constant(2.0), gauss_curvature(m));
}

// Builds the metric g^2 dt^2 + dx^2 together with the momentum polynomial
// sum_k (a_k/g^(n-k)) p1^(n-k) p2^k. The normalization a_{n-1}=g, a_n=1 is
// required of the input and enforced here.
inline std::pair<Metric2D, MomentumPoly> semi_geodesic_assembly(
    const Expr& g, const std::vector<Expr>& a, int n,
    const std::string& u1 = "t", const std::string& u2 = "x") {
  if (static_cast<int>(a.size()) != n + 1)
    throw ExprError("semi_geodesic_assembly: need n+1 coefficients");
  if (!a[n]->is_constant(1.0))
    throw ExprError("semi_geodesic_assembly: a_n must be the constant 1");
  if (to_string(a[n - 1]) != to_string(g))
    throw ExprError("semi_geodesic_assembly: a_{n-1} must equal g");
  Metric2D m;
  m.u1 = u1;
  m.u2 = u2;
  m.g11 = pow_int(g, 2);
  m.g12 = constant(0.0);
  m.g22 = constant(1.0);
  MomentumPoly f;
  f.u1 = u1;
  f.u2 = u2;
  for (int k = 0; k <= n; ++k)
    f.coeff.push_back(quotient(a[k], pow_int(g, n - k)));
  return {m, f};
}

// Fast repeated evaluation of the bracket residual at coordinate points.
// Residual at a point is max_k |{F,H}_k| / (1 + sum |F_j| + sum |H_j|).
class BracketResidual {
 public:
  BracketResidual(const MomentumPoly& f, const MomentumPoly& h) {
    MomentumPoly b = poisson_bracket(f, h);
    std::vector<std::string> order{f.u1, f.u2};
    for (auto& c : f.coeff) f_.emplace_back(c, order);
    for (auto& c : h.coeff) h_.emplace_back(c, order);
    for (auto& c : b.coeff) b_.emplace_back(c, order);
  }

  double operator()(double x, double y) const {
    double pt[2] = {x, y};
    double scale = 1.0;
    for (auto& c : f_) scale += std::abs(c.eval(pt));
    for (auto& c : h_) scale += std::abs(c.eval(pt));
    double worst = 0.0;
    for (auto& c : b_) worst = std::max(worst, std::abs(c.eval(pt)));
    return worst / scale;
  }

 private:
  std::vector<CompiledExpr> f_, h_, b_;
};

}  // namespace geoflow
