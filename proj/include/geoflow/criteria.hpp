#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "geoflow/expr.hpp"
#include "geoflow/geometry.hpp"

namespace geoflow {

// Differential scalars behind the linear-integral obstruction: the scalar
// curvature R, its squared gradient L = g^{ij} R_i R_j, and its
// Laplace-Beltrami image Delta. When the geodesic flow carries a
// linear-in-momenta first integral, (R, L) and (R, Delta) are functionally
// dependent, so both Jacobian determinants over the coordinates vanish.
struct CriterionScalars {
  Expr r, l, delta;
};

inline CriterionScalars criterion_scalars(const Metric2D& m) {
  const Expr det = m.det();
  const Expr gi11 = quotient(m.g22, det);
  const Expr gi12 = neg(quotient(m.g12, det));
  const Expr gi22 = quotient(m.g11, det);

  CriterionScalars s;
  s.r = scalar_curvature(m);
  const Expr r1 = differentiate(s.r, m.u1);
  const Expr r2 = differentiate(s.r, m.u2);
  s.l = sum({mul(gi11, mul(r1, r1)),
             mul(constant(2.0), mul(gi12, mul(r1, r2))),
             mul(gi22, mul(r2, r2))});
  const Expr root = pow_rational(det, 1, 2);
  const Expr flux1 = mul(root, add(mul(gi11, r1), mul(gi12, r2)));
  const Expr flux2 = mul(root, add(mul(gi12, r1), mul(gi22, r2)));
  s.delta = quotient(
      add(differentiate(flux1, m.u1), differentiate(flux2, m.u2)), root);
  return s;
}

enum class CriterionVerdict {
  Obstructed,
  ConsistentWithLinearIntegral,
  Inconclusive,
};

inline std::string verdict_name(CriterionVerdict v) {
  switch (v) {
    case CriterionVerdict::Obstructed:
      return "obstructed";
    case CriterionVerdict::ConsistentWithLinearIntegral:
      return "consistent-with-linear-integral";
    case CriterionVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

struct CriterionPoint {
  double x = 0.0, y = 0.0;
  double det_rl = 0.0;      // normalized det of rows (grad R; grad L)
  double det_rdelta = 0.0;  // normalized det of rows (grad R; grad Delta)
  bool exceeds = false;
};

struct CriterionReport {
  std::vector<CriterionPoint> points;  // admissible samples only
  std::size_t inadmissible = 0;
  double threshold = 1e-8;
  double exceeding_fraction = 0.0;
  CriterionVerdict verdict = CriterionVerdict::Inconclusive;
};

namespace detail {

// Determinant of two gradient rows rescaled to unit length. A row shorter
// than 1e-12 is the numerical gradient of a constant scalar; dependence with
// a constant is automatic, so the determinant is reported as exactly zero.
inline double normalized_det(double a1, double a2, double b1, double b2) {
  const double na = std::hypot(a1, a2);
  const double nb = std::hypot(b1, b2);
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return (a1 / na) * (b2 / nb) - (a2 / na) * (b1 / nb);
}

}  // namespace detail

// Evaluates both dependence determinants over the sample set. Points where
// any gradient fails to evaluate finitely (metric degenerate, scalar
// singular) are counted as inadmissible and excluded from the verdict. The
// verdict is deliberately one-sided: the underlying criterion is necessary
// for a linear integral, never sufficient, so a clean sample set only says
// "consistent", while >= 90% of samples exceeding the threshold says
// "obstructed". Everything in between stays inconclusive.
inline CriterionReport criterion_report(
    const CriterionScalars& s, const std::string& u1, const std::string& u2,
    const std::vector<std::array<double, 2>>& points, double threshold = 1e-8) {
  const std::vector<std::string> order{u1, u2};
  std::vector<CompiledExpr> grads;
  for (const Expr& f : {s.r, s.l, s.delta}) {
    grads.emplace_back(differentiate(f, u1), order);
    grads.emplace_back(differentiate(f, u2), order);
  }

  CriterionReport rep;
  rep.threshold = threshold;
  std::size_t exceed_count = 0;
  for (const auto& p : points) {
    std::array<double, 6> v{};
    bool finite = true;
    for (int i = 0; i < 6; ++i) {
      v[i] = grads[i].eval(p.data());
      if (!std::isfinite(v[i])) finite = false;
    }
    if (!finite) {
      ++rep.inadmissible;
      continue;
    }
    CriterionPoint cp;
    cp.x = p[0];
    cp.y = p[1];
    cp.det_rl = detail::normalized_det(v[0], v[1], v[2], v[3]);
    cp.det_rdelta = detail::normalized_det(v[0], v[1], v[4], v[5]);
    cp.exceeds = std::abs(cp.det_rl) > threshold ||
                 std::abs(cp.det_rdelta) > threshold;
    if (cp.exceeds) ++exceed_count;
    rep.points.push_back(cp);
  }
  if (rep.points.empty())
    throw ExprError("criterion: all sample points are inadmissible");

  rep.exceeding_fraction =
      static_cast<double>(exceed_count) / static_cast<double>(rep.points.size());
  if (rep.exceeding_fraction >= 0.9)
    rep.verdict = CriterionVerdict::Obstructed;
  else if (exceed_count == 0)
    rep.verdict = CriterionVerdict::ConsistentWithLinearIntegral;
  else
    rep.verdict = CriterionVerdict::Inconclusive;
  return rep;
}

inline CriterionReport criterion_determinants(
    const Metric2D& m, const std::vector<std::array<double, 2>>& points,
    double threshold = 1e-8) {
  return criterion_report(criterion_scalars(m), m.u1, m.u2, points, threshold);
}

}  // namespace geoflow
