#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "geoflow/expr.hpp"
#include "geoflow/hodograph.hpp"

namespace geoflow {

// Catmull-Rom bicubic interpolation of one scalar field over a uniform grid.
// Nodes are interpolated exactly, the surface is C1, and polynomials up to
// total degree two reproduce exactly: ghost rows and columns are extended by
// quadratic extrapolation, so edge cells lose no accuracy. Evaluation
// slightly outside the box continues the edge-cell polynomial, which keeps
// the integrator's step control smooth while a boundary guard winds down.
class BicubicField {
 public:
  BicubicField(const GridSpec& spec, const std::vector<double>& nodes)
      : spec_(spec) {
    if (spec.nt < 3 || spec.nx < 3)
      throw ExprError("BicubicField: need at least a 3x3 grid");
    if (nodes.size() != static_cast<std::size_t>(spec.nt) * spec.nx)
      throw ExprError("BicubicField: node count does not match the grid");

    // Extended lattice with one ghost layer per side. Axis order: t rows,
    // x columns, row-major.
    et_ = spec.nt + 2;
    ex_ = spec.nx + 2;
    grid_.assign(static_cast<std::size_t>(et_) * ex_, 0.0);
    for (int it = 0; it < spec.nt; ++it)
      for (int ix = 0; ix < spec.nx; ++ix)
        at(it + 1, ix + 1) = nodes[static_cast<std::size_t>(it) * spec.nx + ix];
    for (int it = 1; it <= spec.nt; ++it) {
      at(it, 0) = 3 * at(it, 1) - 3 * at(it, 2) + at(it, 3);
      at(it, ex_ - 1) =
          3 * at(it, ex_ - 2) - 3 * at(it, ex_ - 3) + at(it, ex_ - 4);
    }
    for (int ix = 0; ix < ex_; ++ix) {
      at(0, ix) = 3 * at(1, ix) - 3 * at(2, ix) + at(3, ix);
      at(et_ - 1, ix) =
          3 * at(et_ - 2, ix) - 3 * at(et_ - 3, ix) + at(et_ - 4, ix);
    }
  }

  double value(double t, double x) const { return eval(t, x, 0); }
  double d_t(double t, double x) const { return eval(t, x, 1); }
  double d_x(double t, double x) const { return eval(t, x, 2); }

  const GridSpec& spec() const { return spec_; }

 private:
  double& at(int it, int ix) {
    return grid_[static_cast<std::size_t>(it) * ex_ + ix];
  }
  double at(int it, int ix) const {
    return grid_[static_cast<std::size_t>(it) * ex_ + ix];
  }

  static void weights(double u, double* w, double* dw) {
    w[0] = u * (-0.5 + u * (1.0 - 0.5 * u));
    w[1] = 1.0 + u * u * (-2.5 + 1.5 * u);
    w[2] = u * (0.5 + u * (2.0 - 1.5 * u));
    w[3] = u * u * (-0.5 + 0.5 * u);
    dw[0] = -0.5 + u * (2.0 - 1.5 * u);
    dw[1] = u * (-5.0 + 4.5 * u);
    dw[2] = 0.5 + u * (4.0 - 4.5 * u);
    dw[3] = u * (-1.0 + 1.5 * u);
  }

  // which: 0 value, 1 d/dt, 2 d/dx
  double eval(double t, double x, int which) const {
    const double ht = spec_.dt(), hx = spec_.dx();
    double st = (t - spec_.t0) / ht;
    double sx = (x - spec_.x0) / hx;
    int it = static_cast<int>(std::floor(st));
    int ix = static_cast<int>(std::floor(sx));
    if (it < 0) it = 0;
    if (it > spec_.nt - 2) it = spec_.nt - 2;
    if (ix < 0) ix = 0;
    if (ix > spec_.nx - 2) ix = spec_.nx - 2;
    const double ut = st - it, ux = sx - ix;

    double wt[4], dwt[4], wx[4], dwx[4];
    weights(ut, wt, dwt);
    weights(ux, wx, dwx);
    const double* at_row = which == 1 ? dwt : wt;
    const double* ax_col = which == 2 ? dwx : wx;

    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      double row = 0.0;
      for (int b = 0; b < 4; ++b) row += ax_col[b] * at(it + a, ix + b);
      acc += at_row[a] * row;
    }
    if (which == 1) acc /= ht;
    if (which == 2) acc /= hx;
    return acc;
  }

  GridSpec spec_;
  int et_ = 0, ex_ = 0;
  std::vector<double> grid_;
};

// One field of a grid solution as an interpolable surface.
inline BicubicField field_surface(const GridSolution& g, int field) {
  if (field < 0 || field >= g.n)
    throw ExprError("field_surface: field index out of range");
  std::vector<double> nodes(static_cast<std::size_t>(g.spec.nt) * g.spec.nx);
  for (int it = 0; it < g.spec.nt; ++it)
    for (int ix = 0; ix < g.spec.nx; ++ix)
      nodes[static_cast<std::size_t>(it) * g.spec.nx + ix] =
          g.a_at(it, ix)[field];
  return BicubicField(g.spec, nodes);
}

}  // namespace geoflow
