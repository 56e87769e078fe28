// Continues an implicitly defined solution over its default patch, measures
// how well the grid satisfies the quasi-linear system, and evaluates the
// smooth field surface between nodes.

#include <cstdio>

#include "geoflow/flows.hpp"
#include "geoflow/hodograph.hpp"
#include "geoflow/interp.hpp"
#include "geoflow/registry.hpp"

using namespace geoflow;

int main() {
  const ExampleEntry e = get_example("ex1-implicit");
  const ImplicitPayload& pay = *e.implicit_payload;
  std::printf("%s\n%s\n\n", e.id.c_str(), e.description.c_str());

  const GridSolution sol = solve_on_grid(pay.system, pay.grid, pay.anchor_a,
                                         pay.anchor_t, pay.anchor_x);
  std::printf("patch [%g, %g] x [%g, %g], %d x %d nodes, %d converged, %d branch jumps\n",
              pay.grid.t0, pay.grid.t1, pay.grid.x0, pay.grid.x1, pay.grid.nt,
              pay.grid.nx, sol.count_converged(), sol.count_branch_jumps());

  const GridPdeReport rep = pde_residual_on_grid(sol, build_V(sol.n));
  std::printf("transport residual: max %.3g, mean %.3g over %d interior nodes\n",
              rep.max_residual, rep.mean_residual, rep.interior_nodes);

  // The top field doubles as the metric coefficient for geodesic tracing, so
  // its surface is the one worth inspecting off-node.
  const BicubicField g = field_surface(sol, sol.n - 1);
  const double t = 0.0437, x = -1.7712;
  std::printf("g(%g, %g) = %.12g  (dg/dt = %.6g, dg/dx = %.6g)\n", t, x,
              g.value(t, x), g.d_t(t, x), g.d_x(t, x));
  return 0;
}
