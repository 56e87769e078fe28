// Pulls a cataloged metric and its cubic integral, spot-checks that the
// Poisson bracket with the Hamiltonian vanishes, and prints the curvature
// and the linear-integral verdict for the same metric.

#include <array>
#include <cstdio>
#include <vector>

#include "geoflow/criteria.hpp"
#include "geoflow/geometry.hpp"
#include "geoflow/registry.hpp"
#include "geoflow/rng.hpp"

using namespace geoflow;

int main() {
  const ExampleEntry e = get_example("ex2-explicit");
  const ExplicitPayload& pay = *e.explicit_payload;
  std::printf("%s\n%s\n\n", e.id.c_str(), e.description.c_str());

  const BracketResidual residual(pay.integral, hamiltonian(pay.metric));
  Rng rng(7);
  double worst = 0.0;
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i < 200; ++i) {
    pts.push_back({rng.uniform(pay.box.x0, pay.box.x1),
                   rng.uniform(pay.box.y0, pay.box.y1)});
    worst = std::max(worst, residual(pts.back()[0], pts.back()[1]));
  }
  std::printf("max bracket residual over 200 box points: %.3g\n", worst);

  const Expr k = gauss_curvature(pay.metric);
  std::printf("gauss curvature at (0.5, 2.4): %.12g\n",
              evaluate(k, {{"x", 0.5}, {"y", 2.4}}));

  const CriterionReport rep = criterion_determinants(pay.metric, pts);
  std::printf("linear-integral criterion: %s (%.0f%% of points exceed)\n",
              verdict_name(rep.verdict).c_str(),
              100.0 * rep.exceeding_fraction);
  return 0;
}
