// Traces a geodesic of a cataloged metric while monitoring the Hamiltonian
// and the quintic integral along it, then prints a few trajectory samples
// and the observed conservation drift.

#include <cstdio>

#include "geoflow/geodesic.hpp"
#include "geoflow/registry.hpp"

using namespace geoflow;

int main() {
  const ExampleEntry e = get_example("ex9-explicit");
  const ExplicitPayload& pay = *e.explicit_payload;
  std::printf("%s\n%s\n\n", e.id.c_str(), e.description.c_str());

  IntegrateOptions opt;
  opt.monitors = {pay.integral};
  opt.guards = pay.singular_loci;
  const PhasePoint start{0.0, 0.0, 1.0, 0.5};
  const GeodesicTrajectory traj = integrate(pay.metric, start, 1.0, opt);

  std::printf("%10s %14s %14s %16s %16s\n", "t", "u1", "u2", "H", "F");
  for (std::size_t i = 0; i < traj.times.size(); i += 33) {
    const PhasePoint& s = traj.states[i];
    std::printf("%10.4f %14.8f %14.8f %16.12f %16.12f\n", traj.times[i], s.u1,
                s.u2, traj.hamiltonian_values[i], traj.integral_values[0][i]);
  }

  std::printf("\n%zu samples, %zu accepted / %zu rejected steps\n",
              traj.times.size(), traj.accepted_steps, traj.rejected_steps);
  std::printf("H drift %.3g, F drift %.3g\n",
              GeodesicTrajectory::drift_of(traj.hamiltonian_values),
              GeodesicTrajectory::drift_of(traj.integral_values[0]));
  if (traj.early_termination)
    std::printf("stopped early: %s\n", traj.termination_reason.c_str());
  return 0;
}
