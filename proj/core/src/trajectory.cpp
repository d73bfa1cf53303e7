#include <algorithm>
#include <sstream>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/propagator.hpp"
#include "kerrfilter/trajectory.hpp"

namespace kerrfilter {

bool Trajectory::any_leak() const {
  return std::any_of(leak_flags.begin(), leak_flags.end(), [](bool b) { return b; });
}

void Trajectory::record(double t, DensityMatrix rho) {
  if (!times.empty() && !(t > times.back())) {
    throw InvalidArgument("Trajectory::record: times must be strictly increasing");
  }
  const bool leak = rho.leaking();
  if (leak && !any_leak()) {
    std::ostringstream msg;
    msg << "truncation edge population " << rho.edge_population() << " exceeds leak_tol "
        << rho.spec().leak_tol << " at t=" << t;
    warnings.push_back(msg.str());
  }
  times.push_back(t);
  states.push_back(std::move(rho));
  leak_flags.push_back(leak);
}

Trajectory run_steps(const Propagator& propagator, const DensityMatrix& rho0, std::int64_t n_steps,
                     std::int64_t record_every, const StepObserver& observer) {
  if (n_steps < 0) throw InvalidArgument("run_steps: n_steps must be >= 0");
  if (record_every < 1) throw InvalidArgument("run_steps: record_every must be >= 1");
  const double dt = propagator.step_duration();
  if (!(dt > 0.0)) throw InvalidArgument("run_steps: step duration must be positive");
  Trajectory traj;
  traj.record(0.0, rho0);
  if (observer) observer(0, 0.0, rho0);
  DensityMatrix rho = rho0;
  for (std::int64_t j = 1; j <= n_steps; ++j) {
    rho = propagator.step(rho);
    const double t = static_cast<double>(j) * dt;
    if (observer) observer(j, t, rho);
    if (j % record_every == 0 || j == n_steps) traj.record(t, rho);
  }
  return traj;
}

}  // namespace kerrfilter
