#pragma once

#include <cstdint>

#include "kerrfilter/trajectory.hpp"

namespace kerrfilter {

// One time step of a cavity model. All three models advance by one MZI period tau
// per step so their trajectories share a time axis.
class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual DensityMatrix step(const DensityMatrix& rho) const = 0;
  virtual double step_duration() const = 0;
};

// Runs n_steps, recording step 0, every record_every-th step and the last step.
Trajectory run_steps(const Propagator& propagator, const DensityMatrix& rho0, std::int64_t n_steps,
                     std::int64_t record_every, const StepObserver& observer = {});

}  // namespace kerrfilter
