#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kerrfilter/fock.hpp"

namespace kerrfilter {

// Recorded snapshots of an evolution. Times are strictly increasing.
struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<bool> leak_flags;
  // Human-readable warnings (first leak, perturbative-regime violations).
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
  bool any_leak() const;
  const DensityMatrix& final_state() const { return states.back(); }

  // Appends a snapshot, flags leakage and records the first leak warning.
  void record(double t, DensityMatrix rho);
};

// Called after every step (and once for the initial state with step = 0).
using StepObserver = std::function<void(std::int64_t step, double t, const DensityMatrix& rho)>;

}  // namespace kerrfilter
