#pragma once

#include <cstdint>
#include <vector>

#include "kerrfilter/fock.hpp"
#include "kerrfilter/mzi_channel.hpp"
#include "kerrfilter/propagator.hpp"
#include "kerrfilter/trajectory.hpp"

namespace kerrfilter::master {

// Continuous-time counterpart of the MZI chain. Rates are per unit time with one
// MZI pass lasting tau, so K1 / tau is the rate that enters the equation of motion.
struct LossModel {
  CavityParams cavity;
  double chi = 0.0;
  double tau = 0.0;

  explicit LossModel(const mzi::MziParams& params);
};

struct StabilizationReport {
  // pi / (omega_a beta tau)
  double delta_n = 0.0;
  bool is_integer_comb = false;
  // (n0, m) with omega_a tau (1 + 2 beta (n0 - 1)) = pi + 2 pi m.
  std::vector<std::pair<int, long long>> n0_solutions;
};

// omega_{n,n-k} = (E_n - E_{n-k}) / hbar. Throws InvalidArgument unless n >= k >= 0.
double transition_frequency(const CavityParams& cavity, int n, int k);

// K1(omega) = chi^2 (1 + exp(i omega tau))
cplx loss_function_k1(double omega, const LossModel& model);

// Decay rate of rho_{n,n-k} per MZI period:
// chi^2 n (1 + cos(w_{n,n-1} tau)) + chi^2 (n-k) (1 + cos(w_{n-k,n-k-1} tau)).
double loss_rate(int n, int k, const LossModel& model);

StabilizationReport stabilization_report(const LossModel& model, int n_range);

// d rho / dt, element-wise over the whole matrix (m = n - k with k of either sign):
//   -i w_{n,m} rho_{n,m} - (n K1(w_{n,n-1}) + m K1*(w_{m,m-1})) / tau rho_{n,m}
//   + sqrt((n+1)(m+1)) (K1(w_{n+1,n}) + K1*(w_{m+1,m})) / tau rho_{n+1,m+1}
// The gain from beyond n_max is omitted.
Matrix rhs_eq2(const DensityMatrix& rho, const LossModel& model);

// Fixed-step fourth-order Runge-Kutta in the frame rotating with the free Kerr
// frequencies. The free part is integrated exactly, which keeps the step stable when
// omega_{n,m} dt is large (as it is for cavities hundreds of optical periods long).
class Rk4Stepper {
 public:
  Rk4Stepper(const LossModel& model, const HilbertSpec& spec, double dt);

  DensityMatrix advance(const DensityMatrix& rho) const;
  double dt() const noexcept { return dt_; }

 private:
  Matrix apply_dissipator(const Matrix& x, const Matrix& gain) const;

  HilbertSpec spec_;
  double dt_;
  Matrix loss_;        // (n K1(w_{n,n-1}) + m K1*(w_{m,m-1})) / tau
  Matrix gain_half_;   // gain coefficients rotated to s = dt/2
  Matrix gain_full_;   // gain coefficients rotated to s = dt
  Matrix gain_zero_;
  Matrix free_phase_;  // exp(-i w_{n,m} dt)
};

// Advances one MZI period tau with `substeps` Runge-Kutta steps.
class MasterEqPropagator final : public Propagator {
 public:
  MasterEqPropagator(const LossModel& model, const HilbertSpec& spec, int substeps = 20);

  DensityMatrix step(const DensityMatrix& rho) const override;
  double step_duration() const override { return tau_; }

 private:
  double tau_;
  int substeps_;
  Rk4Stepper stepper_;
};

// Integrates from t = 0 to t_end with fixed step dt <= tau / 10. t_end must be an
// integer multiple of dt. Snapshots every record_every steps and at t_end.
Trajectory integrate(const DensityMatrix& rho0, const LossModel& model, double t_end, double dt,
                     std::int64_t record_every, const StepObserver& observer = {});

}  // namespace kerrfilter::master
