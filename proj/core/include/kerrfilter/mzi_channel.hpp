#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kerrfilter/fock.hpp"
#include "kerrfilter/propagator.hpp"
#include "kerrfilter/trajectory.hpp"

namespace kerrfilter::mzi {

// Above this mixing angle the second-order update rule is outside its regime.
inline constexpr double kPerturbativeChiLimit = 0.1;

// One Mach-Zehnder unit: beamsplitter exp(i chi (a^dag b + a b^dag)), Kerr evolution of
// mode a for time tau, identical beamsplitter. Mode b enters in vacuum and is traced out.
//
// chi = 0 and tau = 0 are accepted as the degenerate "no coupling" and "no
// propagation" limits.
struct MziParams {
  CavityParams cavity;
  double chi = 0.0;
  double tau = 0.0;

  MziParams() = default;
  MziParams(CavityParams cavity, double chi, double tau);
  // tau = tau_over_pi * pi / omega_a, matching how cavity lengths are usually quoted.
  static MziParams from_tau_over_pi(CavityParams cavity, double chi, double tau_over_pi);

  bool perturbative() const noexcept { return chi <= kPerturbativeChiLimit; }

  friend bool operator==(const MziParams&, const MziParams&) = default;
};

// exp(i chi (a^dag b + a b^dag)) restricted to total photon number `total`.
// Basis index j is the number of photons in mode b (n_a = total - j).
Matrix beamsplitter_block(double chi, int total);

// Full two-mode unitary in the n_a * dim_b + n_b ordering, assembled block by block.
// Blocks with total photon number above min(dim_a, dim_b) - 1 are truncated.
Matrix beamsplitter_unitary(double chi, int dim_a, int dim_b);

// Single-mode Kraus operators {M_k}. Operators that lower the photon number by
// exactly k (as every MZI operator does) are also kept in a compact column
// form that apply_channel uses.
class KrausSet {
 public:
  explicit KrausSet(std::vector<Matrix> operators);

  const std::vector<Matrix>& operators() const noexcept { return operators_; }
  std::size_t size() const noexcept { return operators_.size(); }
  Eigen::Index dim() const noexcept { return dim_; }

  // lowering()(n, k) = <n-k| M_k |n>, present when every M_k only lowers by k.
  const std::optional<Matrix>& lowering() const noexcept { return lowering_; }

  // sum_k M_k^dag M_k
  Matrix completeness() const;
  // max |sum_k M_k^dag M_k - I| over rows/cols below `below` (all when below < 0).
  double completeness_error(Eigen::Index below = -1) const;

 private:
  std::vector<Matrix> operators_;
  Eigen::Index dim_ = 0;
  std::optional<Matrix> lowering_;
};

// M_k = <k|_b U_bs (Kerr_a(tau) x I_b) U_bs |0>_b, computed per total-photon block.
KrausSet kraus_from_mzi(const MziParams& params, const HilbertSpec& spec);

// rho' = sum_k M_k rho M_k^dag, returned Hermitian.
DensityMatrix apply_channel(const DensityMatrix& rho, const KrausSet& kraus);
// Same map through dense matrix products; ignores the compact form.
DensityMatrix apply_channel_dense(const DensityMatrix& rho, const KrausSet& kraus);

class ExactChannelPropagator final : public Propagator {
 public:
  ExactChannelPropagator(const MziParams& params, const HilbertSpec& spec);

  DensityMatrix step(const DensityMatrix& rho) const override;
  double step_duration() const override { return params_.tau; }
  const KrausSet& kraus() const noexcept { return kraus_; }

 private:
  MziParams params_;
  KrausSet kraus_;
};

Trajectory evolve_exact(const DensityMatrix& rho0, const MziParams& params, std::int64_t n_steps,
                        std::int64_t record_every, const StepObserver& observer = {});

// Second-order (chi^2) update rule for one pass through the MZI, applied to every
// element rho_{n,m} with m = n - k:
//
//   rho_{n,m} <- e^{-i w_{n,m} tau} (1 - chi^2 (n + n e^{i w_{n,n-1} tau}
//                                          + m + m e^{-i w_{m,m-1} tau})) rho_{n,m}
//             + e^{-i w_{n+1,m+1} tau} chi^2 sqrt((n+1)(m+1))
//               (1 + e^{i w_{n+1,n} tau} + e^{-i w_{m+1,m} tau}
//                  + e^{i (w_{n+1,n} - w_{m+1,m}) tau}) rho_{n+1,m+1}
class UpdateRule final : public Propagator {
 public:
  UpdateRule(const MziParams& params, const HilbertSpec& spec);

  DensityMatrix step(const DensityMatrix& rho) const override;
  double step_duration() const override { return params_.tau; }

  const Matrix& retained() const noexcept { return retained_; }
  const Matrix& gain() const noexcept { return gain_; }

 private:
  MziParams params_;
  HilbertSpec spec_;
  Matrix retained_;
  Matrix gain_;
};

DensityMatrix update_rule_step(const DensityMatrix& rho, const MziParams& params);

Trajectory evolve_update_rule(const DensityMatrix& rho0, const MziParams& params,
                              std::int64_t n_steps, std::int64_t record_every,
                              const StepObserver& observer = {});

}  // namespace kerrfilter::mzi
