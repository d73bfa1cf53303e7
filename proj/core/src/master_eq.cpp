#include "kerrfilter/master_eq.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kerrfilter/errors.hpp"

namespace kerrfilter::master {

namespace {

constexpr double kPi = std::numbers::pi;

// w_{n,n-1}; only ever multiplied by n, so n = 0 returns 0.
double step_frequency(const CavityParams& cavity, Eigen::Index n) {
  if (n <= 0) return 0.0;
  return kerr_energy(cavity, static_cast<int>(n)) - kerr_energy(cavity, static_cast<int>(n - 1));
}

double free_frequency(const CavityParams& cavity, Eigen::Index n, Eigen::Index m) {
  return kerr_energy(cavity, static_cast<int>(n)) - kerr_energy(cavity, static_cast<int>(m));
}

struct Coefficients {
  Matrix loss;  // total loss coefficient of rho_{n,m}
  Matrix gain;  // coefficient multiplying rho_{n+1,m+1}
};

Coefficients dissipator_coefficients(const LossModel& model, Eigen::Index d) {
  Coefficients c{Matrix::Zero(d, d), Matrix::Zero(d, d)};
  std::vector<cplx> k1(static_cast<std::size_t>(d + 1));
  for (Eigen::Index n = 0; n <= d; ++n) {
    k1[static_cast<std::size_t>(n)] = loss_function_k1(step_frequency(model.cavity, n), model);
  }
  const auto K = [&](Eigen::Index n) { return k1[static_cast<std::size_t>(n)]; };
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      const double nd = static_cast<double>(n);
      const double md = static_cast<double>(m);
      c.loss(n, m) = (nd * K(n) + md * std::conj(K(m))) / model.tau;
      if (n + 1 < d && m + 1 < d) {
        c.gain(n, m) = std::sqrt((nd + 1.0) * (md + 1.0)) * (K(n + 1) + std::conj(K(m + 1))) /
                       model.tau;
      }
    }
  }
  return c;
}

}  // namespace

LossModel::LossModel(const mzi::MziParams& params)
    : cavity(params.cavity), chi(params.chi), tau(params.tau) {}

double transition_frequency(const CavityParams& cavity, int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw InvalidArgument("transition_frequency needs n >= k >= 0, got n=" + std::to_string(n) +
                          ", k=" + std::to_string(k));
  }
  return kerr_energy(cavity, n) - kerr_energy(cavity, n - k);
}

cplx loss_function_k1(double omega, const LossModel& model) {
  return model.chi * model.chi * (1.0 + std::polar(1.0, omega * model.tau));
}

double loss_rate(int n, int k, const LossModel& model) {
  if (n < 0 || k < 0 || k > n) {
    throw InvalidArgument("loss_rate needs n >= k >= 0");
  }
  const double chi2 = model.chi * model.chi;
  const double wt = model.cavity.omega_a * model.tau;
  const double beta = model.cavity.beta;
  const auto term = [&](int p) {
    if (p == 0) return 0.0;
    return chi2 * p * (1.0 + std::cos(wt * (1.0 + 2.0 * beta * (p - 1))));
  };
  return term(n) + term(n - k);
}

StabilizationReport stabilization_report(const LossModel& model, int n_range) {
  if (n_range < 0) throw InvalidArgument("stabilization_report: n_range must be >= 0");
  StabilizationReport report;
  const double wt = model.cavity.omega_a * model.tau;
  const double phase = model.cavity.omega_a * model.cavity.beta * model.tau;
  report.delta_n = kPi / phase;
  report.is_integer_comb = std::isfinite(report.delta_n) &&
                           std::abs(report.delta_n - std::round(report.delta_n)) < 1e-9;
  for (int n0 = 0; n0 <= n_range; ++n0) {
    const double lhs = wt * (1.0 + 2.0 * model.cavity.beta * (n0 - 1));
    const double m = std::round((lhs - kPi) / (2.0 * kPi));
    const double rhs = kPi + 2.0 * kPi * m;
    if (std::abs(lhs - rhs) <= 1e-9 * std::max(std::abs(lhs), 1.0)) {
      report.n0_solutions.emplace_back(n0, static_cast<long long>(m));
    }
  }
  return report;
}

Matrix rhs_eq2(const DensityMatrix& rho, const LossModel& model) {
  if (!(model.tau > 0.0)) throw InvalidArgument("rhs_eq2: tau must be positive");
  const Eigen::Index d = rho.dim();
  const Coefficients c = dissipator_coefficients(model, d);
  const Matrix& r = rho.matrix();
  Matrix out(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      const double w = free_frequency(model.cavity, n, m);
      cplx v = cplx(0.0, -w) * r(n, m) - c.loss(n, m) * r(n, m);
      if (n + 1 < d && m + 1 < d) v += c.gain(n, m) * r(n + 1, m + 1);
      out(n, m) = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Rk4Stepper::Rk4Stepper(const LossModel& model, const HilbertSpec& spec, double dt)
    : spec_(spec), dt_(dt) {
  if (!(model.tau > 0.0)) throw InvalidArgument("Rk4Stepper: tau must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("Rk4Stepper: dt must be positive");
  const Eigen::Index d = spec.dim();
  Coefficients c = dissipator_coefficients(model, d);
  loss_ = std::move(c.loss);
  gain_zero_ = std::move(c.gain);
  gain_half_ = gain_zero_;
  gain_full_ = gain_zero_;
  free_phase_.resize(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      free_phase_(n, m) = std::polar(1.0, -free_frequency(model.cavity, n, m) * dt);
      if (n + 1 < d && m + 1 < d) {
        // In the rotating frame rho_{n+1,m+1} feeds rho_{n,m} with the beat
        // exp(i (w_{n,m} - w_{n+1,m+1}) s).
        const double beat =
            free_frequency(model.cavity, n, m) - free_frequency(model.cavity, n + 1, m + 1);
        gain_half_(n, m) *= std::polar(1.0, beat * 0.5 * dt);
        gain_full_(n, m) *= std::polar(1.0, beat * dt);
      }
    }
  }
}

Matrix Rk4Stepper::apply_dissipator(const Matrix& x, const Matrix& gain) const {
  const Eigen::Index d = x.rows();
  Matrix out = -loss_.cwiseProduct(x);
  if (d > 1) {
    out.topLeftCorner(d - 1, d - 1) +=
        gain.topLeftCorner(d - 1, d - 1).cwiseProduct(x.bottomRightCorner(d - 1, d - 1));
  }
  return out;
}

DensityMatrix Rk4Stepper::advance(const DensityMatrix& rho) const {
  if (rho.dim() != spec_.dim()) {
    throw DimensionMismatch(spec_.dimension(), static_cast<std::size_t>(rho.dim()),
                            "Rk4Stepper::advance");
  }
  const Matrix& x0 = rho.matrix();
  const double h = dt_;
  const Matrix k1 = apply_dissipator(x0, gain_zero_);
  const Matrix k2 = apply_dissipator(x0 + (0.5 * h) * k1, gain_half_);
  const Matrix k3 = apply_dissipator(x0 + (0.5 * h) * k2, gain_half_);
  const Matrix k4 = apply_dissipator(x0 + h * k3, gain_full_);
  Matrix next = x0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next = free_phase_.cwiseProduct(next);
  return DensityMatrix(rho.spec(), std::move(next)).hermitized();
}

MasterEqPropagator::MasterEqPropagator(const LossModel& model, const HilbertSpec& spec,
                                       int substeps)
    : tau_(model.tau),
      substeps_(substeps),
      stepper_(model, spec, substeps > 0 ? model.tau / substeps : 0.0) {
  if (substeps < 10) {
    throw InvalidArgument("MasterEqPropagator: need at least 10 substeps per tau (dt <= tau/10)");
  }
}

DensityMatrix MasterEqPropagator::step(const DensityMatrix& rho) const {
  DensityMatrix out = stepper_.advance(rho);
  for (int s = 1; s < substeps_; ++s) out = stepper_.advance(out);
  return out;
}

Trajectory integrate(const DensityMatrix& rho0, const LossModel& model, double t_end, double dt,
                     std::int64_t record_every, const StepObserver& observer) {
  if (!(t_end >= 0.0)) throw InvalidArgument("integrate: t_end must be >= 0");
  if (!(dt > 0.0) || dt > model.tau / 10.0 * (1.0 + 1e-12)) {
    throw InvalidArgument("integrate: dt must lie in (0, tau/10]");
  }
  if (record_every < 1) throw InvalidArgument("integrate: record_every must be >= 1");
  const auto n_steps = static_cast<std::int64_t>(std::llround(t_end / dt));
  if (std::abs(static_cast<double>(n_steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
    throw InvalidArgument("integrate: t_end must be an integer multiple of dt");
  }
  const Rk4Stepper stepper(model, rho0.spec(), dt);
  Trajectory traj;
  traj.record(0.0, rho0);
  if (observer) observer(0, 0.0, rho0);
  DensityMatrix rho = rho0;
  for (std::int64_t i = 1; i <= n_steps; ++i) {
    rho = stepper.advance(rho);
    const double t = static_cast<double>(i) * dt;
    if (observer) observer(i, t, rho);
    if (i % record_every == 0 || i == n_steps) traj.record(t, rho);
  }
  return traj;
}

}  // namespace kerrfilter::master
