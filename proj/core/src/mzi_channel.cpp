#include "kerrfilter/mzi_channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/linalg.hpp"

namespace kerrfilter::mzi {

MziParams::MziParams(CavityParams cavity_, double chi_, double tau_)
    : cavity(cavity_), chi(chi_), tau(tau_) {
  if (!(chi >= 0.0 && chi < std::numbers::pi / 2)) {
    throw InvalidArgument("MziParams: chi must lie in [0, pi/2), got " + std::to_string(chi));
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("MziParams: tau must be finite and non-negative");
  }
}

MziParams MziParams::from_tau_over_pi(CavityParams cavity, double chi, double tau_over_pi) {
  return MziParams(cavity, chi, tau_over_pi * std::numbers::pi / cavity.omega_a);
}

// ---------------------------------------------------------------------------

namespace {

// a^dag b + a b^dag on the states j = n_b in [lo, hi] with n_a = total - j.
Matrix hopping_block(int total, int lo, int hi) {
  const int size = hi - lo + 1;
  Matrix h = Matrix::Zero(size, size);
  for (int j = lo; j < hi; ++j) {
    // a b^dag |total - j, j> = sqrt((total - j)(j + 1)) |total - j - 1, j + 1>
    const double c = std::sqrt(static_cast<double>(total - j) * static_cast<double>(j + 1));
    h(j - lo + 1, j - lo) = c;
    h(j - lo, j - lo + 1) = c;
  }
  return h;
}

}  // namespace

Matrix beamsplitter_block(double chi, int total) {
  if (total < 0) throw InvalidArgument("beamsplitter_block: negative photon number");
  return linalg::expi_hermitian(chi * hopping_block(total, 0, total));
}

Matrix beamsplitter_unitary(double chi, int dim_a, int dim_b) {
  if (dim_a < 2 || dim_b < 2) throw InvalidArgument("beamsplitter_unitary: dims must be >= 2");
  const Eigen::Index full = static_cast<Eigen::Index>(dim_a) * dim_b;
  Matrix u = Matrix::Zero(full, full);
  for (int total = 0; total <= (dim_a - 1) + (dim_b - 1); ++total) {
    const int lo = std::max(0, total - (dim_a - 1));
    const int hi = std::min(total, dim_b - 1);
    const Matrix block = linalg::expi_hermitian(chi * hopping_block(total, lo, hi));
    for (int r = lo; r <= hi; ++r) {
      for (int c = lo; c <= hi; ++c) {
        const Eigen::Index row = static_cast<Eigen::Index>(total - r) * dim_b + r;
        const Eigen::Index col = static_cast<Eigen::Index>(total - c) * dim_b + c;
        u(row, col) = block(r - lo, c - lo);
      }
    }
  }
  return u;
}

// ---------------------------------------------------------------------------

KrausSet::KrausSet(std::vector<Matrix> operators) : operators_(std::move(operators)) {
  if (operators_.empty()) throw InvalidArgument("KrausSet: no operators");
  dim_ = operators_.front().rows();
  for (const Matrix& m : operators_) {
    if (m.rows() != dim_ || m.cols() != dim_) {
      throw DimensionMismatch(static_cast<std::size_t>(dim_),
                              static_cast<std::size_t>(std::max(m.rows(), m.cols())),
                              "KrausSet operator");
    }
  }
  if (static_cast<Eigen::Index>(operators_.size()) > dim_) return;

  Matrix lowering = Matrix::Zero(dim_, dim_);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(operators_.size()); ++k) {
    const Matrix& m = operators_[static_cast<std::size_t>(k)];
    for (Eigen::Index c = 0; c < dim_; ++c) {
      for (Eigen::Index r = 0; r < dim_; ++r) {
        if (r == c - k) {
          lowering(c, k) = m(r, c);
        } else if (m(r, c) != cplx(0.0, 0.0)) {
          return;
        }
      }
    }
  }
  lowering_ = std::move(lowering);
}

Matrix KrausSet::completeness() const {
  Matrix sum = Matrix::Zero(dim_, dim_);
  for (const Matrix& m : operators_) sum.noalias() += m.adjoint() * m;
  return sum;
}

double KrausSet::completeness_error(Eigen::Index below) const {
  const Eigen::Index n = (below < 0) ? dim_ : std::min(below, dim_);
  const Matrix diff = completeness() - Matrix::Identity(dim_, dim_);
  return linalg::max_abs(diff.topLeftCorner(n, n));
}

KrausSet kraus_from_mzi(const MziParams& params, const HilbertSpec& spec) {
  const Eigen::Index dim = spec.dim();
  // Mode b enters in vacuum, so the input |n, 0> lives in the total-n block, which is
  // complete whenever mode b has the same cutoff as mode a.
  std::vector<Matrix> ops(static_cast<std::size_t>(dim), Matrix::Zero(dim, dim));
  for (int total = 0; total <= spec.n_max; ++total) {
    const Matrix u = beamsplitter_block(params.chi, total);
    Vector kerr(total + 1);
    for (int j = 0; j <= total; ++j) {
      kerr[j] = std::polar(1.0, -kerr_energy(params.cavity, total - j) * params.tau);
    }
    const Vector out = u * kerr.cwiseProduct(u.col(0));
    for (int k = 0; k <= total; ++k) {
      ops[static_cast<std::size_t>(k)](total - k, total) = out[k];
    }
  }
  return KrausSet(std::move(ops));
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausSet& kraus) {
  if (rho.dim() != kraus.dim()) {
    throw DimensionMismatch(static_cast<std::size_t>(kraus.dim()),
                            static_cast<std::size_t>(rho.dim()), "apply_channel");
  }
  if (!kraus.lowering()) return apply_channel_dense(rho, kraus);

  const Matrix& low = *kraus.lowering();
  const Matrix& in = rho.matrix();
  const Eigen::Index d = rho.dim();
  const Eigen::Index n_ops = static_cast<Eigen::Index>(kraus.size());
  Matrix out = Matrix::Zero(d, d);
  // (M_k rho M_k^dag)_{ij} = L(i+k,k) rho(i+k,j+k) conj(L(j+k,k)); lower triangle only.
  for (Eigen::Index k = 0; k < n_ops; ++k) {
    const cplx* w = low.col(k).data();
    for (Eigen::Index j = 0; j + k < d; ++j) {
      const cplx wj = std::conj(w[j + k]);
      if (wj == cplx(0.0, 0.0)) continue;
      const cplx* src = in.col(j + k).data() + k;
      cplx* dst = out.col(j).data();
      for (Eigen::Index i = j; i + k < d; ++i) dst[i] += w[i + k] * src[i] * wj;
    }
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    out(j, j) = out(j, j).real();
    for (Eigen::Index i = j + 1; i < d; ++i) out(j, i) = std::conj(out(i, j));
  }
  return DensityMatrix(rho.spec(), std::move(out));
}

DensityMatrix apply_channel_dense(const DensityMatrix& rho, const KrausSet& kraus) {
  if (rho.dim() != kraus.dim()) {
    throw DimensionMismatch(static_cast<std::size_t>(kraus.dim()),
                            static_cast<std::size_t>(rho.dim()), "apply_channel_dense");
  }
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const Matrix& m : kraus.operators()) out.noalias() += m * rho.matrix() * m.adjoint();
  return DensityMatrix(rho.spec(), std::move(out)).hermitized();
}

ExactChannelPropagator::ExactChannelPropagator(const MziParams& params, const HilbertSpec& spec)
    : params_(params), kraus_(kraus_from_mzi(params, spec)) {}

DensityMatrix ExactChannelPropagator::step(const DensityMatrix& rho) const {
  return apply_channel(rho, kraus_);
}

Trajectory evolve_exact(const DensityMatrix& rho0, const MziParams& params, std::int64_t n_steps,
                        std::int64_t record_every, const StepObserver& observer) {
  const ExactChannelPropagator prop(params, rho0.spec());
  return run_steps(prop, rho0, n_steps, record_every, observer);
}

// ---------------------------------------------------------------------------

UpdateRule::UpdateRule(const MziParams& params, const HilbertSpec& spec)
    : params_(params), spec_(spec) {
  const Eigen::Index d = spec.dim();
  const double tau = params.tau;
  const double chi2 = params.chi * params.chi;
  const auto energy = [&](Eigen::Index n) { return kerr_energy(params.cavity, static_cast<int>(n)); };
  const auto phase = [](double x) { return std::polar(1.0, x); };
  // theta(n) = w_{n,n-1} tau, only used with a factor n, so theta(0) is irrelevant.
  std::vector<double> theta(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index n = 1; n < d; ++n) {
    theta[static_cast<std::size_t>(n)] = (energy(n) - energy(n - 1)) * tau;
  }
  const auto th = [&](Eigen::Index n) { return theta[static_cast<std::size_t>(n)]; };

  retained_ = Matrix::Zero(d, d);
  gain_ = Matrix::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      const double nd = static_cast<double>(n);
      const double md = static_cast<double>(m);
      const cplx loss = nd + nd * phase(th(n)) + md + md * phase(-th(m));
      retained_(n, m) = phase(-(energy(n) - energy(m)) * tau) * (1.0 - chi2 * loss);
      if (n + 1 < d && m + 1 < d) {
        const cplx interference = 1.0 + phase(th(n + 1)) + phase(-th(m + 1)) +
                                  phase(th(n + 1) - th(m + 1));
        gain_(n, m) = phase(-(energy(n + 1) - energy(m + 1)) * tau) * chi2 *
                      std::sqrt((nd + 1.0) * (md + 1.0)) * interference;
      }
    }
  }
}

DensityMatrix UpdateRule::step(const DensityMatrix& rho) const {
  if (rho.dim() != spec_.dim()) {
    throw DimensionMismatch(spec_.dimension(), static_cast<std::size_t>(rho.dim()),
                            "UpdateRule::step");
  }
  const Eigen::Index d = rho.dim();
  Matrix out = retained_.cwiseProduct(rho.matrix());
  if (d > 1) {
    out.topLeftCorner(d - 1, d - 1) +=
        gain_.topLeftCorner(d - 1, d - 1).cwiseProduct(rho.matrix().bottomRightCorner(d - 1, d - 1));
  }
  return DensityMatrix(rho.spec(), std::move(out)).hermitized();
}

DensityMatrix update_rule_step(const DensityMatrix& rho, const MziParams& params) {
  return UpdateRule(params, rho.spec()).step(rho);
}

Trajectory evolve_update_rule(const DensityMatrix& rho0, const MziParams& params,
                              std::int64_t n_steps, std::int64_t record_every,
                              const StepObserver& observer) {
  const UpdateRule rule(params, rho0.spec());
  Trajectory traj = run_steps(rule, rho0, n_steps, record_every, observer);
  if (!params.perturbative()) {
    traj.warnings.insert(traj.warnings.begin(),
                         "chi = " + std::to_string(params.chi) +
                             " exceeds 0.1; the second-order update rule is unreliable");
  }
  return traj;
}

}  // namespace kerrfilter::mzi
