#include "kerrfilter/fock.hpp"

#include <cmath>
#include <string>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/linalg.hpp"

namespace kerrfilter {

HilbertSpec::HilbertSpec(int n_max_, double leak_tol_) : n_max(n_max_), leak_tol(leak_tol_) {
  if (n_max < 1) {
    throw InvalidArgument("HilbertSpec: n_max must be >= 1, got " + std::to_string(n_max));
  }
  if (!(leak_tol > 0.0 && leak_tol < 1.0)) {
    throw InvalidArgument("HilbertSpec: leak_tol must lie in (0, 1)");
  }
}

int default_cutoff(double alpha_abs) {
  const double a = std::abs(alpha_abs);
  return static_cast<int>(std::ceil(a * a + 5.0 * a + 10.0));
}

CavityParams::CavityParams(double omega_a_, double beta_) : omega_a(omega_a_), beta(beta_) {
  if (!(omega_a > 0.0) || !std::isfinite(omega_a)) {
    throw InvalidArgument("CavityParams: omega_a must be positive and finite");
  }
  if (!std::isfinite(beta)) throw InvalidArgument("CavityParams: beta must be finite");
}

double kerr_energy(const CavityParams& cavity, int n) {
  const double nd = n;
  return cavity.omega_a * nd + cavity.beta * cavity.omega_a * nd * (nd - 1.0);
}

// ---------------------------------------------------------------------------

StateVector::StateVector(const HilbertSpec& spec, Vector amplitudes)
    : spec_(spec), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != spec_.dim()) {
    throw DimensionMismatch(spec_.dimension(), static_cast<std::size_t>(amplitudes_.size()),
                            "StateVector amplitudes");
  }
  const double norm = amplitudes_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("StateVector: amplitudes have zero or non-finite norm");
  }
  amplitudes_ /= norm;
}

StateVector StateVector::fock(const HilbertSpec& spec, int n) {
  if (n < 0 || n > spec.n_max) {
    throw InvalidArgument("Fock state |" + std::to_string(n) + "> outside the truncated space");
  }
  Vector v = Vector::Zero(spec.dim());
  v[n] = 1.0;
  return StateVector(spec, std::move(v));
}

DensityMatrix StateVector::density() const { return DensityMatrix::from_pure(*this); }

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(const HilbertSpec& spec, Matrix entries)
    : spec_(spec), entries_(std::move(entries)) {
  if (entries_.rows() != spec_.dim() || entries_.cols() != spec_.dim()) {
    throw DimensionMismatch(spec_.dimension(),
                            static_cast<std::size_t>(std::max(entries_.rows(), entries_.cols())),
                            "DensityMatrix entries");
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  const Vector& c = psi.amplitudes();
  Matrix rho = c * c.adjoint();
  return DensityMatrix(psi.spec(), std::move(rho)).hermitized();
}

DensityMatrix DensityMatrix::mixture(const HilbertSpec& spec,
                                     const std::vector<StateVector>& states,
                                     const std::vector<double>& weights) {
  if (states.empty() || states.size() != weights.size()) {
    throw InvalidArgument("mixture: need one non-negative weight per state");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("mixture: weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("mixture: weights sum to zero");
  Matrix rho = Matrix::Zero(spec.dim(), spec.dim());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != spec.dim()) {
      throw DimensionMismatch(spec.dimension(), static_cast<std::size_t>(states[i].dim()),
                              "mixture component");
    }
    rho += (weights[i] / total) * (states[i].amplitudes() * states[i].amplitudes().adjoint());
  }
  return DensityMatrix(spec, std::move(rho)).hermitized();
}

double DensityMatrix::trace() const { return entries_.trace().real(); }

double DensityMatrix::edge_population() const {
  const Eigen::Index top = dim() - 1;
  double edge = std::abs(entries_(top, top).real());
  if (top >= 1) edge = std::max(edge, std::abs(entries_(top - 1, top - 1).real()));
  return edge;
}

double DensityMatrix::hermiticity_error() const {
  return linalg::max_abs(entries_ - entries_.adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  return linalg::hermitian_eigenvalues(entries_).minCoeff();
}

DensityMatrix DensityMatrix::hermitized() const {
  Matrix h = 0.5 * (entries_ + entries_.adjoint());
  return DensityMatrix(spec_, std::move(h));
}

// ---------------------------------------------------------------------------

LadderOperators ladder_operators(const HilbertSpec& spec) {
  const Eigen::Index d = spec.dim();
  LadderOperators ops{Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
  for (Eigen::Index n = 1; n < d; ++n) {
    ops.annihilation(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  ops.creation = ops.annihilation.adjoint();
  for (Eigen::Index n = 0; n < d; ++n) ops.number(n, n) = static_cast<double>(n);
  return ops;
}

Vector kerr_phases(const HilbertSpec& spec, const CavityParams& cavity, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("kerr_unitary: t must be finite");
  Vector phases(spec.dim());
  for (Eigen::Index n = 0; n < spec.dim(); ++n) {
    phases[n] = std::polar(1.0, -kerr_energy(cavity, static_cast<int>(n)) * t);
  }
  return phases;
}

Matrix kerr_unitary(const HilbertSpec& spec, const CavityParams& cavity, double t) {
  return kerr_phases(spec, cavity, t).asDiagonal();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix partial_trace_b(const Matrix& rho_ab, const HilbertSpec& spec_a,
                              const HilbertSpec& spec_b) {
  const Eigen::Index da = spec_a.dim();
  const Eigen::Index db = spec_b.dim();
  if (rho_ab.rows() != da * db || rho_ab.cols() != da * db) {
    throw DimensionMismatch(static_cast<std::size_t>(da * db),
                            static_cast<std::size_t>(rho_ab.rows()), "partial_trace_b input");
  }
  Matrix out = Matrix::Zero(da, da);
  for (Eigen::Index m = 0; m < da; ++m) {
    for (Eigen::Index n = 0; n < da; ++n) {
      cplx acc = 0.0;
      for (Eigen::Index k = 0; k < db; ++k) acc += rho_ab(n * db + k, m * db + k);
      out(n, m) = acc;
    }
  }
  return DensityMatrix(spec_a, std::move(out));
}

}  // namespace kerrfilter
