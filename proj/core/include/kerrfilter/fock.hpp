#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace kerrfilter {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultLeakTol = 1e-8;

// Truncated single-mode Fock space |0>..|n_max>.
struct HilbertSpec {
  int n_max = 1;
  double leak_tol = kDefaultLeakTol;

  HilbertSpec() = default;
  explicit HilbertSpec(int n_max, double leak_tol = kDefaultLeakTol);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(n_max) + 1; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(n_max) + 1; }

  friend bool operator==(const HilbertSpec&, const HilbertSpec&) = default;
};

// n_max = ceil(|alpha|^2 + 5|alpha| + 10), the cutoff used for coherent-family states.
int default_cutoff(double alpha_abs);

// Single-mode cavity: H0/hbar = omega_a a^dag a + beta omega_a a^dag^2 a^2.
struct CavityParams {
  double omega_a = 1.0;
  double beta = 0.0;

  CavityParams() = default;
  CavityParams(double omega_a, double beta);

  friend bool operator==(const CavityParams&, const CavityParams&) = default;
};

// E_n / hbar for the Kerr cavity.
double kerr_energy(const CavityParams& cavity, int n);

class DensityMatrix;

// Normalized pure state in the Fock basis.
class StateVector {
 public:
  // Normalizes the amplitudes; throws InvalidArgument on zero norm or size mismatch.
  StateVector(const HilbertSpec& spec, Vector amplitudes);

  static StateVector fock(const HilbertSpec& spec, int n);

  const HilbertSpec& spec() const noexcept { return spec_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  cplx operator[](Eigen::Index n) const { return amplitudes_[n]; }

  DensityMatrix density() const;

 private:
  HilbertSpec spec_;
  Vector amplitudes_;
};

// Cavity density matrix. Dimension is checked on construction; Hermiticity, trace
// and positivity are tracked by the operations that return one.
class DensityMatrix {
 public:
  DensityMatrix(const HilbertSpec& spec, Matrix entries);

  static DensityMatrix from_pure(const StateVector& psi);
  // Weighted mixture of pure states; weights are renormalized to sum to one.
  static DensityMatrix mixture(const HilbertSpec& spec, const std::vector<StateVector>& states,
                               const std::vector<double>& weights);

  const HilbertSpec& spec() const noexcept { return spec_; }
  const Matrix& matrix() const noexcept { return entries_; }
  Eigen::Index dim() const noexcept { return entries_.rows(); }
  cplx operator()(Eigen::Index n, Eigen::Index m) const { return entries_(n, m); }

  double trace() const;
  double population(Eigen::Index n) const { return entries_(n, n).real(); }
  // Largest population among the two top Fock levels. Two levels so that
  // parity-restricted states are still monitored when n_max has the wrong parity.
  double edge_population() const;
  bool leaking() const { return edge_population() > spec_.leak_tol; }

  double hermiticity_error() const;
  double min_eigenvalue() const;

  // (rho + rho^dag) / 2
  DensityMatrix hermitized() const;

 private:
  HilbertSpec spec_;
  Matrix entries_;
};

struct LadderOperators {
  Matrix annihilation;
  Matrix creation;
  Matrix number;
};

LadderOperators ladder_operators(const HilbertSpec& spec);

// Diagonal entries exp(-i E_n t) of the Kerr evolution.
Vector kerr_phases(const HilbertSpec& spec, const CavityParams& cavity, double t);
Matrix kerr_unitary(const HilbertSpec& spec, const CavityParams& cavity, double t);

// Two-mode operators use the index n_a * dim_b + n_b.
Matrix kron(const Matrix& a, const Matrix& b);

// Traces out mode b of a two-mode operator.
DensityMatrix partial_trace_b(const Matrix& rho_ab, const HilbertSpec& spec_a,
                              const HilbertSpec& spec_b);

}  // namespace kerrfilter
