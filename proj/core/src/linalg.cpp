#include "kerrfilter/linalg.hpp"

#include "kerrfilter/errors.hpp"

namespace kerrfilter::linalg {

Matrix expi_hermitian(const Matrix& h) {
  if (h.rows() != h.cols()) {
    throw DimensionMismatch(static_cast<std::size_t>(h.rows()), static_cast<std::size_t>(h.cols()),
                            "expi_hermitian needs a square matrix");
  }
  if (h.rows() == 0) return h;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Matrix& v = eig.eigenvectors();
  Vector phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    phases[i] = std::polar(1.0, eig.eigenvalues()[i]);
  }
  return v * phases.asDiagonal() * v.adjoint();
}

Matrix exp_antihermitian(const Matrix& a) {
  // a = i h  =>  h = -i a
  const Matrix h = cplx(0.0, -1.0) * a;
  return expi_hermitian(0.5 * (h + h.adjoint()));
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace kerrfilter::linalg
