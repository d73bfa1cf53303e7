#pragma once

#include "kerrfilter/fock.hpp"

namespace kerrfilter::linalg {

// exp(i * h) for Hermitian h via eigendecomposition. Exactly unitary up to roundoff.
Matrix expi_hermitian(const Matrix& h);

// exp(a) for anti-Hermitian a.
Matrix exp_antihermitian(const Matrix& a);

// Eigenvalues of the Hermitian part of m, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);

double max_abs(const Matrix& m);

}  // namespace kerrfilter::linalg
