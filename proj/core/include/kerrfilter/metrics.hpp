#pragma once

#include <map>
#include <string>
#include <vector>

#include "kerrfilter/fock.hpp"

namespace kerrfilter::metrics {

struct MetricSample {
  double time = 0.0;
  std::map<std::string, double> values;
};

// <psi|rho|psi>
double fidelity_pure(const DensityMatrix& rho, const StateVector& target);

// Half the sum of absolute eigenvalues of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

std::vector<double> populations(const DensityMatrix& rho);

// sum_n |rho_{n,n-k}|
double coherence_sum(const DensityMatrix& rho, int k);
// Same sum restricted to rows n = offset (mod delta_n).
double comb_coherence_sum(const DensityMatrix& rho, int k, int delta_n, int offset);

// sum of p_n over n = offset (mod delta_n)
double comb_weight(const DensityMatrix& rho, int delta_n, int offset);

// <(-1)^{a^dag a}>
double parity(const DensityMatrix& rho);

// rho -> R rho R^dag with R = diag(exp(i theta n)).
DensityMatrix rotate_frame(const DensityMatrix& rho, double theta);
StateVector rotate_frame(const StateVector& psi, double theta);

struct RotationFit {
  double fidelity = 0.0;
  double theta = 0.0;
};

// max over theta of fidelity_pure(rotate_frame(rho, theta), target): uniform scan
// followed by golden-section refinement around the best grid point.
RotationFit fidelity_rotation_optimized(const DensityMatrix& rho, const StateVector& target,
                                        int grid_points = 720, double theta_tol = 1e-6);

// Phase-space grid with alpha = x + i p. values(i, j) is W at (x[j], p[i]) with
// W(alpha) = (2/pi) Tr[rho D(alpha) Pi D(alpha)^dag], so the integral over d^2 alpha is 1.
struct WignerGrid {
  std::vector<double> x;
  std::vector<double> p;
  Eigen::MatrixXd values;
};

double wigner_point(const DensityMatrix& rho, cplx alpha);
WignerGrid wigner_grid(const DensityMatrix& rho, std::pair<double, double> x_range,
                       std::pair<double, double> p_range, int resolution);

}  // namespace kerrfilter::metrics
