#include "kerrfilter/metrics.hpp"

#include <cmath>
#include <numbers>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/linalg.hpp"

namespace kerrfilter::metrics {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw DimensionMismatch(static_cast<std::size_t>(a), static_cast<std::size_t>(b), what);
}

// F(theta) = c_0 + 2 Re sum_{k>=1} c_k e^{i k theta}
class RotatedFidelity {
 public:
  RotatedFidelity(const DensityMatrix& rho, const StateVector& target)
      : coeffs_(rho.dim(), cplx(0.0, 0.0)) {
    const Matrix& r = rho.matrix();
    const Vector& t = target.amplitudes();
    for (Eigen::Index k = 0; k < rho.dim(); ++k) {
      cplx acc = 0.0;
      for (Eigen::Index n = k; n < rho.dim(); ++n) acc += std::conj(t[n]) * r(n, n - k) * t[n - k];
      coeffs_[static_cast<std::size_t>(k)] = acc;
    }
  }

  double operator()(double theta) const {
    double f = coeffs_[0].real();
    const cplx step = std::polar(1.0, theta);
    cplx rot = step;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
      f += 2.0 * (coeffs_[k] * rot).real();
      rot *= step;
    }
    return f;
  }

 private:
  std::vector<cplx> coeffs_;
};

}  // namespace

double fidelity_pure(const DensityMatrix& rho, const StateVector& target) {
  require_same_dim(rho.dim(), target.dim(), "fidelity_pure");
  const Vector& t = target.amplitudes();
  return (t.adjoint() * rho.matrix() * t)(0, 0).real();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "trace_distance");
  return 0.5 * linalg::hermitian_eigenvalues(rho.matrix() - sigma.matrix()).cwiseAbs().sum();
}

std::vector<double> populations(const DensityMatrix& rho) {
  std::vector<double> p(static_cast<std::size_t>(rho.dim()));
  for (Eigen::Index n = 0; n < rho.dim(); ++n) p[static_cast<std::size_t>(n)] = rho.population(n);
  return p;
}

double coherence_sum(const DensityMatrix& rho, int k) {
  return comb_coherence_sum(rho, k, 1, 0);
}

double comb_coherence_sum(const DensityMatrix& rho, int k, int delta_n, int offset) {
  if (k < 0 || k > rho.spec().n_max) {
    throw InvalidArgument("coherence_sum: k must lie in 0..n_max");
  }
  if (delta_n < 1) throw InvalidArgument("comb_coherence_sum: delta_n must be >= 1");
  double s = 0.0;
  for (Eigen::Index n = k; n < rho.dim(); ++n) {
    const auto residue = ((n - offset) % delta_n + delta_n) % delta_n;
    if (residue == 0) s += std::abs(rho(n, n - k));
  }
  return s;
}

double comb_weight(const DensityMatrix& rho, int delta_n, int offset) {
  if (delta_n < 1) throw InvalidArgument("comb_weight: delta_n must be >= 1");
  double s = 0.0;
  for (Eigen::Index n = 0; n < rho.dim(); ++n) {
    if (((n - offset) % delta_n + delta_n) % delta_n == 0) s += rho.population(n);
  }
  return s;
}

double parity(const DensityMatrix& rho) {
  double s = 0.0;
  for (Eigen::Index n = 0; n < rho.dim(); ++n) s += (n % 2 == 0 ? 1.0 : -1.0) * rho.population(n);
  return s;
}

DensityMatrix rotate_frame(const DensityMatrix& rho, double theta) {
  const Eigen::Index d = rho.dim();
  Vector phases(d);
  for (Eigen::Index n = 0; n < d; ++n) phases[n] = std::polar(1.0, theta * static_cast<double>(n));
  Matrix out = phases.asDiagonal() * rho.matrix() * phases.conjugate().asDiagonal();
  return DensityMatrix(rho.spec(), std::move(out)).hermitized();
}

StateVector rotate_frame(const StateVector& psi, double theta) {
  Vector c = psi.amplitudes();
  for (Eigen::Index n = 0; n < c.size(); ++n) c[n] *= std::polar(1.0, theta * static_cast<double>(n));
  return StateVector(psi.spec(), std::move(c));
}

RotationFit fidelity_rotation_optimized(const DensityMatrix& rho, const StateVector& target,
                                        int grid_points, double theta_tol) {
  require_same_dim(rho.dim(), target.dim(), "fidelity_rotation_optimized");
  if (grid_points < 3) throw InvalidArgument("fidelity_rotation_optimized: grid too coarse");
  const RotatedFidelity f(rho, target);
  const double two_pi = 2.0 * std::numbers::pi;
  const double h = two_pi / grid_points;

  RotationFit best{f(0.0), 0.0};
  for (int i = 1; i < grid_points; ++i) {
    const double theta = h * i;
    const double v = f(theta);
    if (v > best.fidelity) best = {v, theta};
  }

  // Golden-section maximization on [best - h, best + h].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best.theta - h;
  double hi = best.theta + h;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > theta_tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fmid = f(mid);
  if (fmid > best.fidelity) best = {fmid, mid};
  best.theta = std::fmod(std::fmod(best.theta, two_pi) + two_pi, two_pi);
  return best;
}

double wigner_point(const DensityMatrix& rho, cplx alpha) {
  // Displaced parity P = D(alpha) Pi D(alpha)^dag satisfies P a + a P = 2 alpha P, giving
  //   P_{m+1,n} = (2 alpha P_{m,n} - sqrt(n) P_{m,n-1}) / sqrt(m+1),  P_{0,0} = e^{-2|alpha|^2}
  // and P is Hermitian. Only the lower triangle (m >= n) is needed.
  const Eigen::Index d = rho.dim();
  const Matrix& r = rho.matrix();
  std::vector<cplx> prev(static_cast<std::size_t>(d), cplx(0.0, 0.0));  // column n-1
  std::vector<cplx> cur(static_cast<std::size_t>(d), cplx(0.0, 0.0));   // column n
  const auto at = [](std::vector<cplx>& v, Eigen::Index i) -> cplx& {
    return v[static_cast<std::size_t>(i)];
  };
  double w = 0.0;
  for (Eigen::Index n = 0; n < d; ++n) {
    if (n == 0) {
      at(cur, 0) = std::exp(-2.0 * std::norm(alpha));
    } else {
      const double sn = std::sqrt(static_cast<double>(n));
      // P_{n-1,n} = conj(P_{n,n-1})
      at(cur, n) = (2.0 * alpha * std::conj(at(prev, n)) - sn * at(prev, n - 1)) / sn;
    }
    for (Eigen::Index m = n; m + 1 < d; ++m) {
      const cplx below = (n > 0) ? at(prev, m) : cplx(0.0, 0.0);
      at(cur, m + 1) = (2.0 * alpha * at(cur, m) - std::sqrt(static_cast<double>(n)) * below) /
                       std::sqrt(static_cast<double>(m + 1));
    }
    // Tr[rho P] = sum_{m,n} rho_{n,m} P_{m,n}
    w += (r(n, n) * at(cur, n)).real();
    for (Eigen::Index m = n + 1; m < d; ++m) w += 2.0 * (r(n, m) * at(cur, m)).real();
    std::swap(prev, cur);
  }
  return 2.0 / std::numbers::pi * w;
}

WignerGrid wigner_grid(const DensityMatrix& rho, std::pair<double, double> x_range,
                       std::pair<double, double> p_range, int resolution) {
  if (resolution < 2) throw InvalidArgument("wigner_grid: resolution must be >= 2");
  WignerGrid g;
  g.x.resize(static_cast<std::size_t>(resolution));
  g.p.resize(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    const double s = static_cast<double>(i) / (resolution - 1);
    g.x[static_cast<std::size_t>(i)] = x_range.first + s * (x_range.second - x_range.first);
    g.p[static_cast<std::size_t>(i)] = p_range.first + s * (p_range.second - p_range.first);
  }
  g.values.resize(resolution, resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      g.values(i, j) = wigner_point(rho, cplx(g.x[static_cast<std::size_t>(j)],
                                              g.p[static_cast<std::size_t>(i)]));
    }
  }
  return g;
}

}  // namespace kerrfilter::metrics
