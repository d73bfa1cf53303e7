#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/metrics.hpp"
#include "kerrfilter/states.hpp"
#include "oracles.hpp"

using namespace kerrfilter;
using namespace kerrfilter::metrics;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix pure(const StateVector& psi) { return DensityMatrix::from_pure(psi); }

DensityMatrix half_half(const HilbertSpec& spec) {
  return DensityMatrix::mixture(spec, {StateVector::fock(spec, 0), StateVector::fock(spec, 1)}, {0.5, 0.5});
}

}  // namespace

TEST(Fidelity, Examples) {
  const HilbertSpec spec(12);
  const StateVector psi = states::coherent(0.7, spec);
  EXPECT_NEAR(fidelity_pure(pure(psi), psi), 1.0, 1e-14);
  EXPECT_EQ(fidelity_pure(pure(StateVector::fock(spec, 0)), StateVector::fock(spec, 1)), 0.0);
  Vector plus = Vector::Zero(13);
  plus(0) = plus(1) = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(fidelity_pure(half_half(spec), StateVector(spec, plus)), 0.5, 1e-15);
}

TEST(Fidelity, DimensionMismatch) {
  EXPECT_THROW(fidelity_pure(pure(StateVector::fock(HilbertSpec(3), 0)), StateVector::fock(HilbertSpec(4), 0)),
               DimensionMismatch);
}

TEST(TraceDistance, Examples) {
  const HilbertSpec spec(3);
  const DensityMatrix z = pure(StateVector::fock(spec, 0));
  EXPECT_NEAR(trace_distance(z, z), 0.0, 1e-15);
  EXPECT_NEAR(trace_distance(z, pure(StateVector::fock(spec, 1))), 1.0, 1e-14);
  EXPECT_NEAR(trace_distance(z, half_half(spec)), 0.5, 1e-14);
  EXPECT_THROW(trace_distance(z, pure(StateVector::fock(HilbertSpec(5), 0))), DimensionMismatch);
}

TEST(TraceDistance, PureStateClosedForm) {
  // T = sqrt(1 - |<a|b>|^2) for pure states.
  const HilbertSpec spec(30);
  const StateVector a = states::coherent(1.0, spec);
  const StateVector b = states::coherent(cplx(0.3, 0.8), spec);
  const double overlap = std::norm(a.amplitudes().dot(b.amplitudes()));
  EXPECT_NEAR(trace_distance(pure(a), pure(b)), std::sqrt(1.0 - overlap), 1e-12);
}

TEST(Populations, FockAndCoherence) {
  const HilbertSpec spec(8);
  const DensityMatrix f3 = pure(StateVector::fock(spec, 3));
  const std::vector<double> p = populations(f3);
  ASSERT_EQ(p.size(), 9u);
  EXPECT_EQ(p[3], 1.0);
  for (int k = 1; k <= 8; ++k) EXPECT_EQ(coherence_sum(f3, k), 0.0);
  EXPECT_THROW(coherence_sum(f3, 9), InvalidArgument);
  EXPECT_THROW(coherence_sum(f3, -1), InvalidArgument);
}

TEST(Coherence, CoherentStateMatchesAmplitudeSum) {
  const HilbertSpec spec(20);
  const StateVector psi = states::coherent(1.0, spec);
  double expected = 0.0;
  for (int n = 2; n <= 20; ++n) expected += std::sqrt(oracle::poisson(1.0, n) * oracle::poisson(1.0, n - 2));
  EXPECT_GT(coherence_sum(pure(psi), 2), 0.0);
  EXPECT_NEAR(coherence_sum(pure(psi), 2), expected, 1e-9);
}

TEST(Coherence, EvenCatHasOnlyEvenCoherences) {
  const HilbertSpec spec(40);
  const DensityMatrix rho = pure(states::cat(states::CatSpec(std::sqrt(10.0), 2), spec));
  EXPECT_LT(coherence_sum(rho, 1), 1e-12);
  EXPECT_GT(coherence_sum(rho, 2), 0.1);
  EXPECT_NEAR(comb_coherence_sum(rho, 2, 2, 0) + comb_coherence_sum(rho, 2, 2, 1), coherence_sum(rho, 2), 1e-14);
  EXPECT_LT(comb_coherence_sum(rho, 2, 2, 1), 1e-12);
}

TEST(CombWeight, Examples) {
  std::mt19937_64 rng(3);
  const HilbertSpec spec(12);
  const DensityMatrix rho = oracle::random_density(spec, rng);
  EXPECT_NEAR(comb_weight(rho, 1, 0), 1.0, 1e-12);
  const DensityMatrix cat = pure(states::cat(states::CatSpec(std::sqrt(10.0), 2), HilbertSpec(40)));
  EXPECT_NEAR(comb_weight(cat, 2, 0), 1.0, 1e-10);
  const DensityMatrix ph = pure(states::phase_state(11, spec));
  EXPECT_NEAR(comb_weight(ph, 4, 0), 0.25, 1e-14);
  EXPECT_THROW(comb_weight(ph, 0, 0), InvalidArgument);
}

TEST(Parity, Examples) {
  const HilbertSpec spec(40);
  EXPECT_NEAR(parity(pure(StateVector::fock(spec, 3))), -1.0, 1e-15);
  EXPECT_NEAR(parity(pure(states::cat(states::CatSpec(2.0, 2), spec))), 1.0, 1e-12);
  EXPECT_NEAR(parity(pure(states::coherent(1.2, spec))), std::exp(-2.0 * 1.44), 1e-12);
}

TEST(RotateFrame, Examples) {
  std::mt19937_64 rng(5);
  const HilbertSpec spec(10);
  const DensityMatrix rho = oracle::random_density(spec, rng);
  EXPECT_LT(oracle::max_abs(rotate_frame(rho, 0.0).matrix() - rho.matrix()), 1e-300);

  const HilbertSpec big(40);
  const DensityMatrix cat = pure(states::cat(states::CatSpec(std::sqrt(10.0), 2), big));
  const DensityMatrix neg = pure(states::cat(states::CatSpec(-std::sqrt(10.0), 2), big));
  EXPECT_LT(oracle::max_abs(rotate_frame(cat, kPi).matrix() - cat.matrix()), 1e-12);
  EXPECT_LT(oracle::max_abs(rotate_frame(cat, kPi).matrix() - neg.matrix()), 1e-12);
}

TEST(RotateFrame, CoherentStateRotates) {
  const HilbertSpec spec(30);
  const StateVector psi = states::coherent(1.5, spec);
  const StateVector rotated = rotate_frame(psi, 0.7);
  const StateVector expected = states::coherent(1.5 * std::exp(cplx(0.0, 0.7)), spec);
  EXPECT_LT((rotated.amplitudes() - expected.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RotationOptimized, RecoversKnownAngle) {
  const HilbertSpec spec(45);
  const StateVector target = states::cat(states::CatSpec(std::sqrt(15.0), 5), spec);
  const double theta0 = 0.4321;
  const DensityMatrix rho = pure(rotate_frame(target, -theta0));
  const RotationFit fit = fidelity_rotation_optimized(rho, target);
  EXPECT_NEAR(fit.fidelity, 1.0, 1e-10);
  // the five-legged cat is symmetric under 2 pi / 5
  const double period = 2.0 * kPi / 5.0;
  const double d = std::remainder(fit.theta - theta0, period);
  EXPECT_NEAR(d, 0.0, 1e-5);
}

TEST(RotationOptimized, MatchesBruteForceOracle) {
  std::mt19937_64 rng(7);
  const HilbertSpec spec(12);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = oracle::random_density(spec, rng);
    const StateVector target = states::coherent(cplx(0.8, 0.5), HilbertSpec(12, 1e-2));
    double brute = 0.0;
    for (int i = 0; i < 200000; ++i) {
      const double th = 2.0 * kPi * i / 200000.0;
      brute = std::max(brute, fidelity_pure(rotate_frame(rho, th), target));
    }
    const RotationFit fit = fidelity_rotation_optimized(rho, target);
    EXPECT_GE(fit.fidelity, brute - 1e-9);
    EXPECT_NEAR(fit.fidelity, brute, 1e-8);
    EXPECT_NEAR(fit.fidelity, fidelity_pure(rotate_frame(rho, fit.theta), target), 1e-14);
  }
}

TEST(RotationOptimized, RejectsCoarseGrid) {
  const HilbertSpec spec(3);
  EXPECT_THROW(fidelity_rotation_optimized(pure(StateVector::fock(spec, 0)), StateVector::fock(spec, 0), 2),
               InvalidArgument);
}

TEST(Wigner, VacuumAndSinglePhoton) {
  const HilbertSpec spec(30);
  EXPECT_NEAR(wigner_point(pure(StateVector::fock(spec, 0)), 0.0), 2.0 / kPi, 1e-3);
  EXPECT_NEAR(wigner_point(pure(StateVector::fock(spec, 1)), 0.0), -2.0 / kPi, 1e-3);
}

TEST(Wigner, FockStatesMatchLaguerreOracle) {
  const HilbertSpec spec(40);
  for (const int n : {0, 1, 2, 5, 9}) {
    const DensityMatrix rho = pure(StateVector::fock(spec, n));
    for (const cplx a : {cplx(0.0, 0.0), cplx(0.3, -0.2), cplx(1.1, 0.4), cplx(-0.7, 1.5)}) {
      EXPECT_NEAR(wigner_point(rho, a), oracle::wigner_fock(n, a), 1e-10) << n << " " << a;
    }
  }
}

TEST(Wigner, CoherentGaussian) {
  const HilbertSpec spec(40);
  const cplx alpha(1.0, -0.5);
  const DensityMatrix rho = pure(states::coherent(alpha, spec));
  for (const cplx b : {cplx(0.0, 0.0), cplx(1.0, -0.5), cplx(1.4, 0.2)}) {
    EXPECT_NEAR(wigner_point(rho, b), 2.0 / kPi * std::exp(-2.0 * std::norm(b - alpha)), 1e-9);
  }
}

TEST(Wigner, GridNormalization) {
  const HilbertSpec spec(50);
  const DensityMatrix rho = pure(states::cat(states::CatSpec(std::sqrt(10.0), 2), spec));
  const WignerGrid g = wigner_grid(rho, {-6.0, 6.0}, {-6.0, 6.0}, 121);
  ASSERT_EQ(g.values.rows(), 121);
  ASSERT_EQ(g.values.cols(), 121);
  const double dx = g.x[1] - g.x[0];
  const double dp = g.p[1] - g.p[0];
  EXPECT_NEAR(g.values.sum() * dx * dp, 1.0, 0.02);
  EXPECT_THROW(wigner_grid(rho, {-1.0, 1.0}, {-1.0, 1.0}, 1), InvalidArgument);
}

TEST(Wigner, EvenCatFringesAlternate) {
  // legs at +-sqrt(10) on the real axis: fringes run along p at x = 0 with period pi / (2 sqrt(10))
  const HilbertSpec spec(50);
  const double a = std::sqrt(10.0);
  const DensityMatrix rho = pure(states::cat(states::CatSpec(a, 2), spec));
  const double half_period = kPi / (4.0 * a);
  int prev_sign = 0;
  for (int j = 0; j < 6; ++j) {
    const double w = wigner_point(rho, cplx(0.0, j * half_period));
    const int s = w > 0 ? 1 : -1;
    EXPECT_GT(std::abs(w), 1e-3);
    if (j > 0) EXPECT_EQ(s, -prev_sign) << j;
    prev_sign = s;
  }
}

TEST(MetricProperty, TraceDistanceTriangleAndRange) {
  std::mt19937_64 rng(11);
  const HilbertSpec spec(8);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix a = oracle::random_density(spec, rng);
    const DensityMatrix b = oracle::random_density(spec, rng);
    const DensityMatrix c = oracle::random_density(spec, rng);
    const double ab = trace_distance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0 + 1e-9);
    EXPECT_NEAR(ab, trace_distance(b, a), 1e-12);
    EXPECT_LE(trace_distance(a, c), ab + trace_distance(b, c) + 1e-12);
  }
}

TEST(MetricProperty, RotationInvariance) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  const HilbertSpec spec(10);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix a = oracle::random_density(spec, rng);
    const DensityMatrix b = oracle::random_density(spec, rng);
    const double th = u(rng);
    EXPECT_NEAR(trace_distance(rotate_frame(a, th), rotate_frame(b, th)), trace_distance(a, b), 1e-12);
    EXPECT_NEAR(coherence_sum(rotate_frame(a, th), 2), coherence_sum(a, 2), 1e-12);
    EXPECT_NEAR(parity(rotate_frame(a, th)), parity(a), 1e-12);
    const RotationFit fit = fidelity_rotation_optimized(a, StateVector::fock(spec, 2));
    EXPECT_GE(fit.fidelity, fidelity_pure(a, StateVector::fock(spec, 2)) - 1e-15);
  }
}

TEST(MetricProperty, CombWeightsSumToTrace) {
  std::mt19937_64 rng(17);
  const HilbertSpec spec(15);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = oracle::random_density(spec, rng);
    for (int dn = 1; dn <= 6; ++dn) {
      double s = 0.0;
      for (int off = 0; off < dn; ++off) {
        const double w = comb_weight(rho, dn, off);
        EXPECT_GE(w, 0.0);
        s += w;
      }
      EXPECT_NEAR(s, rho.trace(), 1e-12);
    }
    for (const double p : populations(rho)) {
      EXPECT_GE(p, -1e-15);
      EXPECT_LE(p, 1.0 + 1e-9);
    }
  }
}
