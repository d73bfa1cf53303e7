#pragma once

#include <utility>
#include <vector>

#include "kerrfilter/fock.hpp"

namespace kerrfilter::states {

inline constexpr double kMaxSqueezeMagnitude = 3.0;

// Parameter z of exp((z* a^2 - z a^dag^2) / 2).
struct SqueezeParam {
  cplx z{0.0, 0.0};

  SqueezeParam() = default;
  explicit SqueezeParam(cplx z);
};

// sum_j |exp(2 pi i j / legs) alpha>
struct CatSpec {
  cplx alpha{0.0, 0.0};
  int legs = 2;

  CatSpec() = default;
  CatSpec(cplx alpha, int legs);
};

// Truncated coherent state. Throws CutoffTooSmall when the untruncated state puts
// more than leak_tol at the top of the space.
StateVector coherent(cplx alpha, const HilbertSpec& spec);

// Normalized sum_j c_j |alpha_j>. Normalization comes from the exact overlaps
// <alpha_i|alpha_j>, then the truncated vector is renormalized.
StateVector coherent_superposition(const std::vector<std::pair<cplx, cplx>>& coefficient_and_alpha,
                                   const HilbertSpec& spec);

StateVector squeezed_vacuum(const SqueezeParam& z, const HilbertSpec& spec);
StateVector displaced_squeezed(cplx alpha, const SqueezeParam& z, const HilbertSpec& spec);

StateVector cat(const CatSpec& cat_spec, const HilbertSpec& spec);

// |i alpha> + i |-i alpha>, the half-period state of lossless Kerr evolution.
StateVector i_cat(cplx alpha, const HilbertSpec& spec);

// (N+1)^{-1/2} sum_{s=0}^{N} |s>
StateVector phase_state(int n_top, const HilbertSpec& spec);

// exp(alpha a^dag - alpha* a) on the truncated space.
Matrix displacement_operator(cplx alpha, const HilbertSpec& spec);
Matrix squeeze_operator(const SqueezeParam& z, const HilbertSpec& spec);

}  // namespace kerrfilter::states
