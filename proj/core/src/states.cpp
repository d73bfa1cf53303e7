#include "kerrfilter/states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/linalg.hpp"

namespace kerrfilter::states {

namespace {

// Untruncated coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n <= n_max.
Vector coherent_amplitudes(cplx alpha, Eigen::Index dim) {
  Vector c(dim);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (Eigen::Index n = 1; n < dim; ++n) {
    c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  }
  return c;
}

double edge_population(const Vector& c) {
  const Eigen::Index top = c.size() - 1;
  double edge = std::norm(c[top]);
  if (top >= 1) edge = std::max(edge, std::norm(c[top - 1]));
  return edge;
}

void check_cutoff(const Vector& c, const HilbertSpec& spec) {
  const double edge = edge_population(c);
  if (edge > spec.leak_tol) throw CutoffTooSmall(edge, spec.leak_tol, spec.n_max);
}

}  // namespace

SqueezeParam::SqueezeParam(cplx z_) : z(z_) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InvalidArgument("SqueezeParam: z must be finite");
  }
  if (std::abs(z) > kMaxSqueezeMagnitude) {
    throw InvalidArgument("SqueezeParam: |z| must not exceed 3");
  }
}

CatSpec::CatSpec(cplx alpha_, int legs_) : alpha(alpha_), legs(legs_) {
  if (legs < 1) throw InvalidArgument("CatSpec: legs must be >= 1");
}

StateVector coherent(cplx alpha, const HilbertSpec& spec) {
  Vector c = coherent_amplitudes(alpha, spec.dim());
  check_cutoff(c, spec);
  return StateVector(spec, std::move(c));
}

StateVector coherent_superposition(const std::vector<std::pair<cplx, cplx>>& terms,
                                   const HilbertSpec& spec) {
  if (terms.empty()) throw InvalidArgument("coherent_superposition: no terms");
  Vector sum = Vector::Zero(spec.dim());
  for (const auto& [coef, alpha] : terms) sum += coef * coherent_amplitudes(alpha, spec.dim());

  // Gram matrix <a_i|a_j> = exp(-|a_i|^2/2 - |a_j|^2/2 + conj(a_i) a_j)
  cplx norm_sq = 0.0;
  for (const auto& [ci, ai] : terms) {
    for (const auto& [cj, aj] : terms) {
      const cplx overlap = std::exp(-0.5 * std::norm(ai) - 0.5 * std::norm(aj) + std::conj(ai) * aj);
      norm_sq += std::conj(ci) * cj * overlap;
    }
  }
  if (!(norm_sq.real() > 0.0)) {
    throw InvalidArgument("coherent_superposition: superposition has zero norm");
  }
  sum /= std::sqrt(norm_sq.real());
  check_cutoff(sum, spec);
  return StateVector(spec, std::move(sum));
}

Matrix displacement_operator(cplx alpha, const HilbertSpec& spec) {
  const LadderOperators ops = ladder_operators(spec);
  const Matrix gen = alpha * ops.creation - std::conj(alpha) * ops.annihilation;
  return linalg::exp_antihermitian(gen);
}

Matrix squeeze_operator(const SqueezeParam& z, const HilbertSpec& spec) {
  const LadderOperators ops = ladder_operators(spec);
  const Matrix a2 = ops.annihilation * ops.annihilation;
  const Matrix ad2 = ops.creation * ops.creation;
  const Matrix gen = 0.5 * (std::conj(z.z) * a2 - z.z * ad2);
  return linalg::exp_antihermitian(gen);
}

StateVector squeezed_vacuum(const SqueezeParam& z, const HilbertSpec& spec) {
  Vector c = squeeze_operator(z, spec).col(0);
  for (Eigen::Index n = 1; n < c.size(); n += 2) c[n] = 0.0;
  check_cutoff(c, spec);
  return StateVector(spec, std::move(c));
}

StateVector displaced_squeezed(cplx alpha, const SqueezeParam& z, const HilbertSpec& spec) {
  const StateVector sq = squeezed_vacuum(z, spec);
  if (alpha == cplx(0.0, 0.0)) return sq;
  Vector c = displacement_operator(alpha, spec) * sq.amplitudes();
  check_cutoff(c, spec);
  return StateVector(spec, std::move(c));
}

StateVector cat(const CatSpec& cat_spec, const HilbertSpec& spec) {
  std::vector<std::pair<cplx, cplx>> terms;
  terms.reserve(static_cast<std::size_t>(cat_spec.legs));
  for (int j = 0; j < cat_spec.legs; ++j) {
    const cplx root = std::polar(1.0, 2.0 * std::numbers::pi * j / cat_spec.legs);
    terms.emplace_back(cplx(1.0, 0.0), root * cat_spec.alpha);
  }
  return coherent_superposition(terms, spec);
}

StateVector i_cat(cplx alpha, const HilbertSpec& spec) {
  const cplx i(0.0, 1.0);
  return coherent_superposition({{1.0, i * alpha}, {i, -i * alpha}}, spec);
}

StateVector phase_state(int n_top, const HilbertSpec& spec) {
  if (n_top < 0 || n_top > spec.n_max) {
    throw InvalidArgument("phase_state: N=" + std::to_string(n_top) + " outside 0..n_max=" +
                          std::to_string(spec.n_max));
  }
  Vector c = Vector::Zero(spec.dim());
  c.head(n_top + 1).setConstant(1.0 / std::sqrt(static_cast<double>(n_top + 1)));
  return StateVector(spec, std::move(c));
}

}  // namespace kerrfilter::states
