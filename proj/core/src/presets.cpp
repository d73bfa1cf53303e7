#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/scenario.hpp"

namespace kerrfilter::experiments {

using nlohmann::json;

namespace {

// omega_a tau = 200 pi with omega_a beta tau = pi / 2: even-parity comb, Delta n = 2.
json even_comb_params(double chi) {
  return {{"omega_a", 1.0}, {"beta", 2.5e-3}, {"chi", chi}, {"tau_over_pi", 200.0}};
}

json coherent(double alpha) { return {{"type", "coherent"}, {"alpha", alpha}}; }

json cat(double alpha, int legs) { return {{"type", "cat"}, {"alpha", alpha}, {"legs", legs}}; }

json cat_targets(double alpha0, int legs, bool rotation_optimized) {
  json targets = json::array();
  for (const double scale : {1.0, 0.98, 0.95, 0.90}) {
    char name[32];
    std::snprintf(name, sizeof name, "cat%d_%.2f", legs, scale);
    targets.push_back({{"name", name},
                       {"state", cat(scale * alpha0, legs)},
                       {"rotation_optimized", rotation_optimized}});
  }
  return targets;
}

json fig2a_comb() {
  return {{"name", "fig2a_comb"},
          {"description", "Phase state N=12 filtered into a Delta n = 4 comb"},
          {"model", "exact_mzi"},
          {"params",
           {{"omega_a", 1.0}, {"kerr_phase_over_pi", 0.25}, {"chi", 0.01}, {"tau_over_pi", 199.5}}},
          {"initial", {{"type", "phase_state"}, {"n", 12}}},
          {"n_max", 20},
          {"n_steps", 50000},
          {"record_every", 500},
          {"coherence_k", {4}},
          {"outputs", {"populations", "coherence", "trace_distance", "leak"}},
          {"derived_preset", true},
          {"notes", "omega_a tau = 199.5 pi puts the zero-loss photon numbers on n = 0 (mod 4)"}};
}

json fig2b_squeezed() {
  return {{"name", "fig2b_squeezed"},
          {"description", "Displaced squeezed state under the even-parity filter"},
          {"model", "exact_mzi"},
          {"params", even_comb_params(0.01)},
          {"initial", {{"type", "displaced_squeezed"}, {"alpha", 1.5}, {"z", 0.6}}},
          {"n_steps", 30000},
          {"record_every", 300},
          {"coherence_k", {2}},
          {"derived_preset", true},
          {"notes", "alpha = 1.5, z = 0.6"}};
}

json fig2c(const std::string& name, const std::string& description, json initial) {
  return {{"name", name},
          {"description", description},
          {"model", "exact_mzi"},
          {"params", even_comb_params(0.01)},
          {"initial", std::move(initial)},
          {"n_steps", 30000},
          {"record_every", 300},
          {"outputs", {"populations", "trace_distance", "leak"}}};
}

json fig3b_evencat() {
  const double alpha0 = std::sqrt(10.0);
  return {{"name", "fig3b_evencat"},
          {"description", "Coherent state alpha = sqrt(10) driven toward an even cat"},
          {"model", "exact_mzi"},
          {"params", even_comb_params(0.01)},
          {"initial", coherent(alpha0)},
          {"n_max", 40},
          {"n_steps", 30000},
          {"record_every", 100},
          {"targets", cat_targets(alpha0, 2, false)},
          {"coherence_k", {2}}};
}

json fig3c(const std::string& name, const std::string& model) {
  const double alpha0 = std::sqrt(10.0);
  return {{"name", name},
          {"description", "Coherence sum |rho_{n,n-2}| sampled at Kerr-period multiples"},
          {"model", model},
          {"params", even_comb_params(0.01)},
          {"initial", coherent(alpha0)},
          {"n_max", 40},
          {"n_steps", 30000},
          {"record_every", 20},
          {"coherence_k", {2}},
          {"outputs", {"coherence", "leak"}}};
}

json fig3d_fivecat() {
  const double alpha0 = std::sqrt(15.0);
  const double chi = 0.003;
  return {{"name", "fig3d_fivecat"},
          {"description", "Coherent state alpha = sqrt(15) driven toward a five-legged cat"},
          {"model", "exact_mzi"},
          {"params",
           {{"omega_a", 1.0}, {"beta", 1.0 / (5.0 * 201.4)}, {"chi", chi}, {"tau_over_pi", 201.4}}},
          {"initial", coherent(alpha0)},
          {"n_steps", static_cast<std::int64_t>(std::llround(3.0 / (chi * chi)))},
          {"record_every", 5000},
          {"targets", cat_targets(alpha0, 5, true)},
          {"coherence_k", {5}},
          {"fidelity_stride", 20},
          {"notes", "default cutoff n_max = 45; n_max = 40 leaves 1e-7 at the edge"}};
}

json crosscheck_small() {
  return {{"name", "crosscheck_small"},
          {"description", "Small space for comparing the three cavity models"},
          {"model", "exact_mzi"},
          {"params", even_comb_params(0.005)},
          {"initial", coherent(1.0)},
          {"n_max", 12},
          {"n_steps", 100},
          {"record_every", 10},
          {"coherence_k", {1, 2}},
          {"derived_preset", true}};
}

const std::map<std::string, std::function<json()>>& registry() {
  static const std::map<std::string, std::function<json()>> presets{
      {"fig2a_comb", fig2a_comb},
      {"fig2b_squeezed", fig2b_squeezed},
      {"fig2c_stability",
       [] { return fig2c("fig2c_stability", "Even cat alpha = sqrt(10) is left unchanged", cat(std::sqrt(10.0), 2)); }},
      {"fig2c_coherent",
       [] { return fig2c("fig2c_coherent", "Coherent alpha = sqrt(10) is not a fixed point", coherent(std::sqrt(10.0))); }},
      {"fig2c_mixed",
       [] {
         const double a = std::sqrt(10.0);
         return fig2c("fig2c_mixed", "Equal mixture of |alpha> and |-alpha>",
                      {{"type", "mixture"},
                       {"components", {coherent(a), coherent(-a)}},
                       {"weights", {0.5, 0.5}}});
       }},
      {"fig3b_evencat", fig3b_evencat},
      {"fig3c_coherence", [] { return fig3c("fig3c_coherence", "exact_mzi"); }},
      {"fig3c_coherence_eq2", [] { return fig3c("fig3c_coherence_eq2", "eq2_master"); }},
      {"fig3d_fivecat", fig3d_fivecat},
      {"crosscheck_small", crosscheck_small},
  };
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, make] : registry()) names.push_back(name);
  return names;
}

bool has_preset(const std::string& name) { return registry().contains(name); }

Scenario preset(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ValidationError("preset", "unknown preset '" + name + "'");
  return parse_scenario(it->second().dump(), "preset " + name);
}

}  // namespace kerrfilter::experiments
