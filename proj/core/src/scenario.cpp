#include "kerrfilter/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/metrics.hpp"
#include "kerrfilter/states.hpp"

namespace kerrfilter::experiments {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

const std::set<std::string>& state_factories() {
  static const std::set<std::string> names{"coherent", "squeezed_vacuum", "displaced_squeezed",
                                           "cat",      "i_cat",           "phase_state",
                                           "fock",     "mixture"};
  return names;
}

void require_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field, "expected an object");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& prefix) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ValidationError(prefix.empty() ? key : prefix + "." + key, "unknown field");
    }
  }
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
  return v;
}

std::int64_t as_integer(const json& j, const std::string& field) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::round(v) && std::abs(v) < 9.0e15) {
      return static_cast<std::int64_t>(v);
    }
  }
  throw ValidationError(field, "expected an integer");
}

// A number, or [re, im].
cplx as_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {as_number(j, field), 0.0};
  if (j.is_array() && j.size() == 2) return {as_number(j[0], field), as_number(j[1], field)};
  throw ValidationError(field, "expected a number or [re, im]");
}

json complex_to_json(cplx c) {
  if (c.imag() == 0.0) return c.real();
  return json::array({c.real(), c.imag()});
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) throw ValidationError(field, "expected a string");
  return j.get<std::string>();
}

const json* find(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& key, const std::string& field) {
  const json* v = find(obj, key);
  if (v == nullptr) throw ValidationError(field, "missing required field");
  return *v;
}

StateDescriptor parse_state(const json& j, const std::string& field) {
  require_object(j, field);
  reject_unknown_keys(j, {"type", "alpha", "z", "legs", "n", "components", "weights"}, field);
  StateDescriptor s;
  s.factory = as_string(require(j, "type", field + ".type"), field + ".type");
  if (!state_factories().contains(s.factory)) {
    throw ValidationError(field + ".type", "unknown state factory '" + s.factory + "'");
  }
  const auto need_alpha = [&] { s.alpha = as_complex(require(j, "alpha", field + ".alpha"), field + ".alpha"); };
  const auto need_z = [&] {
    s.z = as_complex(require(j, "z", field + ".z"), field + ".z");
    if (std::abs(s.z) > states::kMaxSqueezeMagnitude) {
      throw ValidationError(field + ".z", "squeezing magnitude must be <= 3");
    }
  };
  const auto need_n = [&] {
    const std::int64_t n = as_integer(require(j, "n", field + ".n"), field + ".n");
    if (n < 0 || n > 100000) throw ValidationError(field + ".n", "must be a non-negative integer");
    s.n = static_cast<int>(n);
  };
  if (s.factory == "coherent" || s.factory == "i_cat") {
    need_alpha();
  } else if (s.factory == "squeezed_vacuum") {
    need_z();
  } else if (s.factory == "displaced_squeezed") {
    need_alpha();
    need_z();
  } else if (s.factory == "cat") {
    need_alpha();
    if (const json* legs = find(j, "legs")) {
      const std::int64_t l = as_integer(*legs, field + ".legs");
      if (l < 1 || l > 1000) throw ValidationError(field + ".legs", "must be >= 1");
      s.legs = static_cast<int>(l);
    }
  } else if (s.factory == "phase_state" || s.factory == "fock") {
    need_n();
  } else {  // mixture
    const json& comps = require(j, "components", field + ".components");
    const json& weights = require(j, "weights", field + ".weights");
    if (!comps.is_array() || comps.empty()) {
      throw ValidationError(field + ".components", "expected a non-empty array");
    }
    if (!weights.is_array() || weights.size() != comps.size()) {
      throw ValidationError(field + ".weights", "expected one weight per component");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string sub = field + ".components[" + std::to_string(i) + "]";
      s.components.push_back(parse_state(comps[i], sub));
      if (s.components.back().factory == "mixture") {
        throw ValidationError(sub, "nested mixtures are not supported");
      }
      const double w = as_number(weights[i], field + ".weights");
      if (w < 0.0) throw ValidationError(field + ".weights", "weights must be non-negative");
      s.weights.push_back(w);
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError(field + ".weights", "weights must sum to 1");
  }
  return s;
}

json state_to_json(const StateDescriptor& s) {
  json j;
  j["type"] = s.factory;
  if (s.factory == "coherent" || s.factory == "i_cat") {
    j["alpha"] = complex_to_json(s.alpha);
  } else if (s.factory == "squeezed_vacuum") {
    j["z"] = complex_to_json(s.z);
  } else if (s.factory == "displaced_squeezed") {
    j["alpha"] = complex_to_json(s.alpha);
    j["z"] = complex_to_json(s.z);
  } else if (s.factory == "cat") {
    j["alpha"] = complex_to_json(s.alpha);
    j["legs"] = s.legs;
  } else if (s.factory == "phase_state" || s.factory == "fock") {
    j["n"] = s.n;
  } else {
    j["components"] = json::array();
    for (const auto& c : s.components) j["components"].push_back(state_to_json(c));
    j["weights"] = s.weights;
  }
  return j;
}

mzi::MziParams parse_params(const json& j) {
  require_object(j, "params");
  reject_unknown_keys(j, {"omega_a", "beta", "kerr_phase_over_pi", "chi", "tau", "tau_over_pi"},
                      "params");
  double omega_a = 1.0;
  if (const json* w = find(j, "omega_a")) omega_a = as_number(*w, "omega_a");
  if (!(omega_a > 0.0)) throw ValidationError("omega_a", "must be positive");

  const double chi = as_number(require(j, "chi", "chi"), "chi");
  if (chi < 0.0 || chi >= kPi / 2.0) throw ValidationError("chi", "must lie in [0, pi/2)");

  const json* tau_j = find(j, "tau");
  const json* tau_pi_j = find(j, "tau_over_pi");
  if ((tau_j == nullptr) == (tau_pi_j == nullptr)) {
    throw ValidationError("tau_over_pi", "give exactly one of tau or tau_over_pi");
  }
  const double tau = tau_j != nullptr ? as_number(*tau_j, "tau")
                                      : as_number(*tau_pi_j, "tau_over_pi") * kPi / omega_a;
  if (tau < 0.0) throw ValidationError(tau_j != nullptr ? "tau" : "tau_over_pi", "must be >= 0");

  const json* beta_j = find(j, "beta");
  const json* phase_j = find(j, "kerr_phase_over_pi");
  if ((beta_j == nullptr) == (phase_j == nullptr)) {
    throw ValidationError("beta", "give exactly one of beta or kerr_phase_over_pi");
  }
  double beta = 0.0;
  if (beta_j != nullptr) {
    beta = as_number(*beta_j, "beta");
  } else {
    // omega_a beta tau = kerr_phase_over_pi * pi
    if (!(tau > 0.0)) throw ValidationError("kerr_phase_over_pi", "needs tau > 0");
    beta = as_number(*phase_j, "kerr_phase_over_pi") * kPi / (omega_a * tau);
  }
  if (beta < 0.0) throw ValidationError("beta", "must be >= 0");
  return mzi::MziParams(CavityParams(omega_a, beta), chi, tau);
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Scenario from_json(const json& j) {
  require_object(j, "scenario");
  reject_unknown_keys(j,
                      {"name", "description", "model", "params", "initial", "n_max", "leak_tol",
                       "n_steps", "t_end_over_tau", "record_every", "substeps_per_tau", "targets",
                       "coherence_k", "outputs", "fidelity_stride", "derived_preset", "notes"},
                      "");
  Scenario s;
  s.name = as_string(require(j, "name", "name"), "name");
  if (s.name.empty()) throw ValidationError("name", "must not be empty");
  if (s.name.find_first_of("/\\") != std::string::npos) {
    throw ValidationError("name", "must not contain path separators");
  }
  if (const json* d = find(j, "description")) s.description = as_string(*d, "description");
  if (const json* m = find(j, "model")) {
    try {
      s.model = model_from_string(as_string(*m, "model"));
    } catch (const InvalidArgument& e) {
      throw ValidationError("model", e.what());
    }
  }
  s.params = parse_params(require(j, "params", "params"));
  s.initial = parse_state(require(j, "initial", "initial"), "initial");

  if (const json* n = find(j, "n_max")) {
    const std::int64_t v = as_integer(*n, "n_max");
    if (v < 1 || v > 2000) throw ValidationError("n_max", "must lie in 1..2000");
    s.n_max = static_cast<int>(v);
  }
  if (const json* l = find(j, "leak_tol")) {
    s.leak_tol = as_number(*l, "leak_tol");
    if (!(s.leak_tol > 0.0) || s.leak_tol >= 1.0) throw ValidationError("leak_tol", "must lie in (0, 1)");
  }

  const json* steps = find(j, "n_steps");
  const json* t_end = find(j, "t_end_over_tau");
  if ((steps == nullptr) == (t_end == nullptr)) {
    throw ValidationError("n_steps", "give exactly one of n_steps or t_end_over_tau");
  }
  s.n_steps = steps != nullptr ? as_integer(*steps, "n_steps") : as_integer(*t_end, "t_end_over_tau");
  if (s.n_steps < 0) throw ValidationError(steps != nullptr ? "n_steps" : "t_end_over_tau", "must be >= 0");

  if (const json* r = find(j, "record_every")) {
    s.record_every = as_integer(*r, "record_every");
    if (s.record_every < 1) throw ValidationError("record_every", "must be >= 1");
  }
  if (const json* sub = find(j, "substeps_per_tau")) {
    const std::int64_t v = as_integer(*sub, "substeps_per_tau");
    if (v < 10 || v > 100000) throw ValidationError("substeps_per_tau", "must lie in 10..100000");
    s.substeps_per_tau = static_cast<int>(v);
  }
  if (const json* t = find(j, "targets")) {
    if (!t->is_array()) throw ValidationError("targets", "expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < t->size(); ++i) {
      const std::string field = "targets[" + std::to_string(i) + "]";
      const json& tj = (*t)[i];
      require_object(tj, field);
      reject_unknown_keys(tj, {"name", "state", "rotation_optimized"}, field);
      TargetSpec target;
      target.name = as_string(require(tj, "name", field + ".name"), field + ".name");
      if (target.name.empty() || target.name.find_first_of(",\"\n") != std::string::npos) {
        throw ValidationError(field + ".name", "must be non-empty without commas or quotes");
      }
      if (!seen.insert(target.name).second) throw ValidationError(field + ".name", "duplicate target");
      target.state = parse_state(require(tj, "state", field + ".state"), field + ".state");
      if (target.state.factory == "mixture") {
        throw ValidationError(field + ".state", "targets must be pure states");
      }
      if (const json* r = find(tj, "rotation_optimized")) {
        if (!r->is_boolean()) throw ValidationError(field + ".rotation_optimized", "expected a boolean");
        target.rotation_optimized = r->get<bool>();
      }
      s.targets.push_back(std::move(target));
    }
  }
  if (const json* c = find(j, "coherence_k")) {
    if (!c->is_array()) throw ValidationError("coherence_k", "expected an array");
    for (const auto& k : *c) {
      const std::int64_t v = as_integer(k, "coherence_k");
      if (v < 1) throw ValidationError("coherence_k", "entries must be >= 1");
      s.coherence_k.push_back(static_cast<int>(v));
    }
  }
  if (const json* o = find(j, "outputs")) {
    if (!o->is_array()) throw ValidationError("outputs", "expected an array");
    s.outputs.clear();
    for (const auto& name : *o) {
      const std::string v = as_string(name, "outputs");
      if (std::find(known_outputs().begin(), known_outputs().end(), v) == known_outputs().end()) {
        throw ValidationError("outputs", "unknown metric '" + v + "'");
      }
      s.outputs.push_back(v);
    }
  }
  if (const json* f = find(j, "fidelity_stride")) {
    const std::int64_t v = as_integer(*f, "fidelity_stride");
    if (v < 1) throw ValidationError("fidelity_stride", "must be >= 1");
    s.fidelity_stride = static_cast<int>(v);
  }
  if (const json* d = find(j, "derived_preset")) {
    if (!d->is_boolean()) throw ValidationError("derived_preset", "expected a boolean");
    s.derived_preset = d->get<bool>();
  }
  if (const json* n = find(j, "notes")) s.notes = as_string(*n, "notes");

  // Every state must be constructible in the chosen space.
  const HilbertSpec spec = [&] {
    try {
      return s.hilbert();
    } catch (const InvalidArgument& e) {
      throw ValidationError("n_max", e.what());
    }
  }();
  for (const auto& k : s.coherence_k) {
    if (k > spec.n_max) throw ValidationError("coherence_k", "entries must be <= n_max");
  }
  try {
    (void)build_density(s.initial, spec);
  } catch (const Error& e) {
    throw ValidationError("initial", e.what());
  }
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    try {
      (void)build_state(s.targets[i].state, spec);
    } catch (const Error& e) {
      throw ValidationError("targets[" + std::to_string(i) + "].state", e.what());
    }
  }
  return s;
}

}  // namespace

std::string to_string(Model model) {
  switch (model) {
    case Model::ExactMzi:
      return "exact_mzi";
    case Model::Eq1Update:
      return "eq1_update";
    case Model::Eq2Master:
      return "eq2_master";
  }
  return "exact_mzi";
}

Model model_from_string(const std::string& name) {
  if (name == "exact_mzi" || name == "exact") return Model::ExactMzi;
  if (name == "eq1_update" || name == "eq1") return Model::Eq1Update;
  if (name == "eq2_master" || name == "eq2") return Model::Eq2Master;
  throw InvalidArgument("unknown model '" + name + "' (expected exact_mzi, eq1_update or eq2_master)");
}

int required_cutoff(const StateDescriptor& state) {
  const auto squeeze_margin = [](cplx z) {
    return static_cast<int>(std::ceil(20.0 * std::abs(z)));
  };
  if (state.factory == "coherent" || state.factory == "cat" || state.factory == "i_cat") {
    return default_cutoff(std::abs(state.alpha));
  }
  if (state.factory == "squeezed_vacuum") return 10 + squeeze_margin(state.z);
  if (state.factory == "displaced_squeezed") {
    return default_cutoff(std::abs(state.alpha)) + squeeze_margin(state.z);
  }
  if (state.factory == "phase_state" || state.factory == "fock") return state.n + 8;
  if (state.factory == "mixture") {
    int n = 1;
    for (const auto& c : state.components) n = std::max(n, required_cutoff(c));
    return n;
  }
  throw InvalidArgument("unknown state factory '" + state.factory + "'");
}

StateVector build_state(const StateDescriptor& state, const HilbertSpec& spec) {
  const std::string& f = state.factory;
  if (f == "coherent") return states::coherent(state.alpha, spec);
  if (f == "squeezed_vacuum") return states::squeezed_vacuum(states::SqueezeParam(state.z), spec);
  if (f == "displaced_squeezed") {
    return states::displaced_squeezed(state.alpha, states::SqueezeParam(state.z), spec);
  }
  if (f == "cat") return states::cat(states::CatSpec(state.alpha, state.legs), spec);
  if (f == "i_cat") return states::i_cat(state.alpha, spec);
  if (f == "phase_state") return states::phase_state(state.n, spec);
  if (f == "fock") {
    if (state.n > spec.n_max) throw CutoffTooSmall(1.0, spec.leak_tol, spec.n_max);
    Vector v = Vector::Zero(spec.dim());
    v[state.n] = 1.0;
    return StateVector(spec, std::move(v));
  }
  if (f == "mixture") throw InvalidArgument("a mixture is not a pure state");
  throw InvalidArgument("unknown state factory '" + f + "'");
}

DensityMatrix build_density(const StateDescriptor& state, const HilbertSpec& spec) {
  if (state.factory != "mixture") return DensityMatrix::from_pure(build_state(state, spec));
  std::vector<StateVector> comps;
  comps.reserve(state.components.size());
  for (const auto& c : state.components) comps.push_back(build_state(c, spec));
  return DensityMatrix::mixture(spec, comps, state.weights);
}

HilbertSpec Scenario::hilbert() const {
  int n = 1;
  if (n_max) {
    n = *n_max;
  } else {
    n = required_cutoff(initial);
    for (const auto& t : targets) n = std::max(n, required_cutoff(t.state));
  }
  return HilbertSpec(n, leak_tol);
}

bool Scenario::wants(const std::string& output) const {
  return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ParseError(line, col, origin + ": " + e.what());
  }
  return from_json(j);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string scenario_to_json(const Scenario& s, int indent) {
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["model"] = to_string(s.model);
  j["params"] = {{"omega_a", s.params.cavity.omega_a},
                 {"beta", s.params.cavity.beta},
                 {"chi", s.params.chi},
                 {"tau", s.params.tau}};
  j["initial"] = state_to_json(s.initial);
  if (s.n_max) j["n_max"] = *s.n_max;
  j["leak_tol"] = s.leak_tol;
  j["n_steps"] = s.n_steps;
  j["record_every"] = s.record_every;
  j["substeps_per_tau"] = s.substeps_per_tau;
  j["targets"] = json::array();
  for (const auto& t : s.targets) {
    j["targets"].push_back(
        {{"name", t.name}, {"state", state_to_json(t.state)}, {"rotation_optimized", t.rotation_optimized}});
  }
  j["coherence_k"] = s.coherence_k;
  j["outputs"] = s.outputs;
  j["fidelity_stride"] = s.fidelity_stride;
  j["derived_preset"] = s.derived_preset;
  j["notes"] = s.notes;
  return j.dump(indent);
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (has_preset(name_or_path)) return preset(name_or_path);
  if (!std::filesystem::exists(name_or_path)) {
    throw ValidationError("scenario", "'" + name_or_path + "' is neither a preset nor an existing file");
  }
  return load_scenario(name_or_path);
}

}  // namespace kerrfilter::experiments

namespace kerrfilter::experiments {

SqueezedFit best_squeezed_vacuum_fit(const DensityMatrix& rho, double r_max) {
  if (!(r_max > 0.0) || r_max > states::kMaxSqueezeMagnitude) {
    throw InvalidArgument("best_squeezed_vacuum_fit: r_max must lie in (0, 3]");
  }
  const HilbertSpec loose(rho.spec().n_max, 0.999);
  const auto fit_at = [&](double r) {
    const StateVector sv = states::squeezed_vacuum(states::SqueezeParam(cplx(r, 0.0)), loose);
    const metrics::RotationFit f = metrics::fidelity_rotation_optimized(rho, sv, 360, 1e-7);
    return SqueezedFit{f.fidelity, r, f.theta};
  };
  constexpr int kGrid = 80;
  SqueezedFit best = fit_at(0.0);
  const double h = r_max / kGrid;
  for (int i = 1; i <= kGrid; ++i) {
    const SqueezedFit f = fit_at(h * i);
    if (f.fidelity > best.fidelity) best = f;
  }
  double lo = std::max(0.0, best.r - h);
  double hi = std::min(r_max, best.r + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  SqueezedFit a = fit_at(hi - inv_phi * (hi - lo));
  SqueezedFit b = fit_at(lo + inv_phi * (hi - lo));
  while (hi - lo > 1e-6) {
    if (a.fidelity < b.fidelity) {
      lo = a.r;
      a = b;
      b = fit_at(lo + inv_phi * (hi - lo));
    } else {
      hi = b.r;
      b = a;
      a = fit_at(hi - inv_phi * (hi - lo));
    }
  }
  for (const SqueezedFit& f : {a, b}) {
    if (f.fidelity > best.fidelity) best = f;
  }
  return best;
}

}  // namespace kerrfilter::experiments
