#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kerrfilter/fock.hpp"
#include "kerrfilter/mzi_channel.hpp"

namespace kerrfilter::experiments {

enum class Model { ExactMzi, Eq1Update, Eq2Master };

std::string to_string(Model model);
// Accepts "exact_mzi", "eq1_update", "eq2_master".
Model model_from_string(const std::string& name);

// A state built by the states module: factory name plus arguments.
struct StateDescriptor {
  // coherent | squeezed_vacuum | displaced_squeezed | cat | i_cat | phase_state | fock | mixture
  std::string factory = "coherent";
  cplx alpha{0.0, 0.0};
  cplx z{0.0, 0.0};
  int legs = 2;
  int n = 0;  // phase_state N, or Fock number
  std::vector<StateDescriptor> components;  // mixture only
  std::vector<double> weights;              // mixture only

  friend bool operator==(const StateDescriptor&, const StateDescriptor&) = default;
};

// Smallest cutoff that the default rule allows for this state.
int required_cutoff(const StateDescriptor& state);

StateVector build_state(const StateDescriptor& state, const HilbertSpec& spec);
// Pure states become |psi><psi|; mixtures are weighted sums.
DensityMatrix build_density(const StateDescriptor& state, const HilbertSpec& spec);

struct TargetSpec {
  std::string name;
  StateDescriptor state;
  // Maximize fidelity over a global frame rotation exp(i theta a^dag a).
  bool rotation_optimized = false;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

inline const std::vector<std::string>& known_outputs() {
  static const std::vector<std::string> names{"populations", "coherence", "fidelity",
                                              "trace_distance", "leak"};
  return names;
}

struct Scenario {
  std::string name;
  std::string description;
  Model model = Model::ExactMzi;
  mzi::MziParams params;
  StateDescriptor initial;
  std::optional<int> n_max;  // default: required_cutoff over initial and targets
  double leak_tol = kDefaultLeakTol;
  std::int64_t n_steps = 0;  // MZI periods; t_end = n_steps * tau
  std::int64_t record_every = 1;
  int substeps_per_tau = 20;  // eq2 only: dt = tau / substeps_per_tau
  std::vector<TargetSpec> targets;
  std::vector<int> coherence_k;
  std::vector<std::string> outputs = known_outputs();
  // Fidelities are evaluated at every fidelity_stride-th multiple of T_Kerr.
  int fidelity_stride = 1;
  // Parameters chosen here rather than quoted from a published figure.
  bool derived_preset = false;
  std::string notes;

  HilbertSpec hilbert() const;
  bool wants(const std::string& output) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Parses the JSON scenario schema. ParseError carries line/column; ValidationError names
// the offending field. `origin` is used in messages only.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scenario, int indent = 2);

std::vector<std::string> preset_names();
bool has_preset(const std::string& name);
Scenario preset(const std::string& name);
// Preset name, or else a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

// One row per recorded snapshot; std::nullopt marks a blank cell.
struct TimeSeriesRecord {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;

  std::optional<std::size_t> column(const std::string& name) const;
};

struct TargetSummary {
  std::string name;
  double peak_fidelity = 0.0;  // F = <psi|rho|psi>
  double peak_time = 0.0;
  double peak_theta = 0.0;
  double peak_fidelity_final_third = 0.0;
  double final_fidelity = 0.0;
  std::int64_t samples = 0;
};

struct RunSummary {
  std::vector<TargetSummary> targets;
  double max_trace_distance = 0.0;
  double max_edge_population = 0.0;
  std::vector<std::string> warnings;
  double runtime_seconds = 0.0;
  int n_max = 0;
};

struct RunResult {
  TimeSeriesRecord record;
  RunSummary summary;
  DensityMatrix final_state;
};

// T_Kerr = pi / (omega_a beta)
double kerr_period(const CavityParams& cavity);
// True when step * tau is within 1e-6 periods of a multiple of T_Kerr.
bool at_kerr_multiple(const mzi::MziParams& params, std::int64_t step);

// Runs the scenario deterministically. Throws LeakExceeded when the edge population
// passes 100 * leak_tol.
RunResult run_scenario(const Scenario& scenario);

// CSV with a header row, '.' decimals and %.8e values (9 significant digits); blank
// cells for samples without a value. Writes a companion .json next to it.
void write_timeseries(const RunResult& result, const Scenario& scenario, const std::string& csv_path);
TimeSeriesRecord read_timeseries(const std::string& csv_path);

// Density-matrix snapshot: first line "shape,<rows>,<cols>", then one line per row with
// interleaved real,imag values.
void write_density_csv(const DensityMatrix& rho, const std::string& path);
DensityMatrix read_density_csv(const std::string& path, double leak_tol = kDefaultLeakTol);

std::string metadata_json(const RunResult& result, const Scenario& scenario);

struct SqueezedFit {
  double fidelity = 0.0;
  double r = 0.0;      // |z|
  double theta = 0.0;  // frame rotation applied to rho
};

// Largest fidelity of rho with any squeezed vacuum, over |z| in [0, r_max] and a global
// rotation (the rotation covers arg z).
SqueezedFit best_squeezed_vacuum_fit(const DensityMatrix& rho, double r_max = 2.0);

}  // namespace kerrfilter::experiments
