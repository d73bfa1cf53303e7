#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/master_eq.hpp"
#include "kerrfilter/metrics.hpp"
#include "kerrfilter/mzi_channel.hpp"
#include "kerrfilter/scenario.hpp"
#include "kerrfilter/version.hpp"

namespace kerrfilter::experiments {

using nlohmann::json;

namespace {

constexpr double kLeakAbortFactor = 100.0;

std::unique_ptr<Propagator> make_propagator(const Scenario& s, const HilbertSpec& spec) {
  switch (s.model) {
    case Model::ExactMzi:
      return std::make_unique<mzi::ExactChannelPropagator>(s.params, spec);
    case Model::Eq1Update:
      return std::make_unique<mzi::UpdateRule>(s.params, spec);
    case Model::Eq2Master:
      return std::make_unique<master::MasterEqPropagator>(master::LossModel(s.params), spec,
                                                          s.substeps_per_tau);
  }
  throw InvalidArgument("unknown model");
}

// Index of the Kerr period that step * tau lands on, if any.
std::optional<std::int64_t> kerr_index(const mzi::MziParams& params, std::int64_t step) {
  if (step == 0) return 0;
  if (!(params.cavity.beta > 0.0)) return std::nullopt;
  const double x = static_cast<double>(step) * params.tau / kerr_period(params.cavity);
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-6) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text, const std::string& path, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(line, 1, path + ": not a number: '" + text + "'");
  }
  if (used != text.size()) throw ParseError(line, used + 1, path + ": trailing characters in '" + text + "'");
  return v;
}

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

}  // namespace

std::optional<std::size_t> TimeSeriesRecord::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

double kerr_period(const CavityParams& cavity) {
  if (!(cavity.beta > 0.0)) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / (cavity.omega_a * cavity.beta);
}

bool at_kerr_multiple(const mzi::MziParams& params, std::int64_t step) {
  return kerr_index(params, step).has_value();
}

RunResult run_scenario(const Scenario& s) {
  const auto started = std::chrono::steady_clock::now();
  const HilbertSpec spec = s.hilbert();
  if (s.n_steps > 0 && !(s.params.tau > 0.0)) {
    throw ValidationError("tau_over_pi", "evolution needs tau > 0");
  }
  for (const auto& k : s.coherence_k) {
    if (k > spec.n_max) throw ValidationError("coherence_k", "entries must be <= n_max");
  }

  const DensityMatrix rho0 = build_density(s.initial, spec);
  std::vector<StateVector> targets;
  for (const auto& t : s.targets) targets.push_back(build_state(t.state, spec));
  const auto propagator = make_propagator(s, spec);

  RunResult result{{}, {}, rho0};
  RunSummary& summary = result.summary;
  summary.n_max = spec.n_max;
  if (s.model == Model::Eq1Update && !s.params.perturbative()) {
    summary.warnings.push_back("chi = " + format_value(s.params.chi) +
                               " is outside the perturbative regime of the update rule");
  }
  for (const auto& t : s.targets) summary.targets.push_back({.name = t.name});

  TimeSeriesRecord& rec = result.record;
  rec.header = {"t", "t_over_tau"};
  if (s.wants("populations")) {
    for (int n = 0; n <= spec.n_max; ++n) rec.header.push_back("p_" + std::to_string(n));
  }
  if (s.wants("coherence")) {
    for (const int k : s.coherence_k) rec.header.push_back("coherence_k" + std::to_string(k));
  }
  if (s.wants("fidelity")) {
    for (const auto& t : s.targets) {
      rec.header.push_back("F_" + t.name);
      rec.header.push_back("sqrtF_" + t.name);
      if (t.rotation_optimized) rec.header.push_back("theta_" + t.name);
    }
  }
  if (s.wants("trace_distance")) rec.header.push_back("trace_distance");
  if (s.wants("leak")) {
    rec.header.push_back("edge_population");
    rec.header.push_back("leak");
  }

  const std::int64_t final_third = (2 * s.n_steps + 2) / 3;
  const double abort_threshold = kLeakAbortFactor * spec.leak_tol;
  bool warned_leak = false;

  const StepObserver observer = [&](std::int64_t step, double t, const DensityMatrix& rho) {
    const double edge = rho.edge_population();
    summary.max_edge_population = std::max(summary.max_edge_population, edge);
    if (edge > abort_threshold) throw LeakExceeded(edge, abort_threshold, t);
    if (edge > spec.leak_tol && !warned_leak) {
      warned_leak = true;
      summary.warnings.push_back("truncation edge population " + format_value(edge) +
                                 " exceeds leak_tol at t=" + format_value(t));
    }

    const bool recorded = step % s.record_every == 0 || step == s.n_steps;
    const auto kidx = kerr_index(s.params, step);
    const bool eval_fidelity = kidx && (*kidx % s.fidelity_stride == 0 || (recorded && s.wants("fidelity")));

    std::vector<metrics::RotationFit> fits;
    if (eval_fidelity) {
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const metrics::RotationFit fit = s.targets[i].rotation_optimized
                                             ? metrics::fidelity_rotation_optimized(rho, targets[i])
                                             : metrics::RotationFit{metrics::fidelity_pure(rho, targets[i]), 0.0};
        fits.push_back(fit);
        TargetSummary& ts = summary.targets[i];
        if (ts.samples == 0 || fit.fidelity > ts.peak_fidelity) {
          ts.peak_fidelity = fit.fidelity;
          ts.peak_time = t;
          ts.peak_theta = fit.theta;
        }
        if (step >= final_third) ts.peak_fidelity_final_third = std::max(ts.peak_fidelity_final_third, fit.fidelity);
        ts.final_fidelity = fit.fidelity;
        ++ts.samples;
      }
    }
    if (!recorded) return;

    std::vector<std::optional<double>> row;
    row.reserve(rec.header.size());
    row.emplace_back(t);
    row.emplace_back(static_cast<double>(step));
    if (s.wants("populations")) {
      for (const double p : metrics::populations(rho)) row.emplace_back(p);
    }
    if (s.wants("coherence")) {
      for (const int k : s.coherence_k) row.emplace_back(metrics::coherence_sum(rho, k));
    }
    if (s.wants("fidelity")) {
      for (std::size_t i = 0; i < s.targets.size(); ++i) {
        const bool have = !fits.empty();
        row.push_back(have ? std::optional<double>(fits[i].fidelity) : std::nullopt);
        row.push_back(have ? std::optional<double>(std::sqrt(std::max(0.0, fits[i].fidelity))) : std::nullopt);
        if (s.targets[i].rotation_optimized) {
          row.push_back(have ? std::optional<double>(fits[i].theta) : std::nullopt);
        }
      }
    }
    if (s.wants("trace_distance")) {
      const double d = metrics::trace_distance(rho, rho0);
      summary.max_trace_distance = std::max(summary.max_trace_distance, d);
      row.emplace_back(d);
    }
    if (s.wants("leak")) {
      row.emplace_back(edge);
      row.emplace_back(edge > spec.leak_tol ? 1.0 : 0.0);
    }
    rec.rows.push_back(std::move(row));
  };

  if (s.n_steps == 0) {
    observer(0, 0.0, rho0);
  } else {
    const Trajectory traj = run_steps(*propagator, rho0, s.n_steps, s.n_steps + 1, observer);
    result.final_state = traj.final_state();
  }
  summary.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::string metadata_json(const RunResult& result, const Scenario& scenario) {
  const RunSummary& sm = result.summary;
  json j;
  j["scenario"] = json::parse(scenario_to_json(scenario));
  j["version"] = kVersion;
  j["runtime_seconds"] = sm.runtime_seconds;
  j["n_max"] = sm.n_max;
  j["kerr_period"] = std::isfinite(kerr_period(scenario.params.cavity))
                         ? json(kerr_period(scenario.params.cavity))
                         : json(nullptr);
  j["columns"] = result.record.header;
  j["rows"] = result.record.rows.size();
  j["max_trace_distance"] = sm.max_trace_distance;
  j["max_edge_population"] = sm.max_edge_population;
  j["warnings"] = sm.warnings;
  j["targets"] = json::array();
  for (const auto& t : sm.targets) {
    j["targets"].push_back({{"name", t.name},
                            {"peak_fidelity", t.peak_fidelity},
                            {"peak_sqrt_fidelity", std::sqrt(std::max(0.0, t.peak_fidelity))},
                            {"peak_time", t.peak_time},
                            {"peak_theta", t.peak_theta},
                            {"peak_fidelity_final_third", t.peak_fidelity_final_third},
                            {"final_fidelity", t.final_fidelity},
                            {"samples", t.samples}});
  }
  return j.dump(2);
}

void write_timeseries(const RunResult& result, const Scenario& scenario, const std::string& csv_path) {
  {
    std::ofstream out = open_for_writing(csv_path);
    const auto& header = result.record.header;
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : result.record.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        if (row[i]) out << format_value(*row[i]);
      }
      out << '\n';
    }
    if (!out) throw IoError(csv_path, "write failed");
  }
  std::string meta_path = csv_path;
  const auto dot = meta_path.rfind('.');
  const auto slash = meta_path.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) meta_path.erase(dot);
  meta_path += ".json";
  std::ofstream meta = open_for_writing(meta_path);
  // Runtime varies between runs; everything else is deterministic.
  meta << metadata_json(result, scenario) << '\n';
  if (!meta) throw IoError(meta_path, "write failed");
}

TimeSeriesRecord read_timeseries(const std::string& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError(csv_path, "cannot open");
  TimeSeriesRecord rec;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, 1, csv_path + ": missing header");
  rec.header = split_csv_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != rec.header.size()) {
      throw ParseError(line_no, 1, csv_path + ": expected " + std::to_string(rec.header.size()) + " cells");
    }
    std::vector<std::optional<double>> row;
    for (const auto& c : cells) {
      row.push_back(c.empty() ? std::nullopt : std::optional<double>(parse_double(c, csv_path, line_no)));
    }
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

void write_density_csv(const DensityMatrix& rho, const std::string& path) {
  std::ofstream out = open_for_writing(path);
  const Eigen::Index d = rho.dim();
  out << "shape," << d << ',' << d << '\n';
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) {
      if (m) out << ',';
      out << format_value(rho(n, m).real()) << ',' << format_value(rho(n, m).imag());
    }
    out << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

DensityMatrix read_density_csv(const std::string& path, double leak_tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, 1, path + ": empty file");
  const auto head = split_csv_line(line);
  if (head.size() != 3 || head[0] != "shape") {
    throw ParseError(1, 1, path + ": expected 'shape,<rows>,<cols>'");
  }
  const auto rows = static_cast<Eigen::Index>(parse_double(head[1], path, 1));
  const auto cols = static_cast<Eigen::Index>(parse_double(head[2], path, 1));
  if (rows != cols || rows < 2) throw ParseError(1, 1, path + ": density matrix must be square with dim >= 2");
  Matrix m(rows, cols);
  for (Eigen::Index n = 0; n < rows; ++n) {
    if (!std::getline(in, line)) throw ParseError(static_cast<std::size_t>(n + 2), 1, path + ": missing row");
    const auto cells = split_csv_line(line);
    if (cells.size() != static_cast<std::size_t>(2 * cols)) {
      throw ParseError(static_cast<std::size_t>(n + 2), 1, path + ": expected 2*cols values");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto line_no = static_cast<std::size_t>(n + 2);
      m(n, k) = cplx(parse_double(cells[static_cast<std::size_t>(2 * k)], path, line_no),
                     parse_double(cells[static_cast<std::size_t>(2 * k + 1)], path, line_no));
    }
  }
  return DensityMatrix(HilbertSpec(static_cast<int>(rows - 1), leak_tol), std::move(m));
}

}  // namespace kerrfilter::experiments
