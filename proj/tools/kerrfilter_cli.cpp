#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kerrfilter/errors.hpp"
#include "kerrfilter/master_eq.hpp"
#include "kerrfilter/metrics.hpp"
#include "kerrfilter/scenario.hpp"
#include "kerrfilter/version.hpp"

namespace kf = kerrfilter;
namespace ex = kerrfilter::experiments;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitLeak = 3;

struct RunOptions {
  std::vector<std::string> scenarios;
  std::string out_dir = ".";
  int threads = 1;
  int nmax = -1;
  long long record_every = -1;
  std::string model;
  bool quiet = false;
};

// Maps an exception to an exit code and prints it.
int report(const std::string& context, std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const kf::LeakExceeded& e) {
    std::cerr << context << ": aborted: " << e.what() << '\n';
    return kExitLeak;
  } catch (const kf::ValidationError& e) {
    std::cerr << context << ": validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const kf::ParseError& e) {
    std::cerr << context << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const kf::CutoffTooSmall& e) {
    std::cerr << context << ": validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const kf::InvalidArgument& e) {
    std::cerr << context << ": validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << context << ": error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int severity(int code) {
  // leak abort > validation > other failure > ok
  switch (code) {
    case kExitLeak:
      return 3;
    case kExitValidation:
      return 2;
    case kExitFailure:
      return 1;
    default:
      return 0;
  }
}

std::string summary_line(const ex::Scenario& s, const ex::RunResult& r) {
  std::ostringstream out;
  out << s.name << ": model=" << ex::to_string(s.model) << " n_max=" << r.summary.n_max
      << " steps=" << s.n_steps << " rows=" << r.record.rows.size();
  char buf[64];
  std::snprintf(buf, sizeof buf, " runtime=%.2fs", r.summary.runtime_seconds);
  out << buf;
  if (s.wants("trace_distance")) {
    std::snprintf(buf, sizeof buf, " max_trace_distance=%.6f", r.summary.max_trace_distance);
    out << buf;
  }
  for (const auto& t : r.summary.targets) {
    std::snprintf(buf, sizeof buf, "%.6f (sqrt %.6f)", t.peak_fidelity, std::sqrt(std::max(0.0, t.peak_fidelity)));
    out << "\n  " << t.name << ": peak F=" << buf;
    std::snprintf(buf, sizeof buf, "%.6f", t.peak_fidelity_final_third);
    out << " final-third peak F=" << buf;
  }
  for (const auto& w : r.summary.warnings) out << "\n  warning: " << w;
  return out.str();
}

int run_one(const std::string& ref, const RunOptions& opt, std::mutex& io_mutex) {
  try {
    ex::Scenario s = ex::resolve_scenario(ref);
    if (opt.nmax >= 0) s.n_max = opt.nmax;
    if (opt.record_every > 0) s.record_every = opt.record_every;
    if (!opt.model.empty()) s.model = ex::model_from_string(opt.model);
    const ex::RunResult result = ex::run_scenario(s);
    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    const std::string base = s.name + (opt.model.empty() ? "" : "_" + ex::to_string(s.model));
    ex::write_timeseries(result, s, (dir / (base + ".csv")).string());
    ex::write_density_csv(result.final_state, (dir / (base + ".rho.csv")).string());
    if (!opt.quiet) {
      const std::lock_guard lock(io_mutex);
      std::cout << summary_line(s, result) << std::endl;
    }
    return kExitOk;
  } catch (...) {
    const std::lock_guard lock(io_mutex);
    return report(ref, std::current_exception());
  }
}

int cmd_run(const RunOptions& opt) {
  if (opt.threads < 1) {
    std::cerr << "--threads must be >= 1\n";
    return kExitValidation;
  }
  std::vector<int> codes(opt.scenarios.size(), kExitOk);
  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < opt.scenarios.size(); i = next++) {
      codes[i] = run_one(opt.scenarios[i], opt, io_mutex);
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(opt.threads), opt.scenarios.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  int worst = kExitOk;
  for (const int c : codes) {
    if (severity(c) > severity(worst)) worst = c;
  }
  return worst;
}

kf::mzi::MziParams params_from_argument(const std::string& arg) {
  // Inline JSON params object, or any scenario reference.
  if (!arg.empty() && arg.front() == '{') {
    json params;
    try {
      params = json::parse(arg);
    } catch (const json::parse_error& e) {
      throw kf::ParseError(1, e.byte, std::string("params: ") + e.what());
    }
    const json scenario = {{"name", "stability_report"},
                           {"params", params},
                           {"initial", {{"type", "fock"}, {"n", 0}}},
                           {"n_steps", 0}};
    return ex::parse_scenario(scenario.dump(), "params").params;
  }
  return ex::resolve_scenario(arg).params;
}

int cmd_stability(const std::string& arg, int n_range) {
  const kf::mzi::MziParams p = params_from_argument(arg);
  const kf::master::LossModel model(p);
  const kf::master::StabilizationReport r = kf::master::stabilization_report(model, n_range);
  json j;
  j["omega_a"] = p.cavity.omega_a;
  j["beta"] = p.cavity.beta;
  j["chi"] = p.chi;
  j["tau"] = p.tau;
  j["tau_over_pi"] = p.tau * p.cavity.omega_a / std::numbers::pi;
  j["delta_n"] = std::isfinite(r.delta_n) ? json(r.delta_n) : json(nullptr);
  j["is_integer_comb"] = r.is_integer_comb;
  j["n0_solutions"] = json::array();
  for (const auto& [n0, m] : r.n0_solutions) j["n0_solutions"].push_back({{"n0", n0}, {"m", m}});
  j["loss_rates"] = json::array();
  for (int n = 0; n <= n_range; ++n) j["loss_rates"].push_back(kf::master::loss_rate(n, 0, model));
  std::cout << j.dump(2) << std::endl;
  return kExitOk;
}

int cmd_wigner(const std::string& in, const std::string& out, double extent, int resolution) {
  const kf::DensityMatrix rho = ex::read_density_csv(in);
  const kf::metrics::WignerGrid g =
      kf::metrics::wigner_grid(rho, {-extent, extent}, {-extent, extent}, resolution);
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw kf::IoError(out, "cannot open for writing");
  f << "x,p,w\n";
  char buf[96];
  for (std::size_t i = 0; i < g.p.size(); ++i) {
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.9e\n", g.x[j], g.p[i],
                    g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      f << buf;
    }
  }
  if (!f) throw kf::IoError(out, "write failed");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kerr-cavity photon-number filter simulator"};
  app.set_version_flag("--version", std::string(kf::kVersion));
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run presets or scenario files and write CSV/JSON output");
  run->add_option("scenario", run_opt.scenarios, "Preset name or scenario file")->required();
  run->add_option("--out", run_opt.out_dir, "Output directory")->capture_default_str();
  run->add_option("--threads", run_opt.threads, "Scenarios run in parallel")->capture_default_str();
  run->add_option("--nmax", run_opt.nmax, "Override the Fock cutoff n_max");
  run->add_option("--record-every", run_opt.record_every, "Override the recording interval (steps)");
  run->add_option("--model", run_opt.model, "Override the model: exact_mzi, eq1_update or eq2_master");
  run->add_flag("--quiet", run_opt.quiet, "Suppress the summary");

  app.add_subcommand("list-presets", "List built-in presets");

  std::string dump_name;
  auto* dump = app.add_subcommand("dump-preset", "Print a preset as a scenario file");
  dump->add_option("name", dump_name, "Preset name")->required();

  std::string stab_arg;
  int n_range = 40;
  auto* stab = app.add_subcommand("stability-report", "Print comb spacing, trapped photon numbers and loss rates");
  stab->add_option("params", stab_arg, "Preset, scenario file, or inline JSON params object")->required();
  stab->add_option("--n-range", n_range, "Largest n to scan")->capture_default_str();

  std::string w_in;
  std::string w_out;
  double extent = 5.0;
  int resolution = 101;
  auto* wig = app.add_subcommand("wigner", "Wigner function of a density-matrix CSV on a square grid");
  wig->add_option("rho", w_in, "Density-matrix CSV")->required();
  wig->add_option("out", w_out, "Output CSV (x,p,w)")->required();
  wig->add_option("--extent", extent, "Grid covers [-extent, extent] in x and p")->capture_default_str();
  wig->add_option("--resolution", resolution, "Points per axis")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run(run_opt);
    if (app.got_subcommand("list-presets")) {
      for (const auto& name : ex::preset_names()) {
        const ex::Scenario s = ex::preset(name);
        std::cout << name << (s.derived_preset ? " [derived]" : "") << "  " << s.description << '\n';
      }
      return kExitOk;
    }
    if (*dump) {
      std::cout << ex::scenario_to_json(ex::preset(dump_name)) << std::endl;
      return kExitOk;
    }
    if (*stab) return cmd_stability(stab_arg, n_range);
    if (*wig) return cmd_wigner(w_in, w_out, extent, resolution);
  } catch (...) {
    return report("kerrfilter", std::current_exception());
  }
  return kExitOk;
}
