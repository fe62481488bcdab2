// beamsched command-line front end. Talks to the library only through the C
// interface in beamsched.h.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "beamsched/beamsched.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "out";
  int verbosity = 1;
};

struct ScenarioHandle {
  bs_scenario* ptr = nullptr;
  ~ScenarioHandle() { bs_scenario_free(ptr); }
};

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { bs_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

int report(bs_status status) {
  if (status != BS_OK) {
    std::cerr << "error (" << bs_status_name(status) << "): " << bs_last_error() << '\n';
  }
  return static_cast<int>(status);
}

class Manifest {
 public:
  Manifest(std::string command, const Globals& g, int argc, char** argv) : started_(clock::now()) {
    doc_["command"] = std::move(command);
    doc_["argv"] = std::vector<std::string>(argv, argv + argc);
    doc_["seed"] = g.seed;
    doc_["threads"] = bs_resolve_threads(g.threads);
    doc_["version"] = bs_version();
    doc_["artifacts"] = json::array();
  }

  json& operator[](const char* key) { return doc_[key]; }
  void artifact(const fs::path& p) { doc_["artifacts"].push_back(p.string()); }

  void scenario(const bs_scenario* s) {
    OwnedString text;
    if (bs_scenario_to_json(s, &text.ptr) == BS_OK) doc_["config"] = json::parse(text.str());
  }

  void write(const fs::path& dir, int exit_code) {
    doc_["exit_code"] = exit_code;
    if (exit_code != 0) doc_["error"] = bs_last_error();
    doc_["runtime_ms"] = std::chrono::duration<double, std::milli>(clock::now() - started_).count();
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "manifest.json");
    out << doc_.dump(2) << '\n';
  }

 private:
  using clock = std::chrono::steady_clock;
  json doc_;
  clock::time_point started_;
};

bs_status load(const std::string& path, ScenarioHandle& h) { return bs_scenario_load(path.c_str(), &h.ptr); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beam scheduling for smart targets: index policies, Lagrangian bound, PCL probes"};
  app.set_version_flag("--version", std::string(bs_version()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (default: RMAB_BEAMSCHED_THREADS, then all cores)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_flag("-v{2},--verbose{2},-q{0},--quiet{0}", g.verbosity, "Logging: -v info, -q quiet");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of index policies");
  std::string sim_scenario;
  std::vector<std::string> sim_policies;
  int sim_horizon = -1;
  int sim_reps = 100;
  bool sim_bound = false;
  bool sim_no_filter = false;
  std::string sim_anomaly = "fail";
  sim->add_option("scenario", sim_scenario, "Scenario JSON file")->required();
  sim->add_option("-p,--policy", sim_policies, "whittle, myopic, tec (default: all three)");
  sim->add_option("-T,--horizon", sim_horizon, "Slots per episode (default: scenario horizon)");
  sim->add_option("-n,--replications", sim_reps, "Monte Carlo replications")->capture_default_str();
  sim->add_flag("--bound", sim_bound, "Compute the Lagrangian bound and gaps (scalar scenarios)");
  sim->add_flag("--no-nonneg-filter", sim_no_filter, "Let targets with negative index be tracked");
  sim->add_option("--on-anomaly", sim_anomaly, "States with g <= 0: fail (exit 3) or ratio (use f/g and count)")
      ->check(CLI::IsMember({"fail", "ratio"}))
      ->capture_default_str();

  // index-dump
  auto* idx = app.add_subcommand("index-dump", "Tabulate MP, TEC and myopic indices of one target");
  std::string idx_scenario;
  int idx_target = 0;
  double idx_lo = 0.01, idx_hi = 20.0, idx_step = 0.01;
  int idx_tau = 0;
  idx->add_option("scenario", idx_scenario, "Scenario JSON file")->required();
  idx->add_option("--target", idx_target, "Target index")->capture_default_str();
  idx->add_option("--p-min", idx_lo)->capture_default_str();
  idx->add_option("--p-max", idx_hi)->capture_default_str();
  idx->add_option("--step", idx_step)->capture_default_str();
  idx->add_option("--tau", idx_tau, "Truncation (default: scenario tau)");

  // lower-bound
  auto* lb = app.add_subcommand("lower-bound", "Lagrangian dual bound V^D");
  std::string lb_scenario;
  std::optional<double> lb_lambda_max, lb_tol;
  int lb_reps = 1;
  lb->add_option("scenario", lb_scenario, "Scalar scenario JSON file")->required();
  lb->add_option("--lambda-max", lb_lambda_max, "Upper end of the subsidy search (checked)");
  lb->add_option("--tol", lb_tol, "Golden-section width (default 1e-3 * lambda_max)");
  lb->add_option("-n,--replications", lb_reps, "Initial-state draws to average")->capture_default_str();

  // pcl-check
  auto* pcl = app.add_subcommand("pcl-check", "Numerical PCL-indexability probes");
  std::string pcl_scenario;
  double pcl_lo = 0.01, pcl_hi = 20.0, pcl_step = 0.01, pcl_tol = 1e-9;
  std::vector<double> pcl_z{4.0, 10.0};
  pcl->add_option("scenario", pcl_scenario, "Scenario JSON file")->required();
  pcl->add_option("--p-min", pcl_lo)->capture_default_str();
  pcl->add_option("--p-max", pcl_hi)->capture_default_str();
  pcl->add_option("--step", pcl_step)->capture_default_str();
  pcl->add_option("--z", pcl_z, "Threshold grid")->capture_default_str();
  pcl->add_option("--tolerance", pcl_tol, "Monotonicity tolerance")->capture_default_str();

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "Run a built-in experiment preset");
  std::string rep_preset;
  int rep_reps = 100;
  std::vector<int> rep_sizes;
  bool rep_no_svg = false;
  {
    OwnedString names;
    bs_preset_names(&names.ptr);
    std::vector<std::string> list;
    std::istringstream in(names.str());
    for (std::string line; std::getline(in, line);) list.push_back(line);
    rep->add_option("preset", rep_preset, "Preset name")->required()->check(CLI::IsMember(list));
  }
  rep->add_option("-n,--replications", rep_reps, "Monte Carlo replications")->capture_default_str();
  rep->add_option("--sizes", rep_sizes, "N values for size sweeps (default 4 8 12 16)");
  rep->add_flag("--no-svg", rep_no_svg, "Skip SVG charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(BS_CONFIG);
  }
  bs_set_log_level(g.verbosity);
  const fs::path out_dir(g.out);

  if (*sim) {
    Manifest m("simulate", g, argc, argv);
    ScenarioHandle s;
    if (auto st = load(sim_scenario, s); st != BS_OK) {
      m.write(out_dir, st);
      return report(st);
    }
    m.scenario(s.ptr);
    bs_simulate_options o;
    bs_simulate_options_init(&o);
    o.replications = sim_reps;
    o.seed = g.seed;
    o.horizon = sim_horizon;
    o.threads = g.threads;
    o.nonneg_filter = sim_no_filter ? 0 : 1;
    o.with_bound = sim_bound ? 1 : 0;
    o.anomaly_ratio = sim_anomaly == "ratio" ? 1 : 0;
    std::vector<const char*> names;
    for (const auto& p : sim_policies) names.push_back(p.c_str());
    bs_result* result = nullptr;
    bs_status st = bs_simulate(s.ptr, names.data(), names.size(), &o, &result);
    std::unique_ptr<bs_result, decltype(&bs_result_free)> guard(result, bs_result_free);
    if (st == BS_OK) {
      const fs::path csv = out_dir / "results.csv";
      st = bs_result_write_csv(result, csv.string().c_str());
      m.artifact(csv);
      for (size_t i = 0; i < bs_result_policy_count(result); ++i) {
        bs_policy_summary p;
        bs_result_policy(result, i, &p);
        std::printf("%-8s mean %.4f  stderr %.4f", p.policy, p.mean_cost, p.std_error);
        if (p.has_gap) std::printf("  gap %.2f%%", p.gap_percent);
        if (p.index_anomalies > 0) std::printf("  anomalies %ld", p.index_anomalies);
        std::printf("\n");
      }
    }
    m["replications"] = sim_reps;
    m["on_anomaly"] = sim_anomaly;
    m.write(out_dir, st);
    return report(st);
  }

  if (*idx) {
    Manifest m("index-dump", g, argc, argv);
    ScenarioHandle s;
    if (auto st = load(idx_scenario, s); st != BS_OK) {
      m.write(out_dir, st);
      return report(st);
    }
    m.scenario(s.ptr);
    const fs::path csv = out_dir / ("index_target" + std::to_string(idx_target) + ".csv");
    int anomalies = 0;
    const bs_status st =
        bs_index_dump(s.ptr, idx_target, idx_lo, idx_hi, idx_step, idx_tau, csv.string().c_str(), &anomalies);
    if (st == BS_OK || st == BS_INDEX_ANOMALY) m.artifact(csv);
    m["grid"] = {{"p_min", idx_lo}, {"p_max", idx_hi}, {"step", idx_step}, {"tau", idx_tau}};
    m["anomalies"] = anomalies;
    m.write(out_dir, st);
    return report(st);
  }

  if (*lb) {
    Manifest m("lower-bound", g, argc, argv);
    ScenarioHandle s;
    if (auto st = load(lb_scenario, s); st != BS_OK) {
      m.write(out_dir, st);
      return report(st);
    }
    m.scenario(s.ptr);
    bs_bound_options o;
    bs_bound_options_init(&o);
    if (lb_lambda_max) o.has_lambda_max = 1, o.lambda_max = *lb_lambda_max;
    if (lb_tol) o.has_tol = 1, o.tol = *lb_tol;
    o.replications = lb_reps;
    o.seed = g.seed;
    o.threads = g.threads;
    const fs::path csv = out_dir / "lower_bound.csv";
    double lambda_star = 0.0, bound = 0.0;
    const bs_status st = bs_lower_bound(s.ptr, &o, csv.string().c_str(), &lambda_star, &bound);
    if (st == BS_OK) {
      m.artifact(csv);
      m["lambda_star"] = lambda_star;
      m["V_D"] = bound;
      std::printf("lambda* %.6f  V^D %.6f\n", lambda_star, bound);
    }
    m.write(out_dir, st);
    return report(st);
  }

  if (*pcl) {
    Manifest m("pcl-check", g, argc, argv);
    ScenarioHandle s;
    if (auto st = load(pcl_scenario, s); st != BS_OK) {
      m.write(out_dir, st);
      return report(st);
    }
    m.scenario(s.ptr);
    bs_pcl_options o;
    bs_pcl_options_init(&o);
    o.p_min = pcl_lo;
    o.p_max = pcl_hi;
    o.step = pcl_step;
    o.thresholds = pcl_z.data();
    o.threshold_count = pcl_z.size();
    o.tolerance = pcl_tol;
    o.threads = g.threads;
    OwnedString summary;
    const bs_status st = bs_pcl_check(s.ptr, &o, g.out.c_str(), &summary.ptr);
    std::cout << summary.str();
    m.artifact(out_dir / "summary.txt");
    m.write(out_dir, st);
    return report(st);
  }

  if (*rep) {
    Manifest m("reproduce", g, argc, argv);
    m["preset"] = rep_preset;
    m["replications"] = rep_reps;
    m["sizes"] = rep_sizes.empty() ? std::vector<int>{4, 8, 12, 16} : rep_sizes;
    OwnedString summary;
    const bs_status st = bs_reproduce(rep_preset.c_str(), g.out.c_str(), g.seed, rep_reps, g.threads,
                                      rep_sizes.data(), rep_sizes.size(), rep_no_svg ? 0 : 1, &summary.ptr);
    if (st == BS_OK) {
      m["summary"] = json::parse(summary.str());
      std::cout << summary.str() << '\n';
    }
    m.write(out_dir, st);
    return report(st);
  }
  return 0;
}
