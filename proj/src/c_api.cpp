#include "beamsched/beamsched.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "beamsched/bound.hpp"
#include "beamsched/csv.hpp"
#include "beamsched/log.hpp"
#include "beamsched/parallel.hpp"
#include "beamsched/pcl.hpp"
#include "beamsched/presets.hpp"
#include "beamsched/scenario_io.hpp"
#include "beamsched/sim.hpp"

struct bs_scenario {
  beamsched::ScenarioSpec spec;
};

struct bs_result {
  beamsched::ExperimentResult result;
  std::vector<std::string> names;
};

namespace {

using namespace beamsched;

thread_local std::string g_last_error;

bs_status fail(bs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body and maps exceptions to status codes.
template <class Body>
bs_status guarded(Body&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(static_cast<bs_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BS_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(BS_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BS_INTERNAL, e.what());
  } catch (...) {
    return fail(BS_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define BS_REQUIRE(cond, msg) \
  do {                        \
    if (!(cond)) return fail(BS_INVALID_ARGUMENT, msg); \
  } while (0)

const TargetSpec& target_at(const bs_scenario* s, int target) {
  if (target < 0 || target >= s->spec.target_count())
    throw std::invalid_argument("target index " + std::to_string(target) + " out of range");
  return s->spec.targets[static_cast<std::size_t>(target)];
}

PolicyKind policy_or_throw(const char* name) {
  if (!name) throw std::invalid_argument("policy name is NULL");
  auto kind = parse_policy_kind(name);
  if (!kind) throw ConfigError("unknown policy '" + std::string(name) + "'");
  return *kind;
}

}  // namespace

extern "C" {

const char* bs_version(void) { return BEAMSCHED_VERSION; }

const char* bs_status_name(bs_status status) {
  switch (status) {
    case BS_OK: return "ok";
    case BS_PROBE_FAILED: return "probe failed";
    case BS_CONFIG: return "configuration error";
    case BS_INDEX_ANOMALY: return "index anomaly";
    case BS_DUAL_SETUP: return "dual setup error";
    case BS_CONVERGENCE: return "convergence failure";
    case BS_NUMERICAL: return "numerical error";
    case BS_IO: return "I/O error";
    case BS_INVALID_ARGUMENT: return "invalid argument";
    case BS_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bs_last_error(void) { return g_last_error.c_str(); }

void bs_string_free(char* s) { std::free(s); }

void bs_set_log_level(int level) {
  log::set_level(level <= 0 ? log::Level::quiet : level == 1 ? log::Level::warn : log::Level::info);
}

int bs_resolve_threads(int requested) { return resolve_threads(requested); }

bs_status bs_scenario_load(const char* path, bs_scenario** out) {
  BS_REQUIRE(path && out, "path and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new bs_scenario{validate(load_scenario(path))};
    return BS_OK;
  });
}

bs_status bs_scenario_parse(const char* json_text, bs_scenario** out) {
  BS_REQUIRE(json_text && out, "json_text and out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new bs_scenario{validate(parse_scenario_text(json_text))};
    return BS_OK;
  });
}

void bs_scenario_free(bs_scenario* scenario) { delete scenario; }

bs_status bs_scenario_to_json(const bs_scenario* scenario, char** out) {
  BS_REQUIRE(scenario && out, "scenario and out must not be NULL");
  return guarded([&] {
    *out = copy_string(to_json(scenario->spec).dump(2));
    return BS_OK;
  });
}

int bs_scenario_target_count(const bs_scenario* s) { return s ? s->spec.target_count() : 0; }
int bs_scenario_radars(const bs_scenario* s) { return s ? s->spec.radars : 0; }
int bs_scenario_horizon(const bs_scenario* s) { return s ? s->spec.horizon : 0; }
int bs_scenario_is_scalar(const bs_scenario* s) { return s && s->spec.all_scalar() ? 1 : 0; }

int bs_policy_known(const char* name) { return name && parse_policy_kind(name) ? 1 : 0; }

bs_status bs_run_episode(const bs_scenario* scenario, const char* policy, int horizon, uint64_t seed,
                         double* cost_out, unsigned char* actions_out) {
  BS_REQUIRE(scenario && cost_out, "scenario and cost_out must not be NULL");
  BS_REQUIRE(horizon >= 0, "horizon must be >= 0");
  return guarded([&] {
    const auto ep = run_episode(scenario->spec, {policy_or_throw(policy), true}, horizon, seed);
    *cost_out = ep.discounted_cost;
    if (actions_out)
      for (const auto& a : ep.actions) actions_out = std::copy(a.begin(), a.end(), actions_out);
    return BS_OK;
  });
}

bs_status bs_mp_index(const bs_scenario* scenario, int target, double level, double* out) {
  BS_REQUIRE(scenario && out, "scenario and out must not be NULL");
  return guarded([&] {
    const auto& t = target_at(scenario, target);
    const TecState p(identity(t.dim()) * level);
    *out = mp_index(p, t, {scenario->spec.discount, scenario->spec.truncation}).value;
    return BS_OK;
  });
}

bs_status bs_index_dump(const bs_scenario* scenario, int target, double p_min, double p_max, double step, int tau,
                        const char* path, int* anomalies_out) {
  BS_REQUIRE(scenario && path, "scenario and path must not be NULL");
  return guarded([&] {
    const auto& t = target_at(scenario, target);
    if (!(p_min > 0.0) || !(p_max >= p_min) || !(step > 0.0))
      throw ConfigError("index grid needs 0 < p_min <= p_max and step > 0");
    const IndexSettings settings{scenario->spec.discount, tau > 0 ? tau : scenario->spec.truncation};
    const auto grid = make_grid(p_min, p_max, step);
    const auto rows = tabulate_indices(t, settings, grid);
    auto out = open_output(path);
    CsvWriter w(out);
    w.header({"P_or_trace_over_L", "mp", "tec", "myopic", "g", "flag"});
    int anomalies = 0;
    for (const auto& r : rows) {
      w.field(r.level).field(r.mp).field(r.tec).field(r.myopic).field(r.marginal_work).field(r.mp ? 0 : 1);
      w.end_row();
      if (!r.mp) ++anomalies;
    }
    out.flush();
    if (!out) throw IoError(std::string("failed writing '") + path + "'");
    if (anomalies_out) *anomalies_out = anomalies;
    if (anomalies > 0)
      return fail(BS_INDEX_ANOMALY, std::to_string(anomalies) + " grid points with non-positive marginal work");
    return BS_OK;
  });
}

void bs_simulate_options_init(bs_simulate_options* o) {
  if (!o) return;
  o->replications = 100;
  o->seed = 1;
  o->horizon = -1;
  o->threads = 0;
  o->nonneg_filter = 1;
  o->with_bound = 0;
  o->anomaly_ratio = 0;
}

bs_status bs_simulate(const bs_scenario* scenario, const char* const* policies, size_t policy_count,
                      const bs_simulate_options* options, bs_result** out) {
  BS_REQUIRE(scenario && out, "scenario and out must not be NULL");
  BS_REQUIRE(policies || policy_count == 0, "policies must not be NULL");
  *out = nullptr;
  bs_simulate_options defaults;
  bs_simulate_options_init(&defaults);
  const bs_simulate_options& o = options ? *options : defaults;
  return guarded([&] {
    const auto rule = o.anomaly_ratio ? AnomalyRule::raw_ratio : AnomalyRule::fail;
    std::vector<PolicyOptions> list;
    for (size_t i = 0; i < policy_count; ++i) list.push_back({policy_or_throw(policies[i]), o.nonneg_filter != 0, rule});
    if (list.empty())
      for (auto k : {PolicyKind::whittle_mp, PolicyKind::myopic, PolicyKind::tec_trace})
        list.push_back({k, o.nonneg_filter != 0, rule});
    MonteCarloOptions mc;
    mc.replications = o.replications;
    mc.master_seed = o.seed;
    mc.horizon = o.horizon;
    mc.threads = resolve_threads(o.threads);
    auto res = std::make_unique<bs_result>();
    res->result = monte_carlo(scenario->spec, list, mc);
    if (o.with_bound) {
      const auto dual = replicated_dual_bound(scenario->spec, o.seed, o.replications, mc.threads);
      attach_gaps(res->result, dual.mean_bound);
    }
    for (const auto& p : res->result.policies) res->names.emplace_back(to_string(p.policy.kind));
    *out = res.release();
    return BS_OK;
  });
}

void bs_result_free(bs_result* result) { delete result; }

size_t bs_result_policy_count(const bs_result* r) { return r ? r->result.policies.size() : 0; }

bs_status bs_result_policy(const bs_result* r, size_t index, bs_policy_summary* out) {
  BS_REQUIRE(r && out, "result and out must not be NULL");
  BS_REQUIRE(index < r->result.policies.size(), "policy index out of range");
  const auto& p = r->result.policies[index];
  out->policy = r->names[index].c_str();
  out->mean_cost = p.mean_cost;
  out->std_error = p.standard_error;
  out->runtime_ms = p.runtime_ms;
  out->tail_bound = p.mean_tail_bound;
  out->index_anomalies = p.index_anomalies;
  out->has_gap = p.gap_percent ? 1 : 0;
  out->gap_percent = p.gap_percent.value_or(0.0);
  return BS_OK;
}

size_t bs_result_costs(const bs_result* r, size_t index, const double** costs) {
  if (!r || !costs || index >= r->result.policies.size()) return 0;
  *costs = r->result.policies[index].costs.data();
  return r->result.policies[index].costs.size();
}

bs_status bs_result_dual_bound(const bs_result* r, double* out) {
  BS_REQUIRE(r && out, "result and out must not be NULL");
  if (!r->result.dual_bound) return fail(BS_INVALID_ARGUMENT, "no lower bound was computed");
  *out = *r->result.dual_bound;
  return BS_OK;
}

bs_status bs_result_write_csv(const bs_result* r, const char* path) {
  BS_REQUIRE(r && path, "result and path must not be NULL");
  return guarded([&] {
    auto out = open_output(path);
    write_results_csv(out, std::span<const ExperimentResult>(&r->result, 1));
    out.flush();
    if (!out) throw IoError(std::string("failed writing '") + path + "'");
    return BS_OK;
  });
}

void bs_bound_options_init(bs_bound_options* o) {
  if (!o) return;
  o->has_lambda_max = 0;
  o->lambda_max = 0.0;
  o->has_tol = 0;
  o->tol = 0.0;
  o->replications = 1;
  o->seed = 1;
  o->threads = 0;
}

bs_status bs_lower_bound(const bs_scenario* scenario, const bs_bound_options* options, const char* trace_path,
                         double* lambda_star, double* bound) {
  BS_REQUIRE(scenario && bound, "scenario and bound must not be NULL");
  bs_bound_options defaults;
  bs_bound_options_init(&defaults);
  const bs_bound_options& o = options ? *options : defaults;
  return guarded([&] {
    if (!scenario->spec.all_scalar()) throw ConfigError("the lower bound needs a scalar scenario");
    DualOptions dual;
    if (o.has_lambda_max) dual.subsidy_max = o.lambda_max;
    if (o.has_tol) dual.search_tol = o.tol;
    const auto est = replicated_dual_bound(scenario->spec, o.seed, std::max(o.replications, 1),
                                           resolve_threads(o.threads), dual);
    if (trace_path) {
      auto out = open_output(trace_path);
      write_dual_trace_csv(out, est.per_replication.front());
    }
    *bound = est.mean_bound;
    if (lambda_star) *lambda_star = est.per_replication.front().best_subsidy;
    return BS_OK;
  });
}

void bs_pcl_options_init(bs_pcl_options* o) {
  if (!o) return;
  o->p_min = 0.01;
  o->p_max = 20.0;
  o->step = 0.01;
  o->thresholds = nullptr;
  o->threshold_count = 0;
  o->tolerance = 1e-9;
  o->threads = 0;
}

bs_status bs_pcl_check(const bs_scenario* scenario, const bs_pcl_options* options, const char* out_dir,
                       char** summary_out) {
  BS_REQUIRE(scenario && out_dir, "scenario and out_dir must not be NULL");
  bs_pcl_options defaults;
  bs_pcl_options_init(&defaults);
  const bs_pcl_options& o = options ? *options : defaults;
  return guarded([&] {
    ProbeSettings ps;
    ps.index = {scenario->spec.discount, scenario->spec.truncation};
    ps.tolerance = o.tolerance;
    ps.threads = resolve_threads(o.threads);
    if (!(o.p_min > 0.0) || !(o.p_max >= o.p_min) || !(o.step > 0.0))
      throw ConfigError("probe grid needs 0 < p_min <= p_max and step > 0");
    const auto grid = make_grid(o.p_min, o.p_max, o.step);
    std::vector<double> zs = o.thresholds ? std::vector<double>(o.thresholds, o.thresholds + o.threshold_count)
                                          : std::vector<double>{4.0, 10.0};
    const std::filesystem::path dir(out_dir);
    std::ostringstream summary;
    bool pass = true;
    for (int n = 0; n < scenario->spec.target_count(); ++n) {
      const auto& t = scenario->spec.targets[static_cast<std::size_t>(n)];
      const std::string name = "target" + std::to_string(n);
      const auto work = probe_marginal_work(t, grid, zs, ps);
      const auto regularity = probe_index_regularity(t, grid, ps);
      {
        auto out = open_output(dir / (name + "_work.csv"));
        write_probe_csv(out, work);
      }
      {
        auto out = open_output(dir / (name + "_mp.csv"));
        write_probe_csv(out, regularity);
      }
      summary << probe_summary(name + (t.tag.empty() ? "" : " (" + t.tag + ")"), work)
              << probe_summary(name + (t.tag.empty() ? "" : " (" + t.tag + ")"), regularity);
      pass = pass && work.pass && regularity.pass;
    }
    summary << (pass ? "PASS" : "FAIL") << " overall\n";
    {
      auto out = open_output(dir / "summary.txt");
      out << summary.str();
    }
    if (summary_out) *summary_out = copy_string(summary.str());
    if (!pass) return fail(BS_PROBE_FAILED, "one or more PCL probes failed");
    return BS_OK;
  });
}

bs_status bs_preset_names(char** out) {
  BS_REQUIRE(out, "out must not be NULL");
  return guarded([&] {
    std::string s;
    for (auto n : preset_names()) {
      s += n;
      s += '\n';
    }
    *out = copy_string(s);
    return BS_OK;
  });
}

bs_status bs_reproduce(const char* preset, const char* out_dir, uint64_t seed, int replications, int threads,
                       const int* sizes, size_t size_count, int svg, char** summary_json) {
  BS_REQUIRE(preset && out_dir, "preset and out_dir must not be NULL");
  return guarded([&] {
    ReproduceOptions o;
    o.out_dir = out_dir;
    o.seed = seed;
    o.replications = replications > 0 ? replications : 100;
    o.threads = resolve_threads(threads);
    if (sizes && size_count > 0) o.sizes.assign(sizes, sizes + size_count);
    o.svg = svg != 0;
    const auto rep = reproduce(preset, o);
    if (summary_json) *summary_json = copy_string(rep.summary.dump(2));
    return BS_OK;
  });
}

}  // extern "C"
