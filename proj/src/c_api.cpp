/* Copyright 2026 The edgepart Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "edgepart/edgepart.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "edgepart/cost.hpp"
#include "edgepart/errors.hpp"
#include "edgepart/manifest.hpp"
#include "edgepart/metrics.hpp"
#include "edgepart/partitioner.hpp"
#include "edgepart/scenario.hpp"
#include "edgepart/scheduler.hpp"
#include "edgepart/sim.hpp"

struct ep_manifest {
  edgepart::ModelManifest model;
};

struct ep_plan {
  edgepart::PartitionPlan plan;
  edgepart::ModelManifest model;
  edgepart::Cost total = 0;
};

struct ep_run {
  edgepart::MetricsReport report;
  std::vector<edgepart::TaskRecord> records;
  edgepart::SchedulerSummary summary;
  edgepart::SchedulerCounters counters;
};

struct ep_report {
  edgepart::MetricsReport report;
};

struct ep_scheduler {
  edgepart::Scheduler scheduler;
};

namespace {

thread_local std::string g_last_error;

ep_status fail(ep_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Maps every exception the core can raise onto a status code.
template <typename F>
ep_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return EP_OK;
  } catch (const edgepart::ParseError& e) {
    return fail(EP_ERR_PARSE, e.what());
  } catch (const edgepart::ValidationError& e) {
    return fail(EP_ERR_VALIDATION, e.what());
  } catch (const edgepart::DomainError& e) {
    return fail(EP_ERR_DOMAIN, e.what());
  } catch (const edgepart::IoError& e) {
    return fail(EP_ERR_IO, e.what());
  } catch (const edgepart::NotFoundError& e) {
    return fail(EP_ERR_NOT_FOUND, e.what());
  } catch (const edgepart::SchemaError& e) {
    return fail(EP_ERR_SCHEMA, e.what());
  } catch (const edgepart::InternalError& e) {
    return fail(EP_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EP_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw edgepart::IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw edgepart::IoError("failed writing '" + path + "'");
}

edgepart::NodeState to_state(const ep_node_state& n) {
  edgepart::NodeState s;
  s.node_id = n.node_id;
  s.cpu_avail = n.cpu_avail;
  s.mem_avail_mib = n.mem_avail_mib;
  s.current_load = n.current_load;
  s.network_latency_ms = n.network_latency_ms;
  return s;
}

edgepart::TaskRequest to_task(const ep_task& t) {
  return {t.task_id ? t.task_id : "", t.cpu_req, t.mem_req_mib, t.priority};
}

std::optional<double> flat_metric(const edgepart::MetricsReport& r,
                                  const std::string& name, bool& found) {
  for (const auto& [key, value] : edgepart::flatten(r)) {
    if (key == name) {
      found = true;
      return value;
    }
  }
  found = true;
  if (name == "measured_requests") {
    return static_cast<double>(r.measured_requests);
  }
  if (name == "rescheduled") return static_cast<double>(r.tasks.rescheduled);
  if (name == "starvation_ms") return r.starvation_ms;
  found = false;
  return std::nullopt;
}

std::string format_summary(const ep_run& run) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %10s %14s %10s %8s\n", "node",
                "completed", "mean_exec_ms", "in_flight", "load");
  out += line;
  for (const auto& n : run.summary.nodes) {
    char mean[32] = "-";
    if (n.mean_exec_ms) std::snprintf(mean, sizeof mean, "%.2f", *n.mean_exec_ms);
    std::snprintf(line, sizeof line, "%-12s %10zu %14s %10zu %8.3f\n",
                  n.node_id.c_str(), n.completed, mean, n.in_flight,
                  n.current_load);
    out += line;
  }
  std::snprintf(line, sizeof line,
                "decisions %llu, score evaluations %llu, cache hits %llu\n",
                static_cast<unsigned long long>(run.counters.decisions),
                static_cast<unsigned long long>(run.counters.score_evaluations),
                static_cast<unsigned long long>(run.counters.cache_hits));
  out += line;
  return out;
}

}  // namespace

#define EP_REQUIRE(cond)                                              \
  do {                                                                \
    if (!(cond)) return fail(EP_ERR_INVALID_ARGUMENT, #cond " failed"); \
  } while (0)

extern "C" {

const char* ep_version(void) { return "0.1.0"; }

const char* ep_status_string(ep_status status) {
  switch (status) {
    case EP_OK:
      return "ok";
    case EP_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case EP_ERR_PARSE:
      return "parse error";
    case EP_ERR_VALIDATION:
      return "validation error";
    case EP_ERR_DOMAIN:
      return "domain error";
    case EP_ERR_IO:
      return "i/o error";
    case EP_ERR_NOT_FOUND:
      return "not found";
    case EP_ERR_SCHEMA:
      return "schema error";
    case EP_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* ep_last_error(void) { return g_last_error.c_str(); }

void ep_string_free(char* s) { std::free(s); }

/* Manifests */

ep_status ep_manifest_load(const char* path, ep_manifest** out) {
  EP_REQUIRE(path && out);
  return guarded([&] {
    *out = new ep_manifest{edgepart::load_manifest(path)};
  });
}

ep_status ep_manifest_parse(const char* text, size_t len, ep_manifest** out) {
  EP_REQUIRE(text && out);
  return guarded([&] {
    *out = new ep_manifest{edgepart::parse_manifest({text, len})};
  });
}

void ep_manifest_free(ep_manifest* m) { delete m; }

size_t ep_manifest_layer_count(const ep_manifest* m) {
  return m ? m->model.layers.size() : 0;
}

const char* ep_manifest_name(const ep_manifest* m) {
  return m ? m->model.name.c_str() : "";
}

ep_status ep_manifest_total_cost(const ep_manifest* m, uint64_t* out) {
  EP_REQUIRE(m && out);
  return guarded([&] { *out = edgepart::cost_profile(m->model).total(); });
}

ep_status ep_manifest_sub(const ep_manifest* m, size_t first, size_t last,
                          ep_manifest** out) {
  EP_REQUIRE(m && out);
  return guarded([&] {
    *out = new ep_manifest{edgepart::sub_manifest(m->model, {first, last})};
  });
}

ep_status ep_manifest_save(const ep_manifest* m, const char* path) {
  EP_REQUIRE(m && path);
  return guarded([&] { edgepart::save_manifest(m->model, path); });
}

/* Partitioning */

ep_status ep_partition(const ep_manifest* m, size_t k, size_t max_iters,
                       ep_plan** out) {
  EP_REQUIRE(m && out);
  return guarded([&] {
    const auto profile = edgepart::cost_profile(m->model);
    auto plan = edgepart::partition_model(profile, k, max_iters);
    *out = new ep_plan{std::move(plan), m->model, profile.total()};
  });
}

ep_status ep_partition_capability(const ep_manifest* m,
                                  const ep_node_capability* nodes, size_t count,
                                  double cpu_weight, double memory_weight,
                                  ep_plan** out) {
  EP_REQUIRE(m && out && (nodes || count == 0));
  return guarded([&] {
    std::vector<edgepart::NodeCapability> caps;
    for (size_t i = 0; i < count; ++i) {
      if (!nodes[i].node_id) throw edgepart::ValidationError("node id is null");
      caps.push_back({nodes[i].node_id, nodes[i].cpu, nodes[i].memory_mib});
    }
    const auto profile = edgepart::cost_profile(m->model);
    edgepart::CapabilityWeights w;
    w.cpu = cpu_weight;
    w.memory = memory_weight;
    auto plan = edgepart::capability_partition(profile, caps, w);
    *out = new ep_plan{std::move(plan), m->model, profile.total()};
  });
}

ep_status ep_partition_scenario(const ep_manifest* m, const char* scenario_path,
                                ep_plan** out) {
  EP_REQUIRE(m && scenario_path && out);
  return guarded([&] {
    const auto scenario = edgepart::load_scenario(scenario_path);
    std::vector<edgepart::NodeCapability> caps;
    for (const auto& n : scenario.nodes) {
      caps.push_back({n.id, n.profile.cpu, n.profile.memory_mib});
    }
    const auto profile = edgepart::cost_profile(m->model);
    auto plan =
        edgepart::capability_partition(profile, caps, scenario.capability_weights);
    *out = new ep_plan{std::move(plan), m->model, profile.total()};
  });
}

void ep_plan_free(ep_plan* p) { delete p; }

size_t ep_plan_count(const ep_plan* p) { return p ? p->plan.size() : 0; }

ep_status ep_plan_range(const ep_plan* p, size_t index, size_t* first,
                        size_t* last) {
  EP_REQUIRE(p && first && last && index < p->plan.size());
  *first = p->plan.ranges[index].first;
  *last = p->plan.ranges[index].last;
  return EP_OK;
}

ep_status ep_plan_cost(const ep_plan* p, size_t index, uint64_t* out) {
  EP_REQUIRE(p && out && index < p->plan.size());
  *out = p->plan.costs[index];
  return EP_OK;
}

const char* ep_plan_node(const ep_plan* p, size_t index) {
  if (!p || index >= p->plan.assigned_node.size()) return nullptr;
  const auto& node = p->plan.assigned_node[index];
  return node ? node->c_str() : nullptr;
}

double ep_plan_balance(const ep_plan* p) { return p ? p->plan.balance : 0.0; }

ep_status ep_plan_to_json(const ep_plan* p, char** out) {
  EP_REQUIRE(p && out);
  return guarded([&] {
    *out = dup_string(edgepart::serialize_plan(p->plan, p->model.name, p->total));
  });
}

ep_status ep_plan_save(const ep_plan* p, const char* path) {
  EP_REQUIRE(p && path);
  return guarded([&] {
    write_file(path, edgepart::serialize_plan(p->plan, p->model.name, p->total));
  });
}

ep_status ep_plan_export(const ep_plan* p, const char* dir) {
  EP_REQUIRE(p && dir);
  return guarded([&] {
    const std::filesystem::path base(dir);
    std::error_code ec;
    std::filesystem::create_directories(base, ec);
    if (ec) {
      throw edgepart::IoError("cannot create '" + base.string() + "': " +
                              ec.message());
    }
    for (size_t i = 0; i < p->plan.size(); ++i) {
      const auto part = edgepart::sub_manifest(p->model, p->plan.ranges[i]);
      const auto file =
          base / (p->model.name + ".part" + std::to_string(i) + ".jsonl");
      edgepart::save_manifest(part, file.string());
    }
  });
}

/* Simulation */

ep_status ep_simulate(const char* scenario_path, const ep_sim_options* options,
                      ep_run** out) {
  EP_REQUIRE(scenario_path && out);
  return guarded([&] {
    auto scenario = edgepart::load_scenario(scenario_path);
    if (options) {
      if (options->has_seed) scenario.seed = options->seed;
      if (options->scheduler_config_path) {
        scenario.scheduler =
            edgepart::load_scheduler_config(options->scheduler_config_path);
      }
      if (options->measure_wall_time) scenario.measure_wall_time = true;
    }
    edgepart::Simulator sim(std::move(scenario));
    sim.run();
    auto run = new ep_run;
    run->report = sim.report();
    run->records = sim.task_records();
    run->counters = sim.scheduler_counters();
    const auto nodes = sim.scheduler_nodes();
    run->summary =
        edgepart::scheduler_metrics(nodes, run->records, run->counters);
    *out = run;
  });
}

void ep_run_free(ep_run* r) { delete r; }

ep_status ep_run_report(const ep_run* r, ep_report** out) {
  EP_REQUIRE(r && out);
  return guarded([&] { *out = new ep_report{r->report}; });
}

ep_status ep_run_save_task_records(const ep_run* r, const char* path) {
  EP_REQUIRE(r && path);
  return guarded([&] {
    std::string text;
    for (const auto& rec : r->records) {
      text += edgepart::serialize_task_record(rec);
      text += '\n';
    }
    write_file(path, text);
  });
}

ep_status ep_run_scheduler_summary(const ep_run* r, char** out) {
  EP_REQUIRE(r && out);
  return guarded([&] { *out = dup_string(format_summary(*r)); });
}

/* Reports */

ep_status ep_report_load(const char* path, ep_report** out) {
  EP_REQUIRE(path && out);
  return guarded([&] { *out = new ep_report{edgepart::load_report(path)}; });
}

ep_status ep_report_parse(const char* text, size_t len, ep_report** out) {
  EP_REQUIRE(text && out);
  return guarded([&] {
    *out = new ep_report{edgepart::parse_report({text, len})};
  });
}

void ep_report_free(ep_report* r) { delete r; }

ep_status ep_report_to_json(const ep_report* r, char** out) {
  EP_REQUIRE(r && out);
  return guarded([&] { *out = dup_string(edgepart::serialize_report(r->report)); });
}

ep_status ep_report_save(const ep_report* r, const char* path) {
  EP_REQUIRE(r && path);
  return guarded([&] { edgepart::save_report(r->report, path); });
}

ep_status ep_report_save_csv(const ep_report* r, const char* path) {
  EP_REQUIRE(r && path);
  return guarded([&] { write_file(path, edgepart::report_to_csv(r->report)); });
}

ep_status ep_report_get(const ep_report* r, const char* metric, double* value,
                        int* present) {
  EP_REQUIRE(r && metric && value && present);
  bool found = false;
  const auto v = flat_metric(r->report, metric, found);
  if (!found) {
    return fail(EP_ERR_NOT_FOUND, std::string("unknown metric '") + metric + "'");
  }
  *present = v.has_value();
  *value = v.value_or(0.0);
  return EP_OK;
}

ep_status ep_report_delta(const ep_report* r, const ep_report* baseline,
                          const char* metric, double* delta_pct, int* present) {
  EP_REQUIRE(r && baseline && metric && delta_pct && present);
  bool found_a = false;
  bool found_b = false;
  const auto a = flat_metric(r->report, metric, found_a);
  const auto b = flat_metric(baseline->report, metric, found_b);
  if (!found_a || !found_b) {
    return fail(EP_ERR_NOT_FOUND, std::string("unknown metric '") + metric + "'");
  }
  const auto d = edgepart::percent_change(a, b);
  *present = d.has_value();
  *delta_pct = d.value_or(0.0);
  return EP_OK;
}

ep_status ep_report_compare(const ep_report* r, const ep_report* baseline,
                            char** table) {
  EP_REQUIRE(r && baseline && table);
  return guarded([&] {
    const auto deltas = edgepart::compare(r->report, baseline->report);
    *table = dup_string(edgepart::format_comparison(deltas));
  });
}

/* Scheduler */

ep_status ep_scheduler_create(const char* config_json, ep_scheduler** out) {
  EP_REQUIRE(out);
  return guarded([&] {
    edgepart::SchedulerConfig config;
    if (config_json) config = edgepart::parse_scheduler_config(config_json);
    *out = new ep_scheduler{edgepart::Scheduler(config)};
  });
}

void ep_scheduler_free(ep_scheduler* s) { delete s; }

ep_status ep_scheduler_add_node(ep_scheduler* s, const ep_node_state* node) {
  EP_REQUIRE(s && node && node->node_id);
  return guarded([&] { s->scheduler.add_node(to_state(*node)); });
}

ep_status ep_scheduler_update_node(ep_scheduler* s, const ep_node_state* node) {
  EP_REQUIRE(s && node && node->node_id);
  return guarded([&] {
    s->scheduler.update_node(node->node_id, node->cpu_avail,
                             node->mem_avail_mib, node->current_load,
                             node->network_latency_ms);
  });
}

ep_status ep_scheduler_remove_node(ep_scheduler* s, const char* node_id) {
  EP_REQUIRE(s && node_id);
  return guarded([&] { s->scheduler.remove_node(node_id); });
}

ep_status ep_scheduler_select(ep_scheduler* s, const ep_task* task,
                              char** node_id) {
  EP_REQUIRE(s && task && node_id);
  return guarded([&] {
    const auto chosen = s->scheduler.select(to_task(*task));
    *node_id = chosen ? dup_string(*chosen) : nullptr;
  });
}

ep_status ep_scheduler_assign(ep_scheduler* s, const char* node_id) {
  EP_REQUIRE(s && node_id);
  return guarded([&] { s->scheduler.assign(node_id); });
}

ep_status ep_scheduler_complete(ep_scheduler* s, const ep_task* task,
                                const char* node_id, double start_ms,
                                double end_ms) {
  EP_REQUIRE(s && task && node_id);
  return guarded([&] {
    edgepart::TaskRecord record;
    record.task_id = task->task_id ? task->task_id : "";
    record.node_id = node_id;
    record.submit_ms = start_ms;
    record.start_ms = start_ms;
    record.end_ms = end_ms;
    s->scheduler.complete(record, to_task(*task));
  });
}

uint64_t ep_scheduler_decisions(const ep_scheduler* s) {
  return s ? s->scheduler.counters().decisions : 0;
}

uint64_t ep_scheduler_score_evaluations(const ep_scheduler* s) {
  return s ? s->scheduler.counters().score_evaluations : 0;
}

}  // extern "C"
