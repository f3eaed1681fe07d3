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

// C interface to libedgepart. Every object is an opaque handle owned by the
// caller and released with the matching *_free function. Functions that can
// fail return an ep_status; on failure ep_last_error() describes the problem
// for the calling thread. Strings returned through `char**` are allocated by
// the library and released with ep_string_free.

#ifndef EDGEPART_EDGEPART_H_
#define EDGEPART_EDGEPART_H_

#include <stddef.h>
#include <stdint.h>

#if defined(EP_BUILDING_LIBRARY)
#define EP_API __attribute__((visibility("default")))
#else
#define EP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ep_status {
  EP_OK = 0,
  EP_ERR_INVALID_ARGUMENT = 1,  // null handle, bad index, bad count
  EP_ERR_PARSE = 2,
  EP_ERR_VALIDATION = 3,
  EP_ERR_DOMAIN = 4,
  EP_ERR_IO = 5,
  EP_ERR_NOT_FOUND = 6,
  EP_ERR_SCHEMA = 7,
  EP_ERR_INTERNAL = 8,
} ep_status;

typedef struct ep_manifest ep_manifest;
typedef struct ep_plan ep_plan;
typedef struct ep_run ep_run;
typedef struct ep_report ep_report;
typedef struct ep_scheduler ep_scheduler;

EP_API const char* ep_version(void);
EP_API const char* ep_status_string(ep_status status);
// Message for the last failure on this thread; "" if none.
EP_API const char* ep_last_error(void);
EP_API void ep_string_free(char* s);

/* Manifests ---------------------------------------------------------------*/

EP_API ep_status ep_manifest_load(const char* path, ep_manifest** out);
EP_API ep_status ep_manifest_parse(const char* text, size_t len,
                                   ep_manifest** out);
EP_API void ep_manifest_free(ep_manifest* m);
EP_API size_t ep_manifest_layer_count(const ep_manifest* m);
// Borrowed; valid until the manifest is freed.
EP_API const char* ep_manifest_name(const ep_manifest* m);
EP_API ep_status ep_manifest_total_cost(const ep_manifest* m, uint64_t* out);
// Inclusive layer range.
EP_API ep_status ep_manifest_sub(const ep_manifest* m, size_t first,
                                 size_t last, ep_manifest** out);
EP_API ep_status ep_manifest_save(const ep_manifest* m, const char* path);

/* Partitioning ------------------------------------------------------------*/

typedef struct ep_node_capability {
  const char* node_id;
  double cpu;
  double memory_mib;
} ep_node_capability;

// Greedy split into k partitions followed by up to `max_iters` rebalance
// passes (0 skips rebalancing).
EP_API ep_status ep_partition(const ep_manifest* m, size_t k, size_t max_iters,
                              ep_plan** out);
// One partition per node, sized by capability score.
EP_API ep_status ep_partition_capability(const ep_manifest* m,
                                         const ep_node_capability* nodes,
                                         size_t count, double cpu_weight,
                                         double memory_weight, ep_plan** out);
// Capability partition over a scenario's initial nodes and weights.
EP_API ep_status ep_partition_scenario(const ep_manifest* m,
                                       const char* scenario_path,
                                       ep_plan** out);
EP_API void ep_plan_free(ep_plan* p);
EP_API size_t ep_plan_count(const ep_plan* p);
EP_API ep_status ep_plan_range(const ep_plan* p, size_t index, size_t* first,
                               size_t* last);
EP_API ep_status ep_plan_cost(const ep_plan* p, size_t index, uint64_t* out);
// Borrowed node id, or NULL when the partition has no assigned node.
EP_API const char* ep_plan_node(const ep_plan* p, size_t index);
EP_API double ep_plan_balance(const ep_plan* p);
EP_API ep_status ep_plan_to_json(const ep_plan* p, char** out);
EP_API ep_status ep_plan_save(const ep_plan* p, const char* path);
// Writes `<model>.part<i>.jsonl` for every partition into `dir`.
EP_API ep_status ep_plan_export(const ep_plan* p, const char* dir);

/* Simulation --------------------------------------------------------------*/

typedef struct ep_sim_options {
  int has_seed;                       // nonzero: `seed` overrides the scenario
  uint64_t seed;
  const char* scheduler_config_path;  // NULL keeps the scenario's config
  int measure_wall_time;              // nonzero: report scheduling overhead
} ep_sim_options;

// `options` may be NULL.
EP_API ep_status ep_simulate(const char* scenario_path,
                             const ep_sim_options* options, ep_run** out);
EP_API void ep_run_free(ep_run* r);
EP_API ep_status ep_run_report(const ep_run* r, ep_report** out);
// One JSON task record per line.
EP_API ep_status ep_run_save_task_records(const ep_run* r, const char* path);
// Human-readable per-node scheduler summary.
EP_API ep_status ep_run_scheduler_summary(const ep_run* r, char** out);

/* Reports -----------------------------------------------------------------*/

EP_API ep_status ep_report_load(const char* path, ep_report** out);
EP_API ep_status ep_report_parse(const char* text, size_t len,
                                 ep_report** out);
EP_API void ep_report_free(ep_report* r);
EP_API ep_status ep_report_to_json(const ep_report* r, char** out);
EP_API ep_status ep_report_save(const ep_report* r, const char* path);
EP_API ep_status ep_report_save_csv(const ep_report* r, const char* path);
// Flat metric by name (see the CSV header). `present` is 0 for null.
EP_API ep_status ep_report_get(const ep_report* r, const char* metric,
                               double* value, int* present);
// Percent change of `metric` against `baseline`; `present` is 0 when
// either side is null or the baseline is 0.
EP_API ep_status ep_report_delta(const ep_report* r, const ep_report* baseline,
                                 const char* metric, double* delta_pct,
                                 int* present);
EP_API ep_status ep_report_compare(const ep_report* r,
                                   const ep_report* baseline, char** table);

/* Scheduler ---------------------------------------------------------------*/

typedef struct ep_node_state {
  const char* node_id;
  double cpu_avail;
  double mem_avail_mib;
  double current_load;
  double network_latency_ms;
} ep_node_state;

typedef struct ep_task {
  const char* task_id;
  double cpu_req;
  double mem_req_mib;
  int priority;
} ep_task;

// `config_json` may be NULL for defaults.
EP_API ep_status ep_scheduler_create(const char* config_json,
                                     ep_scheduler** out);
EP_API void ep_scheduler_free(ep_scheduler* s);
EP_API ep_status ep_scheduler_add_node(ep_scheduler* s,
                                       const ep_node_state* node);
EP_API ep_status ep_scheduler_update_node(ep_scheduler* s,
                                          const ep_node_state* node);
EP_API ep_status ep_scheduler_remove_node(ep_scheduler* s, const char* node_id);
// Writes the chosen node id to `*node_id` (free with ep_string_free), or
// NULL when no node is eligible.
EP_API ep_status ep_scheduler_select(ep_scheduler* s, const ep_task* task,
                                     char** node_id);
EP_API ep_status ep_scheduler_assign(ep_scheduler* s, const char* node_id);
EP_API ep_status ep_scheduler_complete(ep_scheduler* s, const ep_task* task,
                                       const char* node_id, double start_ms,
                                       double end_ms);
EP_API uint64_t ep_scheduler_decisions(const ep_scheduler* s);
EP_API uint64_t ep_scheduler_score_evaluations(const ep_scheduler* s);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // EDGEPART_EDGEPART_H_
