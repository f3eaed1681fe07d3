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

#ifndef EDGEPART_SCHEDULER_HPP_
#define EDGEPART_SCHEDULER_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace edgepart {

// Dynamic view of one execution node as the scheduler sees it.
struct NodeState {
  std::string node_id;
  double cpu_avail = 0.0;       // core fraction
  double mem_avail_mib = 0.0;
  double current_load = 0.0;    // [0,1]
  double network_latency_ms = 0.0;
  std::size_t task_count = 0;   // in flight
  std::deque<double> exec_history;  // ms, oldest first
};

struct TaskRequest {
  std::string task_id;
  double cpu_req = 0.0;
  double mem_req_mib = 0.0;
  int priority = 0;  // carried, not consumed by node selection
};

struct ScoreWeights {
  double resource = 0.2;
  double load = 0.2;
  double performance = 0.1;
  double balance = 0.5;

  void validate() const;
};

struct CacheConfig {
  bool enabled = true;
  double cpu_granularity = 0.01;   // cores
  double mem_granularity_mib = 1.0;
};

struct SchedulerConfig {
  double overload_threshold = 0.8;
  double latency_threshold_ms = 100.0;
  std::size_t history_capacity = 50;
  ScoreWeights weights;
  CacheConfig cache;

  void validate() const;
};

// JSON object; every field optional, unknown keys rejected with
// ValidationError, syntax errors raise ParseError.
SchedulerConfig parse_scheduler_config(std::string_view text);
SchedulerConfig load_scheduler_config(const std::string& path);
std::string serialize_scheduler_config(const SchedulerConfig& config);

struct TaskRecord {
  std::string task_id;
  std::string node_id;
  double submit_ms = 0.0;
  double start_ms = 0.0;
  double end_ms = 0.0;
  double exec_ms = 0.0;
  double normalized_perf = 0.0;
};

// One compact JSON object per record, keys sorted, no trailing newline.
std::string serialize_task_record(const TaskRecord& record);

// Unclamped ((cpu_avail/cpu_req) + (mem_avail/mem_req)) / 2. A dimension
// with zero requirement is left out of the average; both zero is a
// DomainError.
double resource_score_raw(const NodeState& node, const TaskRequest& task);
// resource_score_raw clamped to [0,1].
double resource_score(const NodeState& node, const TaskRequest& task);
double load_score(const NodeState& node);
// Mean of the history after min-max normalization over the window.
double avg_normalized_exec_time(const NodeState& node);
double performance_score(const NodeState& node);
double balance_score(const NodeState& node);
double total_score(const NodeState& node, const TaskRequest& task,
                   const ScoreWeights& weights);

bool has_sufficient_resources(const NodeState& node, const TaskRequest& task);

// Overload, latency, and resource skip checks.
bool is_eligible(const NodeState& node, const TaskRequest& task,
                 const SchedulerConfig& config);

struct Selection {
  std::optional<std::size_t> index;
  double score = 0.0;
  std::size_t evaluations = 0;  // total_score computations
};

// Single pass over `nodes` in order: skip ineligible nodes, keep the first
// node whose total score is strictly greater than the best so far (best
// starts at 0).
Selection select_node(const TaskRequest& task, std::span<const NodeState> nodes,
                      const SchedulerConfig& config);

// Records a finished task: decrements the node's task count, appends the
// execution time (evicting the oldest beyond `history_capacity`), and fills
// in normalized_perf by min-max over the window (0 for a flat window). When
// `recalibrated_load` is set it replaces current_load. Throws NotFoundError
// for an unknown node and DomainError when the task count would underflow.
TaskRecord complete_task(TaskRecord record, std::vector<NodeState>& nodes,
                         std::size_t history_capacity,
                         std::optional<double> recalibrated_load = {});

// Placement hints keyed by rounded (cpu_req, mem_req, priority). A node is
// remembered for a key when it finishes that key strictly faster than the
// median of the key's recent execution times, or when the key has no
// history yet.
class PerformanceCache {
 public:
  PerformanceCache(CacheConfig config, std::size_t window);

  std::optional<std::string> lookup(const TaskRequest& task) const;
  void record(const TaskRequest& task, const std::string& node_id,
              double exec_ms);
  void forget_node(const std::string& node_id);
  std::size_t size() const { return entries_.size(); }

 private:
  using Key = std::tuple<std::int64_t, std::int64_t, int>;
  struct Entry {
    std::optional<std::string> node_id;
    std::deque<double> exec_ms;
  };
  Key key_for(const TaskRequest& task) const;

  CacheConfig config_;
  std::size_t window_;
  std::map<Key, Entry> entries_;
};

struct SchedulerCounters {
  std::uint64_t decisions = 0;
  std::uint64_t score_evaluations = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_rejections = 0;  // hint found but node failed a check
  std::uint64_t select_wall_ns = 0;
};

struct NodeSummary {
  std::string node_id;
  std::optional<double> mean_exec_ms;
  std::size_t completed = 0;
  std::size_t in_flight = 0;
  double current_load = 0.0;
};

struct SchedulerSummary {
  std::vector<NodeSummary> nodes;
  std::optional<double> mean_select_wall_ms;
  std::uint64_t score_evaluations = 0;
  std::uint64_t decisions = 0;
};

SchedulerSummary scheduler_metrics(std::span<const NodeState> nodes,
                                   std::span<const TaskRecord> records,
                                   const SchedulerCounters& counters);

// Owns the node registry, the cache, and the counters. Every mutation holds
// one lock, so readers calling snapshot() or counters() never see a node
// whose task count and history disagree.
class Scheduler {
 public:
  explicit Scheduler(SchedulerConfig config = {});

  const SchedulerConfig& config() const { return config_; }

  // Throws DomainError on a duplicate id.
  void add_node(NodeState node);
  // Throws NotFoundError for an unknown id.
  void remove_node(const std::string& node_id);
  bool has_node(const std::string& node_id) const;

  // Overwrites the dynamic resource fields, leaving task_count and history.
  void update_node(const std::string& node_id, double cpu_avail,
                   double mem_avail_mib, double current_load,
                   double network_latency_ms);

  // Consults the cache first; the hint is used only if the hinted node
  // passes every skip check. Otherwise runs select_node over the registry.
  std::optional<std::string> select(const TaskRequest& task);

  void assign(const std::string& node_id);
  TaskRecord complete(TaskRecord record, const TaskRequest& task,
                      std::optional<double> recalibrated_load = {});

  std::optional<std::string> cache_lookup(const TaskRequest& task) const;

  std::vector<NodeState> snapshot() const;
  std::optional<NodeState> node(const std::string& node_id) const;
  SchedulerCounters counters() const;

 private:
  std::vector<NodeState>::iterator find(const std::string& node_id);
  std::vector<NodeState>::const_iterator find(const std::string& node_id) const;

  SchedulerConfig config_;
  mutable std::mutex mutex_;
  std::vector<NodeState> nodes_;
  PerformanceCache cache_;
  SchedulerCounters counters_;
};

}  // namespace edgepart

#endif  // EDGEPART_SCHEDULER_HPP_
