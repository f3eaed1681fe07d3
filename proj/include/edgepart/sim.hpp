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

#ifndef EDGEPART_SIM_HPP_
#define EDGEPART_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "edgepart/cost.hpp"
#include "edgepart/metrics.hpp"
#include "edgepart/partitioner.hpp"
#include "edgepart/rng.hpp"
#include "edgepart/scenario.hpp"
#include "edgepart/scheduler.hpp"

namespace edgepart {

// `jitter_draw` is a uniform sample in [-1, 1]. Throws DomainError for a
// non-positive cpu.
double exec_time_ms(double cost, const NodeProfile& node, const ExecModel& model,
                    double jitter_draw, bool memory_pressure = false);
double exec_time_ms(double cost, const NodeProfile& node, const ExecModel& model,
                    Rng& rng, bool memory_pressure = false);

// Equal-time events run in this order, then in insertion order.
enum class SimEventKind {
  kTaskComplete,
  kTaskArrival,  // new request, or a dispatched stage reaching its node
  kNodeJoin,
  kNodeLeave,
  kDispatchRetry,
  kMonitorSample,
};

std::string_view to_string(SimEventKind kind);

struct SimEvent {
  double time_ms = 0.0;
  SimEventKind kind = SimEventKind::kTaskArrival;
  std::uint64_t seq = 0;
  std::uint64_t subject = 0;  // task, request, or membership index
  std::uint32_t attempt = 0;
  bool delivery = false;      // kTaskArrival: stage delivery vs new request
};

// One processed event, as recorded in the trace.
struct TraceEntry {
  double time_ms = 0.0;
  SimEventKind kind = SimEventKind::kTaskArrival;
  std::uint64_t subject = 0;

  bool operator==(const TraceEntry&) const = default;
};

// Per-node runtime state inside the simulator.
struct SimNode {
  NodeSpec spec;
  bool online = true;
  double joined_ms = 0.0;
  std::optional<double> left_ms;
  std::deque<std::uint64_t> assigned;  // tasks in transit, queued, running
  std::deque<std::uint64_t> ready;     // delivered, waiting to run
  std::optional<std::uint64_t> running;
  double run_start_ms = 0.0;
  std::deque<std::pair<double, double>> busy;  // finished busy intervals
  double cpu_reserved = 0.0;
  double mem_reserved_mib = 0.0;
  std::uint64_t rx_bytes = 0;
  std::uint64_t tx_bytes = 0;
};

struct ClusterCounts {
  std::uint64_t submitted = 0;
  std::uint64_t completed = 0;
  std::uint64_t queued = 0;     // waiting for a node
  std::uint64_t in_flight = 0;  // assigned to a node
};

// Deterministic discrete-event simulator for one scenario. The core is
// single threaded; separate instances share nothing.
class Simulator {
 public:
  explicit Simulator(Scenario scenario);

  // Runs warm-up and measurement (and the drain phase when enabled).
  void run();
  // Processes every event with time <= t.
  void run_until(double t_ms);

  // Schedule membership changes. A join makes the node eligible from the
  // next scheduling decision at or after `time_ms`. Duplicate or unknown
  // ids raise DomainError / NotFoundError when the event is processed.
  void node_join(NodeSpec node, double time_ms);
  void node_leave(const std::string& node_id, double time_ms);
  // Injects one request arrival.
  void submit_request(double time_ms);

  MetricsReport report() const;

  double now() const { return now_; }
  ClusterCounts counts() const;
  const std::vector<RequestRecord>& requests() const { return finished_; }
  const std::vector<TaskRecord>& task_records() const { return task_records_; }
  const std::vector<ResourceSample>& samples() const { return samples_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  const std::vector<SimNode>& nodes() const { return nodes_; }
  std::vector<NodeState> scheduler_nodes() const { return scheduler_.snapshot(); }
  const PartitionPlan& plan() const { return plan_; }
  const CapabilityNorm& capability_norm() const { return norm_; }
  std::uint64_t rescheduled() const { return rescheduled_; }
  double starvation_ms() const;
  SchedulerCounters scheduler_counters() const { return scheduler_.counters(); }

  // Busy fraction of the trailing load window at the current time.
  double node_load(const std::string& node_id) const;

 private:
  struct Stage {
    Cost cost = 0;
    double working_set_mib = 0.0;
  };
  struct Request {
    std::uint64_t id = 0;
    double submit_ms = 0.0;
    std::shared_ptr<const std::vector<Stage>> stages;
    std::size_t stage = 0;
    std::optional<std::string> last_node;
    double exec_ms = 0.0;
    double transfer_ms = 0.0;
    double queue_wait_ms = 0.0;
    std::uint64_t bytes = 0;
    bool rescheduled = false;
    bool timed_out = false;
    bool from_workload = true;  // injected requests do not drive arrivals
  };
  struct Task {
    std::uint64_t id = 0;
    std::uint64_t request = 0;
    std::size_t stage = 0;
    TaskRequest spec;
    double ready_ms = 0.0;  // entered the global queue
    double start_ms = 0.0;
    std::uint32_t attempt = 0;
    std::optional<std::string> node;
  };
  struct EventOrder {
    bool operator()(const SimEvent& a, const SimEvent& b) const;
  };

  void push(SimEvent ev);
  void process(const SimEvent& ev);
  void on_request_arrival(double t, bool from_workload);
  void on_delivery(std::uint64_t task_id, std::uint32_t attempt);
  void on_complete(std::uint64_t task_id, std::uint32_t attempt);
  void on_join(const NodeSpec& spec);
  void on_leave(const std::string& node_id);
  void on_monitor();
  void dispatch();
  void assign(Task& task, SimNode& node);
  void start_next(SimNode& node);
  void enqueue_stage(Request& request);
  void refresh_scheduler_view();
  void refresh_plan();
  void schedule_next_arrival(double after_ms);
  void check_conservation() const;
  void note_starvation();

  SimNode* find_node(const std::string& id);
  const SimNode* find_node(const std::string& id) const;
  double busy_within(const SimNode& node, double from_ms, double to_ms) const;
  bool statically_feasible(const TaskRequest& task) const;
  std::size_t online_count() const;

  Scenario scenario_;
  Scheduler scheduler_;
  CostProfile profile_;
  PartitionPlan plan_;
  std::shared_ptr<const std::vector<Stage>> stages_;
  CapabilityNorm norm_;
  Rng exec_rng_;
  Rng net_rng_;

  std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> events_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;

  std::vector<SimNode> nodes_;  // join order; offline nodes stay listed
  std::map<std::uint64_t, Request> requests_;
  std::map<std::uint64_t, Task> tasks_;
  std::deque<std::uint64_t> pending_;
  std::vector<NodeSpec> joins_;
  std::vector<std::string> leaves_;
  std::uint64_t next_request_ = 0;
  std::uint64_t next_task_ = 0;
  std::uint64_t generated_ = 0;  // arrivals produced by the workload
  bool retry_pending_ = false;

  std::uint64_t submitted_ = 0;
  std::uint64_t completed_ = 0;
  std::uint64_t rescheduled_ = 0;
  std::uint64_t queue_timeouts_ = 0;
  double starvation_ms_ = 0.0;
  std::optional<double> starving_since_;

  std::vector<RequestRecord> finished_;
  std::vector<TaskRecord> task_records_;
  std::vector<ResourceSample> samples_;
  std::vector<TraceEntry> trace_;
};

// Builds a simulator, runs it, and returns its report. Identical scenarios
// (including the seed) yield identical reports.
MetricsReport run_scenario(const Scenario& scenario);

}  // namespace edgepart

#endif  // EDGEPART_SIM_HPP_
