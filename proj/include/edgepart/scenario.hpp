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

#ifndef EDGEPART_SCENARIO_HPP_
#define EDGEPART_SCENARIO_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edgepart/manifest.hpp"
#include "edgepart/partitioner.hpp"
#include "edgepart/scheduler.hpp"

namespace edgepart {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct NodeProfile {
  std::string name;  // "high", "medium", "low", or "custom"
  double cpu = 0.0;
  double memory_mib = 0.0;

  static NodeProfile high() { return {"high", 1.0, 1024.0}; }
  static NodeProfile medium() { return {"medium", 0.6, 512.0}; }
  static NodeProfile low() { return {"low", 0.4, 512.0}; }
  // Throws ValidationError for an unknown profile name.
  static NodeProfile named(std::string_view name);

  bool operator==(const NodeProfile&) const = default;
};

// Simulated execution time model:
//   ms = cost * base_ms_per_cost_unit / cpu * pressure * (1 + jitter)
// with pressure = memory_pressure_factor when the task's working set does
// not fit in the node's unreserved memory, else 1, and jitter uniform in
// +-jitter_pct percent.
struct ExecModel {
  // ~229 ms for the bundled MobileNetV2 manifest on a 1.0-cpu node.
  double base_ms_per_cost_unit = 5.2e-6;
  double memory_pressure_factor = 1.5;
  double jitter_pct = 5.0;
  double bytes_per_param = 4.0;

  void validate() const;
};

struct NodeSpec {
  std::string id;
  NodeProfile profile;
  double latency_ms = 5.0;
  double latency_jitter_ms = 0.0;
};

enum class ArrivalProcess { kFixedRate, kClosedLoop };

struct Workload {
  std::uint64_t requests = 100;
  std::uint32_t batch_size = 1;
  ArrivalProcess process = ArrivalProcess::kFixedRate;
  double rate_rps = 1.0;          // fixed rate
  std::uint32_t concurrency = 1;  // closed loop
  double think_ms = 0.0;          // closed loop
  double cpu_req = 0.1;
  double mem_req_mib = 64.0;
  int priority = 0;
  std::uint64_t input_bytes = 150528;       // 3x224x224 uint8 image
  std::uint64_t activation_bytes = 200704;  // per partition boundary
};

struct MembershipEvent {
  enum class Action { kJoin, kLeave };
  double time_ms = 0.0;
  Action action = Action::kJoin;
  NodeSpec node;  // join: full spec; leave: only id is used
};

enum class ExecutionMode { kMonolithic, kPartitioned };
enum class PartitionStrategy { kGreedy, kCapability };

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = kDefaultSeed;
  ModelManifest model;
  ExecutionMode mode = ExecutionMode::kMonolithic;
  std::size_t partitions = 1;
  PartitionStrategy strategy = PartitionStrategy::kGreedy;
  CapabilityWeights capability_weights;
  std::vector<NodeSpec> nodes;
  Workload workload;
  std::vector<MembershipEvent> membership;
  double warmup_ms = 30000.0;
  double measurement_ms = 300000.0;
  ExecModel exec;
  double bandwidth_mbps = 1000.0;
  SchedulerConfig scheduler;
  double queue_timeout_ms = 10000.0;
  double dispatch_retry_ms = 10.0;
  double monitor_interval_ms = 1000.0;
  double monitor_window_ms = 100.0;
  double load_window_ms = 1000.0;
  bool drain = true;
  bool measure_wall_time = false;

  double end_ms() const { return warmup_ms + measurement_ms; }
  // Throws ValidationError describing the first problem found.
  void validate() const;
};

// JSON scenario document. Relative manifest and scheduler-config paths are
// resolved against `base_dir`. Throws ParseError or ValidationError.
Scenario parse_scenario(std::string_view text, const std::string& base_dir);
Scenario load_scenario(const std::string& path);

}  // namespace edgepart

#endif  // EDGEPART_SCENARIO_HPP_
