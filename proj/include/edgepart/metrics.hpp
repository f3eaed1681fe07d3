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

#ifndef EDGEPART_METRICS_HPP_
#define EDGEPART_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edgepart/cost.hpp"
#include "edgepart/partitioner.hpp"

namespace edgepart {

// One finished inference request, end to end.
struct RequestRecord {
  std::string request_id;
  double submit_ms = 0.0;
  double end_ms = 0.0;
  double exec_ms = 0.0;      // summed over stages
  double transfer_ms = 0.0;  // inter-partition transfers only
  std::uint64_t bytes_moved = 0;
  bool rescheduled = false;
  bool queue_timeout = false;
};

// One monitor sample; covers the 100 ms window ending at time_ms.
struct ResourceSample {
  double time_ms = 0.0;
  std::string node_id;
  double cpu_pct = 0.0;
  double mem_used_mib = 0.0;
  double mem_pct = 0.0;
  std::uint64_t net_rx_bytes = 0;  // cumulative
  std::uint64_t net_tx_bytes = 0;  // cumulative

  bool operator==(const ResourceSample&) const = default;
};

struct LatencyStats {
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;

  bool operator==(const LatencyStats&) const = default;
};

struct NodeReport {
  std::string node_id;
  bool online = true;
  std::size_t completed = 0;
  std::optional<double> mean_exec_ms;
  std::size_t in_flight = 0;
  double current_load = 0.0;
  std::optional<double> cpu_pct;

  bool operator==(const NodeReport&) const = default;
};

struct TaskCounts {
  std::uint64_t submitted = 0;
  std::uint64_t completed = 0;  // whole run, including warm-up and drain
  std::uint64_t rescheduled = 0;
  std::uint64_t queue_timeouts = 0;
  std::uint64_t queued_at_end = 0;
  std::uint64_t in_flight_at_end = 0;

  bool operator==(const TaskCounts&) const = default;
};

struct SchedulerTally {
  std::uint64_t decisions = 0;
  std::uint64_t score_evaluations = 0;
  std::uint64_t cache_hits = 0;

  bool operator==(const SchedulerTally&) const = default;
};

// Statistics cover the measurement window only. Absent values are nullopt
// and serialize as null; they are never reported as 0.
struct MetricsReport {
  bool empty = true;
  double measurement_ms = 0.0;
  std::uint64_t measured_requests = 0;
  std::optional<LatencyStats> inference_latency_ms;
  double throughput_rps = 0.0;
  std::optional<double> comm_overhead_ms;
  std::optional<double> cpu_pct;
  std::optional<double> mem_mb;
  double net_bandwidth_mb = 0.0;
  std::optional<double> stability_score;
  std::optional<double> scheduling_overhead_ms;
  double load_balance_L = 0.0;
  double starvation_ms = 0.0;
  std::vector<NodeReport> per_node;
  TaskCounts tasks;
  SchedulerTally scheduler;

  bool operator==(const MetricsReport&) const = default;
};

// Nearest-rank percentile: sorted[ceil(p/100 * n) - 1]. Throws DomainError
// for an empty input or p outside (0, 100].
double percentile_nearest_rank(std::vector<double> values, double p);

struct MeasurementWindow {
  double start_ms = 0.0;
  double end_ms = 0.0;

  double seconds() const { return (end_ms - start_ms) / 1000.0; }
  bool contains(double t) const { return t >= start_ms && t <= end_ms; }
};

// Requests count when they finish inside the window; samples when taken
// inside it. Each sample is already one aggregation window, so resource
// means are plain means over samples.
MetricsReport aggregate(std::span<const RequestRecord> records,
                        std::span<const ResourceSample> samples,
                        const MeasurementWindow& window);

enum class Better { kLower, kHigher };

struct MetricDelta {
  std::string metric;
  std::optional<double> value;     // report under test
  std::optional<double> baseline;  // reference report
  std::optional<double> delta_pct; // (value - baseline) / baseline * 100
  Better better = Better::kLower;

  bool improved() const;
};

// (value - baseline) / baseline * 100, or nullopt when either side is
// missing or the baseline is 0.
std::optional<double> percent_change(std::optional<double> value,
                                     std::optional<double> baseline);

// Flat (name, value) view in fixed order; drives compare and the CSV export.
std::vector<std::pair<std::string, std::optional<double>>> flatten(
    const MetricsReport& report);

std::vector<MetricDelta> compare(const MetricsReport& report,
                                 const MetricsReport& baseline);

std::string format_comparison(std::span<const MetricDelta> table);

// Canonical key-sorted JSON, two-space indent, trailing newline.
std::string serialize_report(const MetricsReport& report);
// Throws ParseError on bad JSON and SchemaError on a field-set mismatch.
MetricsReport parse_report(std::string_view text);
MetricsReport load_report(const std::string& path);
void save_report(const MetricsReport& report, const std::string& path);

// Header row is csv_header(); one data row follows. Empty cells are nulls.
std::string_view csv_header();
std::string report_to_csv(const MetricsReport& report);

std::string serialize_plan(const PartitionPlan& plan, const std::string& model,
                           Cost total_cost);

}  // namespace edgepart

#endif  // EDGEPART_METRICS_HPP_
