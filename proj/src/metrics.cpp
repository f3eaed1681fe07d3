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

#include "edgepart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "edgepart/errors.hpp"
#include "json.hpp"

namespace edgepart {

namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

void expect_keys(const json& obj, const std::set<std::string>& keys,
                 const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + " must be an object");
  for (const auto& k : keys) {
    if (!obj.contains(k)) throw SchemaError(where + " is missing '" + k + "'");
  }
  for (const auto& item : obj.items()) {
    if (keys.count(item.key()) == 0) {
      throw SchemaError(where + " has unexpected field '" + item.key() + "'");
    }
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw SchemaError(where + "." + key + " must be a number");
  return v.get<double>();
}

std::optional<double> get_opt_number(const json& obj, const char* key,
                                     const std::string& where) {
  const auto& v = obj.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) {
    throw SchemaError(where + "." + key + " must be a number or null");
  }
  return v.get<double>();
}

std::uint64_t get_count(const json& obj, const char* key,
                        const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) {
    throw SchemaError(where + "." + key + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw SchemaError(where + "." + key + " must be boolean");
  return v.get<bool>();
}

json report_to_json(const MetricsReport& r) {
  json per_node = json::array();
  for (const auto& n : r.per_node) {
    per_node.push_back({{"node_id", n.node_id},
                        {"online", n.online},
                        {"completed", n.completed},
                        {"mean_exec_ms", opt(n.mean_exec_ms)},
                        {"in_flight", n.in_flight},
                        {"current_load", n.current_load},
                        {"cpu_pct", opt(n.cpu_pct)}});
  }
  json latency = nullptr;
  if (r.inference_latency_ms) {
    latency = {{"mean", r.inference_latency_ms->mean},
               {"p50", r.inference_latency_ms->p50},
               {"p95", r.inference_latency_ms->p95}};
  }
  return {
      {"empty", r.empty},
      {"measurement_ms", r.measurement_ms},
      {"measured_requests", r.measured_requests},
      {"inference_latency_ms", latency},
      {"throughput_rps", r.throughput_rps},
      {"comm_overhead_ms", opt(r.comm_overhead_ms)},
      {"cpu_pct", opt(r.cpu_pct)},
      {"mem_mb", opt(r.mem_mb)},
      {"net_bandwidth_mb", r.net_bandwidth_mb},
      {"stability_score", opt(r.stability_score)},
      {"scheduling_overhead_ms", opt(r.scheduling_overhead_ms)},
      {"load_balance_L", r.load_balance_L},
      {"starvation_ms", r.starvation_ms},
      {"per_node", per_node},
      {"tasks",
       {{"submitted", r.tasks.submitted},
        {"completed", r.tasks.completed},
        {"rescheduled", r.tasks.rescheduled},
        {"queue_timeouts", r.tasks.queue_timeouts},
        {"queued_at_end", r.tasks.queued_at_end},
        {"in_flight_at_end", r.tasks.in_flight_at_end}}},
      {"scheduler",
       {{"decisions", r.scheduler.decisions},
        {"score_evaluations", r.scheduler.score_evaluations},
        {"cache_hits", r.scheduler.cache_hits}}},
  };
}

std::string format_number(const std::optional<double>& v) {
  if (!v) return "";
  return json(*v).dump();
}

}  // namespace

double percentile_nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("percentile of an empty set");
  if (!(p > 0.0) || p > 100.0) throw DomainError("percentile outside (0, 100]");
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(p / 100.0 * static_cast<double>(values.size()));
  const auto idx = static_cast<std::size_t>(std::max(rank, 1.0)) - 1;
  return values[std::min(idx, values.size() - 1)];
}

MetricsReport aggregate(std::span<const RequestRecord> records,
                        std::span<const ResourceSample> samples,
                        const MeasurementWindow& window) {
  if (!(window.end_ms > window.start_ms)) {
    throw DomainError("measurement window must have positive length");
  }
  MetricsReport report;
  report.measurement_ms = window.end_ms - window.start_ms;

  std::vector<double> latencies;
  double transfer_sum = 0.0;
  std::uint64_t bytes = 0;
  std::uint64_t stable = 0;
  for (const auto& r : records) {
    if (!window.contains(r.end_ms)) continue;
    latencies.push_back(r.end_ms - r.submit_ms);
    transfer_sum += r.transfer_ms;
    bytes += r.bytes_moved;
    if (!r.rescheduled && !r.queue_timeout) ++stable;
  }
  report.measured_requests = latencies.size();
  report.throughput_rps =
      static_cast<double>(latencies.size()) / window.seconds();
  report.net_bandwidth_mb = static_cast<double>(bytes) / (1024.0 * 1024.0);
  report.empty = latencies.empty();
  if (!latencies.empty()) {
    const double n = static_cast<double>(latencies.size());
    LatencyStats stats;
    for (double l : latencies) stats.mean += l;
    stats.mean /= n;
    stats.p50 = percentile_nearest_rank(latencies, 50.0);
    stats.p95 = percentile_nearest_rank(latencies, 95.0);
    report.inference_latency_ms = stats;
    report.comm_overhead_ms = transfer_sum / n;
    report.stability_score = static_cast<double>(stable) / n;
  }

  double cpu = 0.0;
  double mem = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    if (!window.contains(s.time_ms)) continue;
    cpu += s.cpu_pct;
    mem += s.mem_used_mib;
    ++count;
  }
  if (count > 0) {
    report.cpu_pct = cpu / static_cast<double>(count);
    report.mem_mb = mem / static_cast<double>(count);
  }
  return report;
}

bool MetricDelta::improved() const {
  if (!delta_pct) return false;
  return better == Better::kLower ? *delta_pct < 0.0 : *delta_pct > 0.0;
}

std::optional<double> percent_change(std::optional<double> value,
                                     std::optional<double> baseline) {
  if (!value || !baseline || *baseline == 0.0) return std::nullopt;
  return (*value - *baseline) / *baseline * 100.0;
}

std::vector<std::pair<std::string, std::optional<double>>> flatten(
    const MetricsReport& r) {
  const auto& lat = r.inference_latency_ms;
  return {
      {"latency_mean_ms", lat ? std::optional(lat->mean) : std::nullopt},
      {"latency_p50_ms", lat ? std::optional(lat->p50) : std::nullopt},
      {"latency_p95_ms", lat ? std::optional(lat->p95) : std::nullopt},
      {"throughput_rps", r.throughput_rps},
      {"comm_overhead_ms", r.comm_overhead_ms},
      {"cpu_pct", r.cpu_pct},
      {"mem_mb", r.mem_mb},
      {"net_bandwidth_mb", r.net_bandwidth_mb},
      {"stability_score", r.stability_score},
      {"scheduling_overhead_ms", r.scheduling_overhead_ms},
      {"load_balance_L", r.load_balance_L},
  };
}

std::vector<MetricDelta> compare(const MetricsReport& report,
                                 const MetricsReport& baseline) {
  static const std::set<std::string> higher_is_better = {"throughput_rps",
                                                         "stability_score"};
  const auto a = flatten(report);
  const auto b = flatten(baseline);
  std::vector<MetricDelta> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    MetricDelta d;
    d.metric = a[i].first;
    d.value = a[i].second;
    d.baseline = b[i].second;
    d.delta_pct = percent_change(d.value, d.baseline);
    d.better = higher_is_better.count(d.metric) ? Better::kHigher
                                                : Better::kLower;
    out.push_back(std::move(d));
  }
  return out;
}

std::string format_comparison(std::span<const MetricDelta> table) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %14s %14s %12s  %s\n", "metric",
                "value", "baseline", "delta", "better");
  out << line;
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("null");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  for (const auto& d : table) {
    std::string delta = "NA";
    if (d.delta_pct) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%+.2f%%", *d.delta_pct);
      delta = buf;
    }
    std::snprintf(line, sizeof(line), "%-24s %14s %14s %12s  %s\n",
                  d.metric.c_str(), cell(d.value).c_str(),
                  cell(d.baseline).c_str(), delta.c_str(),
                  d.better == Better::kLower ? "lower" : "higher");
    out << line;
  }
  return out.str();
}

std::string serialize_report(const MetricsReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

MetricsReport parse_report(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 1);
  }
  const std::string where = "report";
  expect_keys(doc,
              {"empty", "measurement_ms", "measured_requests",
               "inference_latency_ms", "throughput_rps", "comm_overhead_ms",
               "cpu_pct", "mem_mb", "net_bandwidth_mb", "stability_score",
               "scheduling_overhead_ms", "load_balance_L", "starvation_ms",
               "per_node", "tasks", "scheduler"},
              where);
  MetricsReport r;
  r.empty = get_bool(doc, "empty", where);
  r.measurement_ms = get_number(doc, "measurement_ms", where);
  r.measured_requests = get_count(doc, "measured_requests", where);
  const auto& lat = doc.at("inference_latency_ms");
  if (!lat.is_null()) {
    expect_keys(lat, {"mean", "p50", "p95"}, "inference_latency_ms");
    r.inference_latency_ms = LatencyStats{
        get_number(lat, "mean", "inference_latency_ms"),
        get_number(lat, "p50", "inference_latency_ms"),
        get_number(lat, "p95", "inference_latency_ms")};
  }
  r.throughput_rps = get_number(doc, "throughput_rps", where);
  r.comm_overhead_ms = get_opt_number(doc, "comm_overhead_ms", where);
  r.cpu_pct = get_opt_number(doc, "cpu_pct", where);
  r.mem_mb = get_opt_number(doc, "mem_mb", where);
  r.net_bandwidth_mb = get_number(doc, "net_bandwidth_mb", where);
  r.stability_score = get_opt_number(doc, "stability_score", where);
  r.scheduling_overhead_ms = get_opt_number(doc, "scheduling_overhead_ms", where);
  r.load_balance_L = get_number(doc, "load_balance_L", where);
  r.starvation_ms = get_number(doc, "starvation_ms", where);

  const auto& nodes = doc.at("per_node");
  if (!nodes.is_array()) throw SchemaError("per_node must be an array");
  for (const auto& n : nodes) {
    const std::string w = "per_node[]";
    expect_keys(n,
                {"node_id", "online", "completed", "mean_exec_ms", "in_flight",
                 "current_load", "cpu_pct"},
                w);
    if (!n.at("node_id").is_string()) throw SchemaError("node_id must be a string");
    NodeReport nr;
    nr.node_id = n.at("node_id").get<std::string>();
    nr.online = get_bool(n, "online", w);
    nr.completed = get_count(n, "completed", w);
    nr.mean_exec_ms = get_opt_number(n, "mean_exec_ms", w);
    nr.in_flight = get_count(n, "in_flight", w);
    nr.current_load = get_number(n, "current_load", w);
    nr.cpu_pct = get_opt_number(n, "cpu_pct", w);
    r.per_node.push_back(std::move(nr));
  }

  const auto& t = doc.at("tasks");
  expect_keys(t,
              {"submitted", "completed", "rescheduled", "queue_timeouts",
               "queued_at_end", "in_flight_at_end"},
              "tasks");
  r.tasks.submitted = get_count(t, "submitted", "tasks");
  r.tasks.completed = get_count(t, "completed", "tasks");
  r.tasks.rescheduled = get_count(t, "rescheduled", "tasks");
  r.tasks.queue_timeouts = get_count(t, "queue_timeouts", "tasks");
  r.tasks.queued_at_end = get_count(t, "queued_at_end", "tasks");
  r.tasks.in_flight_at_end = get_count(t, "in_flight_at_end", "tasks");

  const auto& s = doc.at("scheduler");
  expect_keys(s, {"decisions", "score_evaluations", "cache_hits"}, "scheduler");
  r.scheduler.decisions = get_count(s, "decisions", "scheduler");
  r.scheduler.score_evaluations = get_count(s, "score_evaluations", "scheduler");
  r.scheduler.cache_hits = get_count(s, "cache_hits", "scheduler");
  return r;
}

MetricsReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report(buf.str());
}

void save_report(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report '" + path + "'");
  out << serialize_report(report);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string_view csv_header() {
  return "latency_mean_ms,latency_p50_ms,latency_p95_ms,throughput_rps,"
         "comm_overhead_ms,cpu_pct,mem_mb,net_bandwidth_mb,stability_score,"
         "scheduling_overhead_ms,load_balance_L,measured_requests,"
         "rescheduled";
}

std::string report_to_csv(const MetricsReport& report) {
  std::string row;
  for (const auto& [name, value] : flatten(report)) {
    row += format_number(value);
    row += ',';
  }
  row += std::to_string(report.measured_requests);
  row += ',';
  row += std::to_string(report.tasks.rescheduled);
  return std::string(csv_header()) + "\n" + row + "\n";
}

std::string serialize_plan(const PartitionPlan& plan, const std::string& model,
                           Cost total_cost) {
  json parts = json::array();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    parts.push_back({{"index", i},
                     {"first", plan.ranges[i].first},
                     {"last", plan.ranges[i].last},
                     {"layers", plan.ranges[i].size()},
                     {"cost", plan.costs[i]},
                     {"node", plan.assigned_node[i]
                                  ? json(*plan.assigned_node[i])
                                  : json(nullptr)}});
  }
  json doc = {{"model", model},
              {"num_partitions", plan.size()},
              {"total_cost", total_cost},
              {"balance_L", plan.balance},
              {"partitions", parts}};
  return doc.dump(2) + "\n";
}

}  // namespace edgepart
