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

#include "edgepart/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edgepart/errors.hpp"
#include "json.hpp"

namespace edgepart {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) {
      return item.key() == k;
    });
    if (!ok) {
      throw ValidationError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

double number_at(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw ValidationError(where + "." + key + " must be a number");
  }
  return v.get<double>();
}

}  // namespace

void ScoreWeights::validate() const {
  for (double w : {resource, load, performance, balance}) {
    if (!(w >= 0.0)) throw DomainError("score weights must be non-negative");
  }
  if (std::abs(resource + load + performance + balance - 1.0) > 1e-9) {
    throw DomainError("score weights must sum to 1");
  }
}

void SchedulerConfig::validate() const {
  if (!(overload_threshold > 0.0)) {
    throw DomainError("overload_threshold must be positive");
  }
  if (!(latency_threshold_ms > 0.0)) {
    throw DomainError("latency_threshold_ms must be positive");
  }
  if (history_capacity < 1) throw DomainError("history_capacity must be >= 1");
  if (!(cache.cpu_granularity > 0.0) || !(cache.mem_granularity_mib > 0.0)) {
    throw DomainError("cache granularity must be positive");
  }
  weights.validate();
}

SchedulerConfig parse_scheduler_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scheduler config: ") + e.what(), 1);
  }
  if (!doc.is_object()) {
    throw ValidationError("scheduler config must be a JSON object");
  }
  reject_unknown(doc,
                 {"weights", "overload_threshold", "latency_threshold_ms",
                  "history_capacity", "cache"},
                 "scheduler config");
  SchedulerConfig cfg;
  if (doc.contains("overload_threshold")) {
    cfg.overload_threshold = number_at(doc, "overload_threshold", "config");
  }
  if (doc.contains("latency_threshold_ms")) {
    cfg.latency_threshold_ms = number_at(doc, "latency_threshold_ms", "config");
  }
  if (doc.contains("history_capacity")) {
    const auto& v = doc.at("history_capacity");
    if (!v.is_number_unsigned()) {
      throw ValidationError("history_capacity must be a positive integer");
    }
    cfg.history_capacity = v.get<std::size_t>();
  }
  if (doc.contains("weights")) {
    const auto& w = doc.at("weights");
    if (!w.is_object()) throw ValidationError("weights must be an object");
    reject_unknown(w, {"resource", "load", "performance", "balance"},
                   "weights");
    if (w.contains("resource")) cfg.weights.resource = number_at(w, "resource", "weights");
    if (w.contains("load")) cfg.weights.load = number_at(w, "load", "weights");
    if (w.contains("performance")) {
      cfg.weights.performance = number_at(w, "performance", "weights");
    }
    if (w.contains("balance")) cfg.weights.balance = number_at(w, "balance", "weights");
  }
  if (doc.contains("cache")) {
    const auto& c = doc.at("cache");
    if (!c.is_object()) throw ValidationError("cache must be an object");
    reject_unknown(c, {"enabled", "cpu_granularity", "mem_granularity_mib"},
                   "cache");
    if (c.contains("enabled")) {
      if (!c.at("enabled").is_boolean()) {
        throw ValidationError("cache.enabled must be a boolean");
      }
      cfg.cache.enabled = c.at("enabled").get<bool>();
    }
    if (c.contains("cpu_granularity")) {
      cfg.cache.cpu_granularity = number_at(c, "cpu_granularity", "cache");
    }
    if (c.contains("mem_granularity_mib")) {
      cfg.cache.mem_granularity_mib = number_at(c, "mem_granularity_mib", "cache");
    }
  }
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  return cfg;
}

SchedulerConfig load_scheduler_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scheduler config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scheduler_config(buf.str());
}

std::string serialize_task_record(const TaskRecord& record) {
  nlohmann::json j;
  j["task_id"] = record.task_id;
  j["node_id"] = record.node_id;
  j["submit_ms"] = record.submit_ms;
  j["start_ms"] = record.start_ms;
  j["end_ms"] = record.end_ms;
  j["exec_ms"] = record.exec_ms;
  j["normalized_perf"] = record.normalized_perf;
  return j.dump();
}

std::string serialize_scheduler_config(const SchedulerConfig& config) {
  json doc = {
      {"overload_threshold", config.overload_threshold},
      {"latency_threshold_ms", config.latency_threshold_ms},
      {"history_capacity", config.history_capacity},
      {"weights",
       {{"resource", config.weights.resource},
        {"load", config.weights.load},
        {"performance", config.weights.performance},
        {"balance", config.weights.balance}}},
      {"cache",
       {{"enabled", config.cache.enabled},
        {"cpu_granularity", config.cache.cpu_granularity},
        {"mem_granularity_mib", config.cache.mem_granularity_mib}}}};
  return doc.dump(2) + "\n";
}

double resource_score_raw(const NodeState& node, const TaskRequest& task) {
  if (task.cpu_req < 0.0 || task.mem_req_mib < 0.0) {
    throw DomainError("task '" + task.task_id + "' has a negative requirement");
  }
  double sum = 0.0;
  int used = 0;
  if (task.cpu_req > 0.0) {
    sum += node.cpu_avail / task.cpu_req;
    ++used;
  }
  if (task.mem_req_mib > 0.0) {
    sum += node.mem_avail_mib / task.mem_req_mib;
    ++used;
  }
  if (used == 0) {
    throw DomainError("task '" + task.task_id + "' requires no resources");
  }
  return sum / used;
}

double resource_score(const NodeState& node, const TaskRequest& task) {
  return std::clamp(resource_score_raw(node, task), 0.0, 1.0);
}

double load_score(const NodeState& node) {
  return 1.0 - std::clamp(node.current_load, 0.0, 1.0);
}

double avg_normalized_exec_time(const NodeState& node) {
  const auto& h = node.exec_history;
  if (h.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return 0.0;
  double sum = 0.0;
  for (double x : h) sum += (x - *lo) / span;
  return sum / static_cast<double>(h.size());
}

double performance_score(const NodeState& node) {
  return 1.0 / (1.0 + avg_normalized_exec_time(node));
}

double balance_score(const NodeState& node) {
  return 1.0 / (1.0 + 2.0 * static_cast<double>(node.task_count));
}

double total_score(const NodeState& node, const TaskRequest& task,
                   const ScoreWeights& weights) {
  return weights.resource * resource_score(node, task) +
         weights.load * load_score(node) +
         weights.performance * performance_score(node) +
         weights.balance * balance_score(node);
}

bool has_sufficient_resources(const NodeState& node, const TaskRequest& task) {
  return node.cpu_avail >= task.cpu_req && node.mem_avail_mib >= task.mem_req_mib;
}

bool is_eligible(const NodeState& node, const TaskRequest& task,
                 const SchedulerConfig& config) {
  if (node.current_load > config.overload_threshold) return false;
  if (node.network_latency_ms > config.latency_threshold_ms) return false;
  return has_sufficient_resources(node, task);
}

Selection select_node(const TaskRequest& task, std::span<const NodeState> nodes,
                      const SchedulerConfig& config) {
  Selection out;
  double best = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!is_eligible(nodes[i], task, config)) continue;
    const double score = total_score(nodes[i], task, config.weights);
    ++out.evaluations;
    if (score > best) {
      best = score;
      out.index = i;
    }
  }
  out.score = best;
  return out;
}

TaskRecord complete_task(TaskRecord record, std::vector<NodeState>& nodes,
                         std::size_t history_capacity,
                         std::optional<double> recalibrated_load) {
  if (history_capacity < 1) throw DomainError("history_capacity must be >= 1");
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeState& n) {
    return n.node_id == record.node_id;
  });
  if (it == nodes.end()) {
    throw NotFoundError("unknown node '" + record.node_id + "'");
  }
  if (it->task_count == 0) {
    throw DomainError("node '" + record.node_id + "' has no task in flight");
  }
  if (!(record.end_ms >= record.start_ms && record.start_ms >= record.submit_ms)) {
    throw DomainError("task '" + record.task_id + "' has inconsistent times");
  }
  record.exec_ms = record.end_ms - record.start_ms;

  --it->task_count;
  it->exec_history.push_back(record.exec_ms);
  while (it->exec_history.size() > history_capacity) {
    it->exec_history.pop_front();
  }
  const auto [lo, hi] =
      std::minmax_element(it->exec_history.begin(), it->exec_history.end());
  const double span = *hi - *lo;
  record.normalized_perf = span > 0.0 ? (record.exec_ms - *lo) / span : 0.0;
  if (recalibrated_load) {
    it->current_load = std::clamp(*recalibrated_load, 0.0, 1.0);
  }
  return record;
}

PerformanceCache::PerformanceCache(CacheConfig config, std::size_t window)
    : config_(config), window_(std::max<std::size_t>(window, 1)) {}

PerformanceCache::Key PerformanceCache::key_for(const TaskRequest& task) const {
  return {std::llround(task.cpu_req / config_.cpu_granularity),
          std::llround(task.mem_req_mib / config_.mem_granularity_mib),
          task.priority};
}

std::optional<std::string> PerformanceCache::lookup(
    const TaskRequest& task) const {
  auto it = entries_.find(key_for(task));
  if (it == entries_.end()) return std::nullopt;
  return it->second.node_id;
}

void PerformanceCache::record(const TaskRequest& task,
                              const std::string& node_id, double exec_ms) {
  auto& entry = entries_[key_for(task)];
  bool fast = entry.exec_ms.empty();
  if (!fast) {
    std::vector<double> sorted(entry.exec_ms.begin(), entry.exec_ms.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    fast = exec_ms < median;
  }
  if (fast) entry.node_id = node_id;
  entry.exec_ms.push_back(exec_ms);
  while (entry.exec_ms.size() > window_) entry.exec_ms.pop_front();
}

void PerformanceCache::forget_node(const std::string& node_id) {
  for (auto& [key, entry] : entries_) {
    if (entry.node_id == node_id) entry.node_id.reset();
  }
}

SchedulerSummary scheduler_metrics(std::span<const NodeState> nodes,
                                   std::span<const TaskRecord> records,
                                   const SchedulerCounters& counters) {
  SchedulerSummary out;
  out.score_evaluations = counters.score_evaluations;
  out.decisions = counters.decisions;
  if (counters.decisions > 0) {
    out.mean_select_wall_ms = static_cast<double>(counters.select_wall_ns) /
                              1e6 / static_cast<double>(counters.decisions);
  }
  for (const auto& n : nodes) {
    NodeSummary s;
    s.node_id = n.node_id;
    s.in_flight = n.task_count;
    s.current_load = n.current_load;
    double sum = 0.0;
    for (const auto& r : records) {
      if (r.node_id != n.node_id) continue;
      ++s.completed;
      sum += r.exec_ms;
    }
    if (s.completed > 0) {
      s.mean_exec_ms = sum / static_cast<double>(s.completed);
    }
    out.nodes.push_back(std::move(s));
  }
  return out;
}

Scheduler::Scheduler(SchedulerConfig config)
    : config_(config), cache_(config.cache, config.history_capacity) {
  config_.validate();
}

std::vector<NodeState>::iterator Scheduler::find(const std::string& node_id) {
  return std::find_if(nodes_.begin(), nodes_.end(),
                      [&](const NodeState& n) { return n.node_id == node_id; });
}

std::vector<NodeState>::const_iterator Scheduler::find(
    const std::string& node_id) const {
  return std::find_if(nodes_.begin(), nodes_.end(),
                      [&](const NodeState& n) { return n.node_id == node_id; });
}

void Scheduler::add_node(NodeState node) {
  std::lock_guard lock(mutex_);
  if (find(node.node_id) != nodes_.end()) {
    throw DomainError("duplicate node id '" + node.node_id + "'");
  }
  if (node.current_load < 0.0 || node.current_load > 1.0) {
    throw DomainError("node load must lie in [0,1]");
  }
  nodes_.push_back(std::move(node));
}

void Scheduler::remove_node(const std::string& node_id) {
  std::lock_guard lock(mutex_);
  auto it = find(node_id);
  if (it == nodes_.end()) throw NotFoundError("unknown node '" + node_id + "'");
  nodes_.erase(it);
  cache_.forget_node(node_id);
}

bool Scheduler::has_node(const std::string& node_id) const {
  std::lock_guard lock(mutex_);
  return find(node_id) != nodes_.end();
}

void Scheduler::update_node(const std::string& node_id, double cpu_avail,
                            double mem_avail_mib, double current_load,
                            double network_latency_ms) {
  std::lock_guard lock(mutex_);
  auto it = find(node_id);
  if (it == nodes_.end()) throw NotFoundError("unknown node '" + node_id + "'");
  it->cpu_avail = cpu_avail;
  it->mem_avail_mib = mem_avail_mib;
  it->current_load = std::clamp(current_load, 0.0, 1.0);
  it->network_latency_ms = network_latency_ms;
}

std::optional<std::string> Scheduler::select(const TaskRequest& task) {
  std::lock_guard lock(mutex_);
  const auto started = std::chrono::steady_clock::now();
  std::optional<std::string> chosen;
  bool from_cache = false;
  if (config_.cache.enabled) {
    if (auto hint = cache_.lookup(task)) {
      auto it = find(*hint);
      if (it != nodes_.end() && is_eligible(*it, task, config_)) {
        chosen = *hint;
        from_cache = true;
        ++counters_.cache_hits;
      } else {
        ++counters_.cache_rejections;
      }
    }
  }
  if (!from_cache) {
    const auto sel = select_node(task, nodes_, config_);
    counters_.score_evaluations += sel.evaluations;
    if (sel.index) chosen = nodes_[*sel.index].node_id;
  }
  ++counters_.decisions;
  counters_.select_wall_ns += static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - started)
          .count());
  return chosen;
}

void Scheduler::assign(const std::string& node_id) {
  std::lock_guard lock(mutex_);
  auto it = find(node_id);
  if (it == nodes_.end()) throw NotFoundError("unknown node '" + node_id + "'");
  ++it->task_count;
}

TaskRecord Scheduler::complete(TaskRecord record, const TaskRequest& task,
                               std::optional<double> recalibrated_load) {
  std::lock_guard lock(mutex_);
  auto done = complete_task(std::move(record), nodes_, config_.history_capacity,
                            recalibrated_load);
  if (config_.cache.enabled) cache_.record(task, done.node_id, done.exec_ms);
  return done;
}

std::optional<std::string> Scheduler::cache_lookup(
    const TaskRequest& task) const {
  std::lock_guard lock(mutex_);
  return cache_.lookup(task);
}

std::vector<NodeState> Scheduler::snapshot() const {
  std::lock_guard lock(mutex_);
  return nodes_;
}

std::optional<NodeState> Scheduler::node(const std::string& node_id) const {
  std::lock_guard lock(mutex_);
  auto it = find(node_id);
  if (it == nodes_.end()) return std::nullopt;
  return *it;
}

SchedulerCounters Scheduler::counters() const {
  std::lock_guard lock(mutex_);
  return counters_;
}

}  // namespace edgepart
