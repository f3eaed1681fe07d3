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

#include "edgepart/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "edgepart/errors.hpp"
#include "json.hpp"

namespace edgepart {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Reader {
 public:
  Reader(const json& obj, std::string where,
         std::initializer_list<const char*> known)
      : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ValidationError(where_ + " must be an object");
    for (const auto& item : obj_.items()) {
      if (std::none_of(known.begin(), known.end(),
                       [&](const char* k) { return item.key() == k; })) {
        throw ValidationError("unknown key '" + item.key() + "' in " + where_);
      }
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& at(const char* key) const { return obj_.at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    if (!obj_.at(key).is_number()) fail(key, "a number");
    return obj_.at(key).get<double>();
  }

  std::uint64_t count(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    if (!obj_.at(key).is_number_unsigned()) fail(key, "a non-negative integer");
    return obj_.at(key).get<std::uint64_t>();
  }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    if (!obj_.at(key).is_number_integer()) fail(key, "an integer");
    return obj_.at(key).get<int>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!obj_.at(key).is_boolean()) fail(key, "a boolean");
    return obj_.at(key).get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!obj_.at(key).is_string()) fail(key, "a string");
    return obj_.at(key).get<std::string>();
  }

  std::string required_string(const char* key) const {
    if (!has(key)) throw ValidationError(where_ + " is missing '" + key + "'");
    return string(key, "");
  }

 private:
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ValidationError(where_ + "." + key + " must be " + what);
  }

  const json& obj_;
  std::string where_;
};

std::string resolve(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

NodeSpec parse_node(const json& obj, const std::string& where) {
  Reader r(obj, where,
           {"id", "profile", "cpu", "memory_mib", "latency_ms",
            "latency_jitter_ms"});
  NodeSpec node;
  node.id = r.required_string("id");
  if (r.has("profile")) {
    node.profile = NodeProfile::named(r.string("profile", ""));
    if (r.has("cpu") || r.has("memory_mib")) node.profile.name = "custom";
  } else {
    if (!r.has("cpu") || !r.has("memory_mib")) {
      throw ValidationError(where + " needs a profile or both cpu and memory_mib");
    }
    node.profile.name = "custom";
  }
  node.profile.cpu = r.number("cpu", node.profile.cpu);
  node.profile.memory_mib = r.number("memory_mib", node.profile.memory_mib);
  node.latency_ms = r.number("latency_ms", node.latency_ms);
  node.latency_jitter_ms = r.number("latency_jitter_ms", node.latency_jitter_ms);
  return node;
}

}  // namespace

NodeProfile NodeProfile::named(std::string_view name) {
  if (name == "high") return high();
  if (name == "medium") return medium();
  if (name == "low") return low();
  throw ValidationError("unknown node profile '" + std::string(name) + "'");
}

void ExecModel::validate() const {
  if (!(base_ms_per_cost_unit > 0.0)) {
    throw ValidationError("exec_model.base_ms_per_cost_unit must be positive");
  }
  if (!(memory_pressure_factor >= 1.0)) {
    throw ValidationError("exec_model.memory_pressure_factor must be >= 1");
  }
  if (!(jitter_pct >= 0.0 && jitter_pct <= 50.0)) {
    throw ValidationError("exec_model.jitter_pct must lie in [0, 50]");
  }
  if (!(bytes_per_param >= 0.0)) {
    throw ValidationError("exec_model.bytes_per_param must be non-negative");
  }
}

void Scenario::validate() const {
  edgepart::validate(model);
  exec.validate();
  try {
    scheduler.validate();
    capability_weights.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (!(warmup_ms >= 0.0)) throw ValidationError("warmup_ms must be >= 0");
  if (!(measurement_ms > 0.0)) throw ValidationError("measurement_ms must be > 0");
  if (mode == ExecutionMode::kPartitioned &&
      strategy == PartitionStrategy::kGreedy &&
      (partitions < 1 || partitions > model.size())) {
    throw ValidationError("partitions must lie in [1, layer count]");
  }
  std::set<std::string> ids;
  auto check_node = [&](const NodeSpec& n) {
    if (n.id.empty()) throw ValidationError("node id must not be empty");
    if (!(n.profile.cpu > 0.0)) {
      throw ValidationError("node '" + n.id + "' needs positive cpu");
    }
    if (!(n.profile.memory_mib >= 0.0)) {
      throw ValidationError("node '" + n.id + "' has negative memory");
    }
    if (!(n.latency_ms >= 0.0) || !(n.latency_jitter_ms >= 0.0)) {
      throw ValidationError("node '" + n.id + "' has negative latency");
    }
  };
  for (const auto& n : nodes) {
    check_node(n);
    if (!ids.insert(n.id).second) {
      throw ValidationError("duplicate node id '" + n.id + "'");
    }
  }
  for (const auto& m : membership) {
    if (!(m.time_ms >= 0.0)) throw ValidationError("membership time must be >= 0");
    if (m.action == MembershipEvent::Action::kJoin) check_node(m.node);
  }
  const auto& w = workload;
  if (w.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (w.process == ArrivalProcess::kFixedRate && !(w.rate_rps > 0.0)) {
    throw ValidationError("rate_rps must be positive");
  }
  if (w.process == ArrivalProcess::kClosedLoop && w.concurrency < 1) {
    throw ValidationError("concurrency must be >= 1");
  }
  if (!(w.cpu_req >= 0.0) || !(w.mem_req_mib >= 0.0) ||
      !(w.cpu_req > 0.0 || w.mem_req_mib > 0.0)) {
    throw ValidationError("a task must require cpu or memory");
  }
  if (!(w.think_ms >= 0.0)) throw ValidationError("think_ms must be >= 0");
  if (!(bandwidth_mbps > 0.0)) throw ValidationError("bandwidth_mbps must be > 0");
  if (!(queue_timeout_ms > 0.0)) throw ValidationError("queue_timeout_ms must be > 0");
  if (!(dispatch_retry_ms > 0.0)) throw ValidationError("dispatch_retry_ms must be > 0");
  if (!(monitor_interval_ms > 0.0) || !(monitor_window_ms > 0.0) ||
      !(load_window_ms > 0.0)) {
    throw ValidationError("monitor and load windows must be positive");
  }
}

Scenario parse_scenario(std::string_view text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what(), 1);
  }
  Reader r(doc, "scenario",
           {"name", "seed", "manifest", "mode", "partitions",
            "partition_strategy", "capability_weights", "nodes", "workload",
            "membership", "durations", "exec_model", "network", "scheduler",
            "scheduler_config", "queue_timeout_ms", "dispatch_retry_ms",
            "monitor", "drain", "measure_wall_time"});
  Scenario s;
  s.name = r.string("name", s.name);
  s.seed = r.count("seed", s.seed);
  s.model = load_manifest(resolve(base_dir, r.required_string("manifest")));

  const auto mode = r.string("mode", "monolithic");
  if (mode == "monolithic") {
    s.mode = ExecutionMode::kMonolithic;
  } else if (mode == "partitioned") {
    s.mode = ExecutionMode::kPartitioned;
  } else {
    throw ValidationError("unknown mode '" + mode + "'");
  }
  s.partitions = r.count("partitions", s.partitions);
  const auto strategy = r.string("partition_strategy", "greedy");
  if (strategy == "greedy") {
    s.strategy = PartitionStrategy::kGreedy;
  } else if (strategy == "capability") {
    s.strategy = PartitionStrategy::kCapability;
  } else {
    throw ValidationError("unknown partition_strategy '" + strategy + "'");
  }
  if (r.has("capability_weights")) {
    Reader w(r.at("capability_weights"), "capability_weights", {"cpu", "memory"});
    s.capability_weights.cpu = w.number("cpu", s.capability_weights.cpu);
    s.capability_weights.memory = w.number("memory", s.capability_weights.memory);
  }

  if (!r.has("nodes") || !r.at("nodes").is_array()) {
    throw ValidationError("scenario needs a 'nodes' array");
  }
  for (std::size_t i = 0; i < r.at("nodes").size(); ++i) {
    s.nodes.push_back(
        parse_node(r.at("nodes")[i], "nodes[" + std::to_string(i) + "]"));
  }

  if (r.has("workload")) {
    Reader w(r.at("workload"), "workload",
             {"requests", "batch_size", "arrival", "cpu_req", "mem_req_mib",
              "priority", "input_bytes", "activation_bytes"});
    auto& wl = s.workload;
    wl.requests = w.count("requests", wl.requests);
    wl.batch_size = static_cast<std::uint32_t>(w.count("batch_size", wl.batch_size));
    wl.cpu_req = w.number("cpu_req", wl.cpu_req);
    wl.mem_req_mib = w.number("mem_req_mib", wl.mem_req_mib);
    wl.priority = w.integer("priority", wl.priority);
    wl.input_bytes = w.count("input_bytes", wl.input_bytes);
    wl.activation_bytes = w.count("activation_bytes", wl.activation_bytes);
    if (w.has("arrival")) {
      Reader a(w.at("arrival"), "workload.arrival",
               {"process", "rate_rps", "concurrency", "think_ms"});
      const auto process = a.required_string("process");
      if (process == "fixed_rate") {
        wl.process = ArrivalProcess::kFixedRate;
      } else if (process == "closed_loop") {
        wl.process = ArrivalProcess::kClosedLoop;
      } else {
        throw ValidationError("unknown arrival process '" + process + "'");
      }
      wl.rate_rps = a.number("rate_rps", wl.rate_rps);
      wl.concurrency =
          static_cast<std::uint32_t>(a.count("concurrency", wl.concurrency));
      wl.think_ms = a.number("think_ms", wl.think_ms);
    }
  }

  if (r.has("membership")) {
    if (!r.at("membership").is_array()) {
      throw ValidationError("membership must be an array");
    }
    for (std::size_t i = 0; i < r.at("membership").size(); ++i) {
      const std::string where = "membership[" + std::to_string(i) + "]";
      Reader m(r.at("membership")[i], where, {"time_ms", "action", "node", "id"});
      MembershipEvent ev;
      if (!m.has("time_ms")) throw ValidationError(where + " is missing 'time_ms'");
      ev.time_ms = m.number("time_ms", 0.0);
      const auto action = m.required_string("action");
      if (action == "join") {
        ev.action = MembershipEvent::Action::kJoin;
        if (!m.has("node")) throw ValidationError(where + " join needs 'node'");
        ev.node = parse_node(m.at("node"), where + ".node");
      } else if (action == "leave") {
        ev.action = MembershipEvent::Action::kLeave;
        ev.node.id = m.required_string("id");
      } else {
        throw ValidationError(where + " has unknown action '" + action + "'");
      }
      s.membership.push_back(std::move(ev));
    }
  }

  if (r.has("durations")) {
    Reader d(r.at("durations"), "durations", {"warmup_ms", "measurement_ms"});
    s.warmup_ms = d.number("warmup_ms", s.warmup_ms);
    s.measurement_ms = d.number("measurement_ms", s.measurement_ms);
  }
  if (r.has("exec_model")) {
    Reader e(r.at("exec_model"), "exec_model",
             {"base_ms_per_cost_unit", "memory_pressure_factor", "jitter_pct",
              "bytes_per_param"});
    s.exec.base_ms_per_cost_unit =
        e.number("base_ms_per_cost_unit", s.exec.base_ms_per_cost_unit);
    s.exec.memory_pressure_factor =
        e.number("memory_pressure_factor", s.exec.memory_pressure_factor);
    s.exec.jitter_pct = e.number("jitter_pct", s.exec.jitter_pct);
    s.exec.bytes_per_param = e.number("bytes_per_param", s.exec.bytes_per_param);
  }
  if (r.has("network")) {
    Reader n(r.at("network"), "network", {"bandwidth_mbps"});
    s.bandwidth_mbps = n.number("bandwidth_mbps", s.bandwidth_mbps);
  }
  if (r.has("monitor")) {
    Reader m(r.at("monitor"), "monitor",
             {"interval_ms", "window_ms", "load_window_ms"});
    s.monitor_interval_ms = m.number("interval_ms", s.monitor_interval_ms);
    s.monitor_window_ms = m.number("window_ms", s.monitor_window_ms);
    s.load_window_ms = m.number("load_window_ms", s.load_window_ms);
  }
  if (r.has("scheduler") && r.has("scheduler_config")) {
    throw ValidationError("give either 'scheduler' or 'scheduler_config', not both");
  }
  if (r.has("scheduler")) {
    s.scheduler = parse_scheduler_config(r.at("scheduler").dump());
  } else if (r.has("scheduler_config")) {
    s.scheduler = load_scheduler_config(
        resolve(base_dir, r.string("scheduler_config", "")));
  }
  s.queue_timeout_ms = r.number("queue_timeout_ms", s.queue_timeout_ms);
  s.dispatch_retry_ms = r.number("dispatch_retry_ms", s.dispatch_retry_ms);
  s.drain = r.boolean("drain", s.drain);
  s.measure_wall_time = r.boolean("measure_wall_time", s.measure_wall_time);
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), fs::path(path).parent_path().string());
}

}  // namespace edgepart
