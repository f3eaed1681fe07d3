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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "edgepart/cost.hpp"
#include "edgepart/manifest.hpp"
#include "edgepart/metrics.hpp"
#include "edgepart/partitioner.hpp"
#include "edgepart/scenario.hpp"
#include "edgepart/scheduler.hpp"
#include "edgepart/sim.hpp"

namespace edgepart {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string scenario_file(const std::string& name) {
  return std::string(EDGEPART_SCENARIO_DIR) + "/" + name;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

bool boundaries_within(const std::vector<std::size_t>& got,
                       const std::vector<std::size_t>& want, std::size_t tol) {
  if (got.size() != want.size()) return false;
  std::size_t a = 0;
  std::size_t b = 0;
  for (std::size_t i = 0; i + 1 < got.size(); ++i) {
    a += got[i];
    b += want[i];
    if ((a > b ? a - b : b - a) > tol) return false;
  }
  return true;
}

Outcome partition_reproduction() {
  const auto start = Clock::now();
  const auto manifest = load_manifest(std::string(EDGEPART_DATA_DIR) + "/mobilenet_v2.jsonl");
  const auto profile = cost_profile(manifest);
  const auto two = partition_model(profile, 2).sizes();
  const auto three = partition_model(profile, 3).sizes();
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = manifest.layers.size() == 141 &&
           boundaries_within(two, {116, 25}, 3) &&
           boundaries_within(three, {108, 16, 17}, 3) && elapsed < 1.0;
  o.detail = fmt("k=2 %s, k=3 %s, %.3f s", join(two).c_str(), join(three).c_str(), elapsed);
  return o;
}

// True when no single one-layer boundary shift strictly lowers L.
bool is_local_minimum(const std::vector<Cost>& costs, std::vector<std::size_t> sizes) {
  auto balance_of = [&](const std::vector<std::size_t>& s) {
    std::vector<Cost> parts;
    std::size_t at = 0;
    for (auto n : s) {
      Cost c = 0;
      for (std::size_t i = 0; i < n; ++i) c += costs[at + i];
      parts.push_back(c);
      at += n;
    }
    return oracle::balance(parts);
  };
  const long double here = balance_of(sizes);
  for (std::size_t b = 0; b + 1 < sizes.size(); ++b) {
    for (int dir : {-1, 1}) {
      auto moved = sizes;
      if (dir < 0 && moved[b] > 1) {
        --moved[b];
        ++moved[b + 1];
      } else if (dir > 0 && moved[b + 1] > 1) {
        ++moved[b];
        --moved[b + 1];
      } else {
        continue;
      }
      if (balance_of(moved) < here - 1e-9L) return false;
    }
  }
  return true;
}

Outcome partitioner_oracle() {
  std::mt19937_64 gen(20260416);
  std::size_t within = 0;
  std::size_t worsened = 0;
  std::size_t stuck = 0;  // misses that are single-shift local minima
  double worst_ratio = 1.0;
  constexpr int kCases = 200;
  for (int c = 0; c < kCases; ++c) {
    std::vector<Cost> costs(1 + gen() % 12);
    for (auto& x : costs) x = 1 + gen() % 1000;
    const CostProfile profile(costs);
    const std::size_t k = 1 + gen() % std::min<std::size_t>(3, costs.size());
    const auto greedy = greedy_partition(profile, k);
    const auto tuned = rebalance(greedy, profile, 1000);
    const long double got = oracle::balance(tuned.costs);
    const long double best = oracle::best_contiguous_split(costs, k).balance;
    if (got > oracle::balance(greedy.costs) + 1e-9L) ++worsened;
    if (got <= best * 1.1L + 1e-9L) {
      ++within;
    } else {
      if (is_local_minimum(costs, tuned.sizes())) ++stuck;
      if (best > 0) worst_ratio = std::max(worst_ratio, static_cast<double>(got / best));
    }
  }
  Outcome o;
  o.pass = within == kCases && worsened == 0;
  o.detail = fmt("%zu/%d within 10%% of optimal, %zu worsened by rebalance", within,
                 kCases, worsened);
  if (within != kCases) {
    o.detail += fmt(", worst L/L* %.3f, %zu of %zu misses are one-shift local minima",
                    worst_ratio, stuck, kCases - within);
  }
  return o;
}

Outcome scheduler_properties() {
  oracle::NodeGen gen(77);
  constexpr int kCases = 12000;
  int mismatches = 0;
  int bad_pick = 0;
  for (int c = 0; c < kCases; ++c) {
    SchedulerConfig config;
    const auto task = gen.task();
    const auto nodes = gen.cluster(8);
    const auto got = select_node(task, nodes, config);
    const auto want = oracle::naive_select(task, nodes, config);
    if (got.index != want.index) ++mismatches;
    if (got.index) {
      const auto& n = nodes[*got.index];
      if (n.current_load > 0.8 || n.network_latency_ms > 100.0 ||
          n.cpu_avail < task.cpu_req || n.mem_avail_mib < task.mem_req_mib) {
        ++bad_pick;
      }
    }
  }
  Outcome o;
  o.pass = mismatches == 0 && bad_pick == 0;
  o.detail = fmt("%d cases, %d oracle mismatches, %d ineligible picks", kCases,
                 mismatches, bad_pick);
  return o;
}

Outcome score_unit_vectors() {
  NodeState fresh;
  fresh.node_id = "fresh";
  fresh.cpu_avail = 0.1;
  fresh.mem_avail_mib = 64.0;
  fresh.network_latency_ms = 5.0;
  const TaskRequest task{"t", 0.1, 64.0, 0};
  const ScoreWeights weights;
  const double identity = total_score(fresh, task, weights);

  NodeState worked = fresh;
  worked.cpu_avail = 1.0;
  worked.mem_avail_mib = 1024.0;
  worked.current_load = 0.5;
  worked.task_count = 1;
  const double example = total_score(worked, task, weights);
  const double expected = 0.2 + 0.1 + 0.1 + 0.5 / 3.0;

  Outcome o;
  o.pass = identity == 1.0 && std::fabs(example - expected) <= 1e-9;
  o.detail = fmt("identity %.17g, worked example %.10f", identity, example);
  return o;
}

Outcome complexity_envelope(double suite_seconds) {
  constexpr std::size_t kNodes = 5;
  constexpr std::size_t kTasks = 1000;
  SchedulerConfig config;
  config.cache.enabled = false;
  Scheduler scheduler(config);
  for (std::size_t i = 0; i < kNodes; ++i) {
    NodeState n;
    n.node_id = "n" + std::to_string(i);
    n.cpu_avail = 1.0;
    n.mem_avail_mib = 1024.0;
    n.current_load = 0.1 * static_cast<double>(i);
    n.network_latency_ms = 5.0;
    scheduler.add_node(n);
  }
  std::size_t chosen = 0;
  const auto start = Clock::now();
  for (std::size_t t = 0; t < kTasks; ++t) {
    const TaskRequest task{"t" + std::to_string(t), 0.1, 64.0, 0};
    if (scheduler.select(task)) ++chosen;
  }
  const double mean_ms = seconds_since(start) * 1000.0 / kTasks;
  const auto counters = scheduler.counters();
  Outcome o;
  o.pass = chosen == kTasks && counters.score_evaluations == kTasks * kNodes &&
           mean_ms < 10.0 && suite_seconds < 10.0;
  o.detail = fmt("%llu evaluations for m*n=%zu, mean select %.4f ms, suite %.2f s",
                 static_cast<unsigned long long>(counters.score_evaluations),
                 kTasks * kNodes, mean_ms, suite_seconds);
  return o;
}

Outcome scaling() {
  const auto one = run_scenario(load_scenario(scenario_file("scale_1node.json")));
  const auto three = run_scenario(load_scenario(scenario_file("scale_3node.json")));
  const double ratio = one.throughput_rps > 0 ? three.throughput_rps / one.throughput_rps : 0.0;
  Outcome o;
  o.pass = ratio >= 2.5;
  o.detail = fmt("throughput %.3f vs %.3f req/s, ratio %.3f", three.throughput_rps,
                 one.throughput_rps, ratio);
  return o;
}

Outcome profile_ordering() {
  std::vector<double> means;
  for (const char* name : {"profile_high.json", "profile_medium.json", "profile_low.json"}) {
    const auto r = run_scenario(load_scenario(scenario_file(name)));
    means.push_back(r.inference_latency_ms ? r.inference_latency_ms->mean : NAN);
  }
  Outcome o;
  o.pass = means[0] < means[1] && means[1] < means[2] && means[0] >= 200.0 &&
           means[0] <= 280.0;
  o.detail = fmt("high %.2f < medium %.2f < low %.2f ms", means[0], means[1], means[2]);
  return o;
}

Outcome adaptability() {
  Simulator leave(load_scenario(scenario_file("node_leave.json")));
  leave.run();
  const auto counts = leave.counts();
  const auto report = leave.report();
  const bool conserved = counts.submitted == counts.completed && counts.queued == 0 &&
                         counts.in_flight == 0 && counts.submitted > 0;
  const double stability = report.stability_score.value_or(NAN);

  const auto base = run_scenario(load_scenario(scenario_file("join_baseline.json")));
  const auto joined = run_scenario(load_scenario(scenario_file("join_dominant.json")));
  const double base_mean = base.inference_latency_ms ? base.inference_latency_ms->mean : NAN;
  const double join_mean = joined.inference_latency_ms ? joined.inference_latency_ms->mean : NAN;

  Outcome o;
  o.pass = conserved && report.tasks.rescheduled > 0 && stability < 1.0 &&
           join_mean < base_mean;
  o.detail = fmt("leave: %llu/%llu completed, rescheduled %llu, stability %.4f; "
                 "join: mean %.1f vs %.1f ms",
                 static_cast<unsigned long long>(counts.completed),
                 static_cast<unsigned long long>(counts.submitted),
                 static_cast<unsigned long long>(report.tasks.rescheduled), stability,
                 join_mean, base_mean);
  return o;
}

Outcome determinism() {
  std::size_t identical = 0;
  const std::vector<std::string> names = {
      "profile_high.json", "scale_3node.json", "node_leave.json",
      "join_dominant.json", "distributed.json", "monolithic.json"};
  for (const auto& name : names) {
    const auto scenario = load_scenario(scenario_file(name));
    if (serialize_report(run_scenario(scenario)) == serialize_report(run_scenario(scenario))) {
      ++identical;
    }
  }
  Outcome o;
  o.pass = identical == names.size();
  o.detail = fmt("%zu/%zu scenarios byte-identical across two runs", identical, names.size());
  return o;
}

MetricsReport table_row(double latency_ms, double throughput_rps) {
  MetricsReport r;
  r.empty = false;
  r.measurement_ms = 300000.0;
  r.inference_latency_ms = LatencyStats{latency_ms, latency_ms, latency_ms};
  r.throughput_rps = throughput_rps;
  return r;
}

Outcome compare_table() {
  // Round-trip through the report format so the whole compare path is used.
  const auto distributed = parse_report(serialize_report(table_row(234.56, 5.07)));
  const auto monolithic = parse_report(serialize_report(table_row(1082.53, 0.96)));
  std::optional<double> latency;
  std::optional<double> throughput;
  for (const auto& row : compare(distributed, monolithic)) {
    if (row.metric == "latency_mean_ms") latency = row.delta_pct;
    if (row.metric == "throughput_rps") throughput = row.delta_pct;
  }
  const bool lat_ok = latency && std::fabs(*latency - (-78.3)) <= 0.1;
  const bool thr_ok = throughput && (std::fabs(*throughput - 428.1) <= 0.1 ||
                                     std::fabs(*throughput - 414.73) <= 0.01);
  Outcome o;
  o.pass = lat_ok && thr_ok;
  o.detail = fmt("latency %.2f%%, throughput %+.2f%%", latency.value_or(NAN),
                 throughput.value_or(NAN));
  return o;
}

}  // namespace
}  // namespace edgepart

// With no arguments every criterion runs; `acceptance N` runs only N.
int main(int argc, char** argv) {
  using namespace edgepart;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"fixture partition sizes", partition_reproduction},
      {"partitioner oracle equivalence", partitioner_oracle},
      {"scheduler property suite", scheduler_properties},
      {"score unit vectors", score_unit_vectors},
      {"complexity envelope",
       [] {
         // Times the whole scheduler suite, this check included.
         const auto start = Clock::now();
         scheduler_properties();
         score_unit_vectors();
         return complexity_envelope(seconds_since(start));
       }},
      {"scaling", scaling},
      {"resource-profile ordering", profile_ordering},
      {"adaptability", adaptability},
      {"determinism", determinism},
      {"compare deltas", compare_table},
  };

  std::size_t only = 0;
  if (argc > 1) {
    only = std::strtoul(argv[1], nullptr, 10);
    if (only < 1 || only > criteria.size()) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
      return 2;
    }
  }

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != i + 1) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
