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

// Slow, obviously-correct reference implementations used by the unit and
// acceptance tests.

#ifndef EDGEPART_TESTS_ORACLES_HPP_
#define EDGEPART_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <vector>

#include "edgepart/scheduler.hpp"

namespace edgepart::oracle {

// Mean absolute deviation straight from the definition, in long double.
inline long double balance(const std::vector<std::uint64_t>& part_costs) {
  if (part_costs.empty()) return 0.0L;
  long double sum = 0.0L;
  for (auto c : part_costs) sum += static_cast<long double>(c);
  const long double avg = sum / static_cast<long double>(part_costs.size());
  long double dev = 0.0L;
  for (auto c : part_costs) dev += std::fabs(static_cast<long double>(c) - avg);
  return dev / static_cast<long double>(part_costs.size());
}

struct BestSplit {
  long double balance = 0.0L;
  std::vector<std::size_t> sizes;
};

// Every way of cutting `costs` into k non-empty contiguous runs.
inline BestSplit best_contiguous_split(const std::vector<std::uint64_t>& costs,
                                       std::size_t k) {
  BestSplit best;
  best.balance = -1.0L;
  std::vector<std::size_t> sizes;
  auto recurse = [&](auto&& self, std::size_t start, std::size_t left) -> void {
    const std::size_t n = costs.size();
    if (left == 1) {
      sizes.push_back(n - start);
      std::vector<std::uint64_t> parts;
      std::size_t at = 0;
      for (auto s : sizes) {
        std::uint64_t c = 0;
        for (std::size_t i = at; i < at + s; ++i) c += costs[i];
        parts.push_back(c);
        at += s;
      }
      const auto b = balance(parts);
      if (best.balance < 0.0L || b < best.balance) {
        best.balance = b;
        best.sizes = sizes;
      }
      sizes.pop_back();
      return;
    }
    for (std::size_t len = 1; start + len + (left - 1) <= n; ++len) {
      sizes.push_back(len);
      self(self, start + len, left - 1);
      sizes.pop_back();
    }
  };
  recurse(recurse, 0, k);
  return best;
}

// Scores written out term by term from the definitions.
inline double naive_score(const NodeState& n, const TaskRequest& t,
                          const ScoreWeights& w) {
  double rs = 0.0;
  int dims = 0;
  if (t.cpu_req > 0.0) {
    rs += n.cpu_avail / t.cpu_req;
    ++dims;
  }
  if (t.mem_req_mib > 0.0) {
    rs += n.mem_avail_mib / t.mem_req_mib;
    ++dims;
  }
  rs /= dims;
  if (rs > 1.0) rs = 1.0;
  if (rs < 0.0) rs = 0.0;

  const double ls = 1.0 - n.current_load;

  double avg = 0.0;
  if (!n.exec_history.empty()) {
    double lo = n.exec_history.front();
    double hi = n.exec_history.front();
    for (double h : n.exec_history) {
      lo = h < lo ? h : lo;
      hi = h > hi ? h : hi;
    }
    if (hi > lo) {
      double sum = 0.0;
      for (double h : n.exec_history) sum += (h - lo) / (hi - lo);
      avg = sum / static_cast<double>(n.exec_history.size());
    }
  }
  const double ps = 1.0 / (1.0 + avg);
  const double bs = 1.0 / (1.0 + 2.0 * static_cast<double>(n.task_count));
  return w.resource * rs + w.load * ls + w.performance * ps + w.balance * bs;
}

inline bool naive_eligible(const NodeState& n, const TaskRequest& t,
                           const SchedulerConfig& c) {
  return !(n.current_load > c.overload_threshold) &&
         !(n.network_latency_ms > c.latency_threshold_ms) &&
         n.cpu_avail >= t.cpu_req && n.mem_avail_mib >= t.mem_req_mib;
}

struct NaivePick {
  std::optional<std::size_t> index;
  double score = 0.0;
};

// Full scan for the maximum; the earliest index wins ties.
inline NaivePick naive_select(const TaskRequest& t,
                              const std::vector<NodeState>& nodes,
                              const SchedulerConfig& c) {
  std::vector<double> scores(nodes.size(), -1.0);
  double top = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!naive_eligible(nodes[i], t, c)) continue;
    scores[i] = naive_score(nodes[i], t, c.weights);
    top = scores[i] > top ? scores[i] : top;
  }
  NaivePick pick;
  if (top <= 0.0) return pick;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (scores[i] == top) {
      pick.index = i;
      pick.score = top;
      break;
    }
  }
  return pick;
}

// Random cluster state. Values are drawn from small grids so that exact
// ties, threshold-equal loads, and exact-fit resources all occur.
struct NodeGen {
  std::mt19937_64 rng;

  explicit NodeGen(std::uint64_t seed) : rng(seed) {}

  double pick(std::initializer_list<double> values) {
    const auto i = rng() % values.size();
    return *(values.begin() + static_cast<std::ptrdiff_t>(i));
  }

  TaskRequest task() {
    TaskRequest t;
    t.task_id = "t";
    t.cpu_req = pick({0.1, 0.25, 0.5});
    t.mem_req_mib = pick({0.0, 64.0, 128.0, 256.0});
    t.priority = static_cast<int>(rng() % 3);
    return t;
  }

  NodeState node(std::size_t i) {
    NodeState n;
    n.node_id = "n" + std::to_string(i);
    n.cpu_avail = pick({0.0, 0.1, 0.25, 0.4, 0.6, 1.0});
    n.mem_avail_mib = pick({0.0, 64.0, 128.0, 512.0, 1024.0});
    n.current_load = pick({0.0, 0.1, 0.5, 0.79, 0.8, 0.81, 0.9, 1.0});
    n.network_latency_ms = pick({1.0, 5.0, 50.0, 100.0, 100.5, 250.0});
    n.task_count = rng() % 4;
    const auto hist = rng() % 5;
    for (std::uint64_t h = 0; h < hist; ++h) {
      n.exec_history.push_back(pick({100.0, 150.0, 200.0, 300.0}));
    }
    return n;
  }

  std::vector<NodeState> cluster(std::size_t max_nodes) {
    std::vector<NodeState> nodes;
    const auto count = 1 + rng() % max_nodes;
    for (std::size_t i = 0; i < count; ++i) {
      // Occasionally clone the previous node to force an exact tie.
      if (i > 0 && rng() % 4 == 0) {
        nodes.push_back(nodes.back());
        nodes.back().node_id = "n" + std::to_string(i);
      } else {
        nodes.push_back(node(i));
      }
    }
    return nodes;
  }
};

}  // namespace edgepart::oracle

#endif  // EDGEPART_TESTS_ORACLES_HPP_
