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

#include "edgepart/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgepart/errors.hpp"

namespace edgepart {

namespace {

__extension__ typedef __int128 Wide;

// Relative slack when comparing a running cost to a fractional target, so
// that ratios like 1/3 that are not exact in binary still close on the same
// layer as the exact integer rule in greedy_partition.
constexpr long double kTargetSlack = 1e-12L;

void check_partition_count(const CostProfile& profile, std::size_t k) {
  if (k == 0) throw DomainError("number of partitions must be at least 1");
  if (k > profile.size()) {
    throw DomainError("cannot split " + std::to_string(profile.size()) +
                      " layers into " + std::to_string(k) + " partitions");
  }
}

// n^2 * L, exact in integers: sum_i |n * L_i - total|.
Wide scaled_imbalance(std::span<const Cost> costs) {
  const Wide n = static_cast<Wide>(costs.size());
  Wide total = 0;
  for (Cost c : costs) total += c;
  Wide acc = 0;
  for (Cost c : costs) {
    const Wide d = n * static_cast<Wide>(c) - total;
    acc += d < 0 ? -d : d;
  }
  return acc;
}

// Shared walk for greedy and capability splits. `closes(part, running)`
// reports whether partition `part` has met its target.
template <typename MeetsTarget>
std::vector<LayerRange> walk(const CostProfile& profile, std::size_t k,
                             MeetsTarget meets) {
  const auto& costs = profile.per_layer();
  const std::size_t n = costs.size();
  std::vector<LayerRange> ranges;
  ranges.reserve(k);
  std::size_t first = 0;
  Cost running = 0;
  for (std::size_t i = 0; i < n; ++i) {
    running += costs[i];
    const std::size_t still_to_open = k - 1 - ranges.size();
    const std::size_t remaining = n - 1 - i;
    if (still_to_open == 0 || remaining < still_to_open) continue;
    if (remaining == still_to_open || meets(ranges.size(), running)) {
      ranges.push_back({first, i});
      first = i + 1;
      running = 0;
    }
  }
  ranges.push_back({first, n - 1});
  return ranges;
}

PartitionPlan finish(const CostProfile& profile,
                     std::vector<LayerRange> ranges) {
  PartitionPlan plan;
  plan.ranges = std::move(ranges);
  plan.costs.reserve(plan.ranges.size());
  for (const auto& r : plan.ranges) plan.costs.push_back(profile.range_cost(r));
  plan.assigned_node.assign(plan.ranges.size(), std::nullopt);
  plan.balance = balance_metric(plan.costs);
  return plan;
}

void check_covers(const PartitionPlan& plan, const CostProfile& profile) {
  if (plan.ranges.empty()) throw DomainError("plan has no partitions");
  std::size_t next = 0;
  for (const auto& r : plan.ranges) {
    if (r.first != next || r.last < r.first) {
      throw DomainError("plan ranges are not contiguous");
    }
    next = r.last + 1;
  }
  if (next != profile.size()) {
    throw DomainError("plan does not cover every layer of the profile");
  }
}

}  // namespace

void CapabilityWeights::validate() const {
  if (cpu < 0.0 || cpu > 1.0 || memory < 0.0 || memory > 1.0 ||
      std::abs(cpu + memory - 1.0) > 1e-9) {
    throw DomainError("capability weights must lie in [0,1] and sum to 1");
  }
}

CapabilityNorm capability_norm(std::span<const NodeCapability> nodes) {
  CapabilityNorm norm;
  for (const auto& n : nodes) {
    norm.max_cpu = std::max(norm.max_cpu, n.cpu);
    norm.max_memory_mib = std::max(norm.max_memory_mib, n.memory_mib);
  }
  return norm;
}

double capability_score(const NodeCapability& node,
                        const CapabilityWeights& weights,
                        const CapabilityNorm& norm) {
  weights.validate();
  if (!(norm.max_cpu > 0.0) || !(norm.max_memory_mib > 0.0)) {
    throw DomainError("capability normalization needs positive maxima");
  }
  if (node.cpu < 0.0 || node.memory_mib < 0.0) {
    throw DomainError("node '" + node.node_id + "' has negative capacity");
  }
  const double score = weights.cpu * (node.cpu / norm.max_cpu) +
                       weights.memory * (node.memory_mib / norm.max_memory_mib);
  return std::clamp(score, 0.0, 1.0);
}

std::vector<double> allocation_ratios(std::span<const double> scores) {
  double sum = 0.0;
  for (double s : scores) {
    if (s < 0.0) throw DomainError("capability scores must be non-negative");
    sum += s;
  }
  if (!(sum > 0.0)) throw DomainError("all capability scores are zero");
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s / sum);
  return out;
}

std::vector<std::size_t> PartitionPlan::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(ranges.size());
  for (const auto& r : ranges) out.push_back(r.size());
  return out;
}

double balance_metric(std::span<const Cost> partition_costs) {
  if (partition_costs.empty()) return 0.0;
  const auto n = static_cast<long double>(partition_costs.size());
  return static_cast<double>(
      static_cast<long double>(scaled_imbalance(partition_costs)) / (n * n));
}

double balance_metric(const PartitionPlan& plan) {
  return balance_metric(plan.costs);
}

PartitionPlan greedy_partition(const CostProfile& profile,
                               std::size_t num_partitions) {
  check_partition_count(profile, num_partitions);
  const Wide total = profile.total();
  const Wide k = static_cast<Wide>(num_partitions);
  // running >= total / k, kept exact as running * k >= total.
  return finish(profile, walk(profile, num_partitions,
                              [&](std::size_t, Cost running) {
                                return static_cast<Wide>(running) * k >= total;
                              }));
}

PartitionPlan capability_partition(const CostProfile& profile,
                                   std::span<const NodeShare> shares) {
  if (shares.empty()) throw DomainError("no nodes to partition across");
  check_partition_count(profile, shares.size());
  double sum = 0.0;
  for (const auto& s : shares) {
    if (!(s.ratio >= 0.0)) throw DomainError("negative allocation ratio");
    sum += s.ratio;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DomainError("allocation ratios must sum to 1");
  }

  std::vector<NodeShare> ordered(shares.begin(), shares.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const NodeShare& a, const NodeShare& b) {
                     return a.ratio > b.ratio;
                   });
  const auto total = static_cast<long double>(profile.total());
  std::vector<long double> targets;
  targets.reserve(ordered.size());
  for (const auto& s : ordered) {
    const long double t = static_cast<long double>(s.ratio) * total;
    targets.push_back(t - t * kTargetSlack);
  }

  auto plan = finish(profile, walk(profile, ordered.size(),
                                   [&](std::size_t part, Cost running) {
                                     return static_cast<long double>(running) >=
                                            targets[part];
                                   }));
  for (std::size_t i = 0; i < plan.size(); ++i) {
    plan.assigned_node[i] = ordered[i].node_id;
  }
  return plan;
}

PartitionPlan capability_partition(const CostProfile& profile,
                                   std::span<const NodeCapability> nodes,
                                   const CapabilityWeights& weights) {
  const auto norm = capability_norm(nodes);
  std::vector<double> scores;
  scores.reserve(nodes.size());
  for (const auto& n : nodes) {
    scores.push_back(capability_score(n, weights, norm));
  }
  const auto ratios = allocation_ratios(scores);
  std::vector<NodeShare> shares;
  shares.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    shares.push_back({nodes[i].node_id, ratios[i]});
  }
  return capability_partition(profile, shares);
}

PartitionPlan rebalance(const PartitionPlan& plan, const CostProfile& profile,
                        std::size_t max_iters) {
  check_covers(plan, profile);
  const std::size_t k = plan.size();
  // last index of each partition except the final one
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i + 1 < k; ++i) cuts.push_back(plan.ranges[i].last);

  auto costs_for = [&](const std::vector<std::size_t>& c) {
    std::vector<Cost> out;
    out.reserve(k);
    std::size_t first = 0;
    for (std::size_t b : c) {
      out.push_back(profile.range_cost({first, b}));
      first = b + 1;
    }
    out.push_back(profile.range_cost({first, profile.size() - 1}));
    return out;
  };

  Wide best = scaled_imbalance(costs_for(cuts));
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::optional<std::vector<std::size_t>> best_move;
    Wide best_move_value = best;
    for (std::size_t b = 0; b < cuts.size(); ++b) {
      const std::size_t lo = b == 0 ? 0 : cuts[b - 1] + 1;
      const std::size_t hi =
          b + 1 < cuts.size() ? cuts[b + 1] - 1 : profile.size() - 2;
      for (int dir : {-1, +1}) {
        if (dir < 0 && cuts[b] == lo) continue;
        if (dir > 0 && cuts[b] >= hi) continue;
        auto candidate = cuts;
        candidate[b] = dir < 0 ? cuts[b] - 1 : cuts[b] + 1;
        const Wide value = scaled_imbalance(costs_for(candidate));
        if (value < best_move_value) {
          best_move_value = value;
          best_move = std::move(candidate);
        }
      }
    }
    if (!best_move) break;
    cuts = std::move(*best_move);
    best = best_move_value;
  }

  std::vector<LayerRange> ranges;
  std::size_t first = 0;
  for (std::size_t b : cuts) {
    ranges.push_back({first, b});
    first = b + 1;
  }
  ranges.push_back({first, profile.size() - 1});
  auto out = finish(profile, std::move(ranges));
  out.assigned_node = plan.assigned_node;
  return out;
}

PartitionPlan partition_model(const CostProfile& profile,
                              std::size_t num_partitions,
                              std::size_t max_rebalance_iters) {
  return rebalance(greedy_partition(profile, num_partitions), profile,
                   max_rebalance_iters);
}

}  // namespace edgepart
