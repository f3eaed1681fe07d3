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

#ifndef EDGEPART_PARTITIONER_HPP_
#define EDGEPART_PARTITIONER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgepart/cost.hpp"
#include "edgepart/manifest.hpp"

namespace edgepart {

struct NodeCapability {
  std::string node_id;
  double cpu = 0.0;        // fraction of a core
  double memory_mib = 0.0;
};

struct CapabilityWeights {
  double cpu = 0.5;
  double memory = 0.5;

  // Throws DomainError unless both lie in [0,1] and sum to 1.
  void validate() const;
};

// Cluster-wide maxima used to bring cpu and memory onto a common [0,1] scale.
struct CapabilityNorm {
  double max_cpu = 0.0;
  double max_memory_mib = 0.0;
};

CapabilityNorm capability_norm(std::span<const NodeCapability> nodes);

// w_cpu * cpu / max_cpu + w_mem * memory / max_mem. Throws DomainError if
// either maximum is not positive.
double capability_score(const NodeCapability& node,
                        const CapabilityWeights& weights,
                        const CapabilityNorm& norm);

// score_i / sum(scores). Throws DomainError when no score is positive.
std::vector<double> allocation_ratios(std::span<const double> scores);

struct PartitionPlan {
  std::vector<LayerRange> ranges;
  std::vector<Cost> costs;
  std::vector<std::optional<std::string>> assigned_node;
  double balance = 0.0;

  std::size_t size() const { return ranges.size(); }
  std::vector<std::size_t> sizes() const;
};

// Mean absolute deviation of the partition costs from their mean.
double balance_metric(std::span<const Cost> partition_costs);
double balance_metric(const PartitionPlan& plan);

// Walks layers in order and closes the open partition once its cost meets or
// exceeds total / k. A partition is also closed when the layers left equal
// the partitions still to open, and never closed when fewer would remain, so
// exactly k non-empty partitions result. Leftover layers join the last one.
// Throws DomainError for k == 0 or k > layer count.
PartitionPlan greedy_partition(const CostProfile& profile,
                               std::size_t num_partitions);

struct NodeShare {
  std::string node_id;
  double ratio = 0.0;
};

// Per-node cost targets ratio_i * total, filled greedily in layer order with
// the same closing rule as greedy_partition. Nodes are served in descending
// ratio order (stable), so partition 0 goes to the strongest node.
PartitionPlan capability_partition(const CostProfile& profile,
                                   std::span<const NodeShare> shares);

// Convenience: scores, ratios, and capability_partition in one call.
PartitionPlan capability_partition(const CostProfile& profile,
                                   std::span<const NodeCapability> nodes,
                                   const CapabilityWeights& weights);

// Boundary-shift local search on the balance metric. Each iteration tries
// moving every internal boundary one layer left or right and applies the
// single move with the largest strict reduction (ties: leftmost boundary,
// then leftward shift). Stops at a local minimum or after max_iters.
PartitionPlan rebalance(const PartitionPlan& plan, const CostProfile& profile,
                        std::size_t max_iters);

// greedy_partition followed by rebalance.
PartitionPlan partition_model(const CostProfile& profile,
                              std::size_t num_partitions,
                              std::size_t max_rebalance_iters = 1000);

}  // namespace edgepart

#endif  // EDGEPART_PARTITIONER_HPP_
