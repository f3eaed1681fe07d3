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

#include <gtest/gtest.h>

#include <random>

#include "../support/oracles.hpp"
#include "edgepart/errors.hpp"
#include "test_util.hpp"

namespace edgepart {
namespace {

using Sizes = std::vector<std::size_t>;

CostProfile fixture_profile() {
  return cost_profile(load_manifest(testing::fixture_path()));
}

TEST(Capability, ScoresForHardwareProfiles) {
  const std::vector<NodeCapability> nodes = {
      {"high", 1.0, 1024}, {"medium", 0.6, 512}, {"low", 0.4, 512}};
  const auto norm = capability_norm(nodes);
  const CapabilityWeights w;
  EXPECT_DOUBLE_EQ(capability_score(nodes[0], w, norm), 1.0);
  EXPECT_NEAR(capability_score(nodes[2], w, norm), 0.45, 1e-12);
  EXPECT_DOUBLE_EQ(capability_score(nodes[0], {0.9, 0.1}, norm), 1.0);
}

TEST(Capability, ZeroNormIsDomainError) {
  EXPECT_THROW(capability_score({"a", 1.0, 0.0}, {}, {1.0, 0.0}), DomainError);
  EXPECT_THROW(capability_score({"a", 0.0, 1.0}, {}, {0.0, 1.0}), DomainError);
}

TEST(Capability, WeightsMustSumToOne) {
  EXPECT_THROW((CapabilityWeights{0.7, 0.7}.validate()), DomainError);
  EXPECT_THROW((CapabilityWeights{-0.1, 1.1}.validate()), DomainError);
  EXPECT_NO_THROW((CapabilityWeights{1.0, 0.0}.validate()));
}

TEST(Capability, AllocationRatios) {
  const std::vector<double> equal = {1.0, 1.0};
  EXPECT_EQ(allocation_ratios(equal), (std::vector<double>{0.5, 0.5}));
  const std::vector<double> skewed = {1.0, 0.45};
  const auto r = allocation_ratios(skewed);
  EXPECT_NEAR(r[0], 0.6897, 1e-4);
  EXPECT_NEAR(r[1], 0.3103, 1e-4);
  const std::vector<double> one = {0.3};
  EXPECT_EQ(allocation_ratios(one), (std::vector<double>{1.0}));
  const std::vector<double> zeros = {0.0, 0.0};
  EXPECT_THROW(allocation_ratios(zeros), DomainError);
}

TEST(Greedy, FixtureSplits) {
  const auto p = fixture_profile();
  EXPECT_EQ(greedy_partition(p, 2).sizes(), (Sizes{116, 25}));
  EXPECT_EQ(greedy_partition(p, 3).sizes(), (Sizes{108, 16, 17}));
  EXPECT_EQ(partition_model(p, 2).sizes(), (Sizes{116, 25}));
  EXPECT_EQ(partition_model(p, 3).sizes(), (Sizes{108, 16, 17}));
}

TEST(Greedy, SmallCases) {
  EXPECT_EQ(greedy_partition(CostProfile({1, 1, 1, 1}), 2).sizes(), (Sizes{2, 2}));
  EXPECT_EQ(greedy_partition(CostProfile({10, 1, 1, 1}), 2).sizes(), (Sizes{1, 3}));
  EXPECT_EQ(greedy_partition(CostProfile({5, 5, 5}), 1).sizes(), (Sizes{3}));
}

TEST(Greedy, AlwaysYieldsExactlyKNonEmptyParts) {
  // A heavy tail would otherwise swallow every layer into one partition.
  EXPECT_EQ(greedy_partition(CostProfile({1, 1, 1, 100}), 3).sizes(),
            (Sizes{2, 1, 1}));
  EXPECT_EQ(greedy_partition(CostProfile({100, 1, 1, 1}), 4).sizes(),
            (Sizes{1, 1, 1, 1}));
  EXPECT_EQ(greedy_partition(CostProfile({0, 0, 0}), 2).sizes(), (Sizes{1, 2}));
}

TEST(Greedy, RejectsBadCounts) {
  EXPECT_THROW(greedy_partition(CostProfile({1, 2}), 0), DomainError);
  EXPECT_THROW(greedy_partition(CostProfile({1, 2}), 3), DomainError);
}

TEST(Greedy, PlanCoversLayersAndCarriesCosts) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Cost> costs(1 + gen() % 40);
    for (auto& c : costs) c = gen() % 1000;
    const CostProfile profile(costs);
    const auto k = 1 + gen() % costs.size();
    const auto plan = greedy_partition(profile, k);
    ASSERT_EQ(plan.size(), k);
    std::size_t next = 0;
    Cost sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(plan.ranges[i].first, next);
      EXPECT_GE(plan.ranges[i].last, plan.ranges[i].first);
      EXPECT_EQ(plan.costs[i], profile.range_cost(plan.ranges[i]));
      next = plan.ranges[i].last + 1;
      sum += plan.costs[i];
    }
    EXPECT_EQ(next, costs.size());
    EXPECT_EQ(sum, profile.total());
    EXPECT_NEAR(plan.balance, static_cast<double>(oracle::balance(plan.costs)),
                1e-9 * (1.0 + plan.balance));
  }
}

TEST(CapabilityPartition, EqualNodesMatchGreedy) {
  const auto p = fixture_profile();
  const std::vector<NodeShare> shares = {{"a", 0.5}, {"b", 0.5}};
  const auto plan = capability_partition(p, shares);
  EXPECT_EQ(plan.ranges, greedy_partition(p, 2).ranges);
  EXPECT_EQ(plan.assigned_node[0], "a");
  EXPECT_EQ(plan.assigned_node[1], "b");

  const std::vector<NodeShare> thirds = {{"a", 1.0 / 3}, {"b", 1.0 / 3},
                                         {"c", 1.0 / 3}};
  EXPECT_EQ(capability_partition(p, thirds).ranges, greedy_partition(p, 3).ranges);
}

TEST(CapabilityPartition, SingleNodeTakesEverything) {
  const std::vector<NodeShare> one = {{"only", 1.0}};
  const auto plan = capability_partition(CostProfile({3, 4, 5}), one);
  EXPECT_EQ(plan.sizes(), (Sizes{3}));
}

TEST(CapabilityPartition, UnequalRatios) {
  const std::vector<NodeShare> shares = {{"big", 2.0 / 3}, {"small", 1.0 / 3}};
  const auto plan = capability_partition(CostProfile(std::vector<Cost>(6, 1)), shares);
  EXPECT_EQ(plan.sizes(), (Sizes{4, 2}));
}

TEST(CapabilityPartition, StrongestNodeGetsFirstPartition) {
  const std::vector<NodeShare> shares = {{"small", 1.0 / 3}, {"big", 2.0 / 3}};
  const auto plan = capability_partition(CostProfile(std::vector<Cost>(6, 1)), shares);
  EXPECT_EQ(plan.sizes(), (Sizes{4, 2}));
  EXPECT_EQ(plan.assigned_node[0], "big");
  EXPECT_EQ(plan.assigned_node[1], "small");
}

TEST(CapabilityPartition, FromCapabilities) {
  const std::vector<NodeCapability> nodes = {{"high", 1.0, 1024}, {"low", 0.4, 512}};
  const auto plan =
      capability_partition(CostProfile(std::vector<Cost>(29, 1)), nodes, {});
  // Ratios 1/1.45 and 0.45/1.45 of 29 layers: targets 20 and 9.
  EXPECT_EQ(plan.sizes(), (Sizes{20, 9}));
}

TEST(Balance, Definition) {
  const std::vector<Cost> even = {5, 5, 5};
  const std::vector<Cost> lopsided = {10, 0};
  const std::vector<Cost> single = {42};
  EXPECT_DOUBLE_EQ(balance_metric(even), 0.0);
  EXPECT_DOUBLE_EQ(balance_metric(lopsided), 5.0);
  EXPECT_DOUBLE_EQ(balance_metric(single), 0.0);
}

TEST(Rebalance, FixedPoints) {
  const CostProfile even({1, 1, 1, 1});
  const auto plan = greedy_partition(even, 2);
  EXPECT_EQ(rebalance(plan, even, 100).ranges, plan.ranges);

  const CostProfile tail({1, 1, 1, 1, 100});
  PartitionPlan split;
  split.ranges = {{0, 3}, {4, 4}};
  split.costs = {4, 100};
  split.assigned_node = {std::nullopt, std::nullopt};
  split.balance = balance_metric(split.costs);
  EXPECT_EQ(rebalance(split, tail, 100).ranges, split.ranges);
}

TEST(Rebalance, ImprovesFixtureFourWaySplit) {
  const auto p = fixture_profile();
  const auto greedy = greedy_partition(p, 4);
  const auto tuned = rebalance(greedy, p, 1000);
  EXPECT_EQ(greedy.sizes(), (Sizes{100, 16, 16, 9}));
  EXPECT_EQ(tuned.sizes(), (Sizes{100, 16, 15, 10}));
  EXPECT_LT(tuned.balance, greedy.balance);
}

TEST(Rebalance, ZeroIterationsIsIdentity) {
  const auto p = fixture_profile();
  const auto greedy = greedy_partition(p, 4);
  EXPECT_EQ(rebalance(greedy, p, 0).ranges, greedy.ranges);
}

TEST(Rebalance, KeepsNodeAssignments) {
  const std::vector<NodeShare> shares = {{"x", 0.5}, {"y", 0.5}};
  const CostProfile p({9, 1, 1, 1, 1, 1});
  const auto plan = rebalance(capability_partition(p, shares), p, 10);
  EXPECT_EQ(plan.assigned_node[0], "x");
  EXPECT_EQ(plan.assigned_node[1], "y");
}

TEST(Rebalance, NeverWorseAndNearOptimalAgainstBruteForce) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<Cost> costs(1 + gen() % 12);
    for (auto& c : costs) c = gen() % 50;
    const CostProfile profile(costs);
    const std::size_t k = 1 + gen() % std::min<std::size_t>(3, costs.size());
    const auto greedy = greedy_partition(profile, k);
    const auto tuned = rebalance(greedy, profile, 1000);
    const auto best = oracle::best_contiguous_split(costs, k);
    const auto got = oracle::balance(tuned.costs);
    EXPECT_LE(got, oracle::balance(greedy.costs) + 1e-9L);
    EXPECT_GE(got + 1e-9L, best.balance);
    EXPECT_EQ(tuned.size(), k);
  }
}

}  // namespace
}  // namespace edgepart
