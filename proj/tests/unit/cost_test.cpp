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

#include "edgepart/cost.hpp"

#include <gtest/gtest.h>

#include <limits>

#include "edgepart/errors.hpp"
#include "test_util.hpp"

namespace edgepart {
namespace {

TEST(Cost, LayerCostByKind) {
  EXPECT_EQ(layer_cost(LayerSpec::conv2d(0, 3, 3, 3, 32, 864)), 864u);
  EXPECT_EQ(layer_cost(LayerSpec::linear(0, 1280, 1000, 1281000)), 1280000u);
  EXPECT_EQ(layer_cost(LayerSpec::other(0, 0)), 0u);
  EXPECT_EQ(layer_cost(LayerSpec::other(0, 2560)), 2560u);
}

TEST(Cost, ConvCostIgnoresParamCount) {
  EXPECT_EQ(layer_cost(LayerSpec::conv2d(0, 3, 3, 32, 32, 1)), 9u * 32 * 32);
}

TEST(Cost, OverflowIsDomainError) {
  const auto big = std::numeric_limits<std::uint64_t>::max() / 2;
  EXPECT_THROW(layer_cost(LayerSpec::linear(0, big, 3, 0)), DomainError);
  EXPECT_THROW(CostProfile({big, big, big}), DomainError);
}

TEST(Cost, ProfileTotalsAndPrefixSums) {
  const auto m = make_manifest("two", {LayerSpec::conv2d(0, 3, 3, 3, 32, 864),
                                       LayerSpec::linear(1, 1280, 1000, 0)});
  const auto p = cost_profile(m);
  EXPECT_EQ(p.total(), 1280864u);
  EXPECT_EQ(p.cumulative(), (std::vector<Cost>{864, 1280864}));
  EXPECT_EQ(p.range_cost({1, 1}), 1280000u);
  EXPECT_THROW(p.range_cost({1, 2}), DomainError);
}

TEST(Cost, ZeroTotalGivesUniformContributions) {
  const CostProfile p({0, 0, 0, 0});
  EXPECT_EQ(p.total(), 0u);
  for (double r : p.relative_contributions()) EXPECT_DOUBLE_EQ(r, 0.25);
  EXPECT_DOUBLE_EQ(target_cost(p, 3), 0.0);
}

TEST(Cost, ContributionsSumToOne) {
  const auto p = cost_profile(load_manifest(testing::fixture_path()));
  double sum = 0.0;
  for (double r : p.relative_contributions()) sum += r;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Cost, FixtureTotalMatchesNaiveSum) {
  const auto m = load_manifest(testing::fixture_path());
  // Independent pass straight from the layer fields.
  std::uint64_t naive = 0;
  for (const auto& l : m.layers) {
    if (l.kind == LayerKind::kConv2D) {
      naive += l.kernel_h * l.kernel_w * l.c_in * l.c_out;
    } else if (l.kind == LayerKind::kLinear) {
      naive += l.n_in * l.n_out;
    } else {
      naive += l.param_count;
    }
  }
  EXPECT_EQ(cost_profile(m).total(), naive);
  EXPECT_EQ(naive, 44049952u);
}

TEST(Cost, TargetCost) {
  EXPECT_DOUBLE_EQ(target_cost(CostProfile({864, 1280000}), 2), 640432.0);
  EXPECT_DOUBLE_EQ(target_cost(CostProfile(std::vector<Cost>(141, 1)), 3), 47.0);
  EXPECT_THROW(target_cost(CostProfile({1}), 0), DomainError);
}

}  // namespace
}  // namespace edgepart
