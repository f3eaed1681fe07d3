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

#ifndef EDGEPART_COST_HPP_
#define EDGEPART_COST_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "edgepart/manifest.hpp"

namespace edgepart {

// Dimensionless operation count.
using Cost = std::uint64_t;

// Conv2D: k_h * k_w * c_in * c_out. Linear: n_in * n_out. Other: the
// parameter count, unscaled. Spatial extent and stride are not part of the
// model, so conv cost is resolution independent. Throws DomainError on
// 64-bit overflow.
Cost layer_cost(const LayerSpec& layer);

class CostProfile {
 public:
  CostProfile() = default;
  explicit CostProfile(std::vector<Cost> per_layer);

  const std::vector<Cost>& per_layer() const { return per_layer_; }
  const std::vector<Cost>& cumulative() const { return cumulative_; }
  Cost total() const { return cumulative_.empty() ? 0 : cumulative_.back(); }
  std::size_t size() const { return per_layer_.size(); }

  // Cost of the inclusive range, from the prefix sums.
  Cost range_cost(LayerRange range) const;

  // per_layer[i] / total; uniform 1/n when the total is zero.
  double relative(std::size_t i) const;
  std::vector<double> relative_contributions() const;

 private:
  std::vector<Cost> per_layer_;
  std::vector<Cost> cumulative_;
};

CostProfile cost_profile(const ModelManifest& manifest);

// total / num_partitions. Throws DomainError when num_partitions is 0.
double target_cost(const CostProfile& profile, std::size_t num_partitions);

}  // namespace edgepart

#endif  // EDGEPART_COST_HPP_
