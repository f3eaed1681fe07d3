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

#include <string>

#include "edgepart/errors.hpp"

namespace edgepart {

namespace {

Cost checked_mul(Cost a, Cost b, std::size_t index) {
  Cost out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw DomainError("cost of layer " + std::to_string(index) +
                      " overflows 64 bits");
  }
  return out;
}

}  // namespace

Cost layer_cost(const LayerSpec& layer) {
  switch (layer.kind) {
    case LayerKind::kConv2D:
      return checked_mul(
          checked_mul(checked_mul(layer.kernel_h, layer.kernel_w, layer.index),
                      layer.c_in, layer.index),
          layer.c_out, layer.index);
    case LayerKind::kLinear:
      return checked_mul(layer.n_in, layer.n_out, layer.index);
    case LayerKind::kOther:
      break;
  }
  return layer.param_count;
}

CostProfile::CostProfile(std::vector<Cost> per_layer)
    : per_layer_(std::move(per_layer)) {
  cumulative_.reserve(per_layer_.size());
  Cost running = 0;
  for (std::size_t i = 0; i < per_layer_.size(); ++i) {
    if (__builtin_add_overflow(running, per_layer_[i], &running)) {
      throw DomainError("cumulative cost overflows 64 bits at layer " +
                        std::to_string(i));
    }
    cumulative_.push_back(running);
  }
}

Cost CostProfile::range_cost(LayerRange range) const {
  if (range.first > range.last || range.last >= per_layer_.size()) {
    throw DomainError("cost range out of bounds");
  }
  const Cost before = range.first == 0 ? 0 : cumulative_[range.first - 1];
  return cumulative_[range.last] - before;
}

double CostProfile::relative(std::size_t i) const {
  if (i >= per_layer_.size()) throw DomainError("layer index out of bounds");
  if (total() == 0) return 1.0 / static_cast<double>(per_layer_.size());
  return static_cast<double>(per_layer_[i]) / static_cast<double>(total());
}

std::vector<double> CostProfile::relative_contributions() const {
  std::vector<double> out;
  out.reserve(per_layer_.size());
  for (std::size_t i = 0; i < per_layer_.size(); ++i) out.push_back(relative(i));
  return out;
}

CostProfile cost_profile(const ModelManifest& manifest) {
  std::vector<Cost> costs;
  costs.reserve(manifest.layers.size());
  for (const auto& layer : manifest.layers) costs.push_back(layer_cost(layer));
  return CostProfile(std::move(costs));
}

double target_cost(const CostProfile& profile, std::size_t num_partitions) {
  if (num_partitions == 0) {
    throw DomainError("number of partitions must be at least 1");
  }
  return static_cast<double>(profile.total()) /
         static_cast<double>(num_partitions);
}

}  // namespace edgepart
