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

#ifndef EDGEPART_MANIFEST_HPP_
#define EDGEPART_MANIFEST_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace edgepart {

enum class LayerKind { kConv2D, kLinear, kOther };

std::string_view to_string(LayerKind kind);

// One cost-bearing unit of a sequential model. Only the shape fields that
// belong to `kind` are meaningful; the rest stay zero.
struct LayerSpec {
  std::size_t index = 0;
  LayerKind kind = LayerKind::kOther;
  std::uint64_t kernel_h = 0;
  std::uint64_t kernel_w = 0;
  std::uint64_t c_in = 0;
  std::uint64_t c_out = 0;
  std::uint64_t n_in = 0;
  std::uint64_t n_out = 0;
  std::uint64_t param_count = 0;

  static LayerSpec conv2d(std::size_t index, std::uint64_t kernel_h,
                          std::uint64_t kernel_w, std::uint64_t c_in,
                          std::uint64_t c_out, std::uint64_t param_count);
  static LayerSpec linear(std::size_t index, std::uint64_t n_in,
                          std::uint64_t n_out, std::uint64_t param_count);
  static LayerSpec other(std::size_t index, std::uint64_t param_count);

  bool operator==(const LayerSpec&) const = default;
};

// Inclusive interval of layer indices.
struct LayerRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  bool operator==(const LayerRange&) const = default;
};

// Immutable once constructed through parse_manifest or make_manifest.
struct ModelManifest {
  std::string name;
  std::vector<LayerSpec> layers;

  std::size_t size() const { return layers.size(); }
  bool operator==(const ModelManifest&) const = default;
};

// Throws ValidationError if any invariant is broken (kind/field mismatch,
// non-contiguous indices, empty layer list).
void validate(const ModelManifest& manifest);

// Builds and validates a manifest in one step.
ModelManifest make_manifest(std::string name, std::vector<LayerSpec> layers);

// Parses the line-oriented manifest format: an optional leading `# name`
// line, further `#` comment lines, then one JSON object per layer.
// Throws ParseError for malformed lines and ValidationError for invariant
// violations.
ModelManifest parse_manifest(std::string_view text);

ModelManifest load_manifest(const std::string& path);

// Canonical form: `# name` followed by one key-sorted JSON object per layer.
std::string serialize_manifest(const ModelManifest& manifest);

void save_manifest(const ModelManifest& manifest, const std::string& path);

// Layers in `range`, re-indexed from 0. The name gets a `[first-last]`
// suffix. Throws DomainError when the range is empty or out of bounds.
ModelManifest sub_manifest(const ModelManifest& manifest, LayerRange range);

}  // namespace edgepart

#endif  // EDGEPART_MANIFEST_HPP_
