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

#include "edgepart/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "edgepart/errors.hpp"
#include "json.hpp"

namespace edgepart {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

LayerKind kind_from_string(const std::string& s, std::size_t index) {
  if (s == "conv2d") return LayerKind::kConv2D;
  if (s == "linear") return LayerKind::kLinear;
  if (s == "other") return LayerKind::kOther;
  throw ValidationError("unknown layer kind '" + s + "'", index);
}

std::uint64_t read_count(const json& obj, const char* key, std::size_t index) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ValidationError(std::string("field '") + key + "' must be an integer",
                          index);
  }
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto signed_value = v.get<std::int64_t>();
  if (signed_value < 0) {
    throw ValidationError(std::string("field '") + key + "' is negative", index);
  }
  return static_cast<std::uint64_t>(signed_value);
}

// Fields each kind requires besides index/kind/param_count.
const std::vector<const char*>& shape_fields(LayerKind kind) {
  static const std::vector<const char*> conv = {"kernel_h", "kernel_w", "c_in",
                                                "c_out"};
  static const std::vector<const char*> linear = {"n_in", "n_out"};
  static const std::vector<const char*> none;
  switch (kind) {
    case LayerKind::kConv2D:
      return conv;
    case LayerKind::kLinear:
      return linear;
    case LayerKind::kOther:
      break;
  }
  return none;
}

LayerSpec layer_from_json(const json& obj, std::size_t expected_index) {
  static const std::set<std::string> known = {
      "index", "kind",  "kernel_h", "kernel_w",   "c_in",
      "c_out", "n_in", "n_out",    "param_count"};
  if (!obj.is_object()) {
    throw ValidationError("layer line is not a JSON object", expected_index);
  }
  if (!obj.contains("index")) {
    throw ValidationError("missing field 'index'", expected_index);
  }
  LayerSpec layer;
  layer.index = read_count(obj, "index", expected_index);
  const std::size_t at = layer.index;
  for (const auto& item : obj.items()) {
    if (known.count(item.key()) == 0) {
      throw ValidationError("unknown field '" + item.key() + "'", at);
    }
  }
  if (!obj.contains("kind") || !obj.at("kind").is_string()) {
    throw ValidationError("missing field 'kind'", at);
  }
  layer.kind = kind_from_string(obj.at("kind").get<std::string>(), at);
  if (!obj.contains("param_count")) {
    throw ValidationError("missing field 'param_count'", at);
  }
  layer.param_count = read_count(obj, "param_count", at);

  const auto& required = shape_fields(layer.kind);
  for (const char* key : {"kernel_h", "kernel_w", "c_in", "c_out", "n_in",
                          "n_out"}) {
    const bool wanted = std::find_if(required.begin(), required.end(),
                                     [&](const char* r) {
                                       return std::string_view(r) == key;
                                     }) != required.end();
    const bool present = obj.contains(key);
    if (wanted && !present) {
      throw ValidationError(std::string("missing field '") + key + "' for " +
                                std::string(to_string(layer.kind)),
                            at);
    }
    if (!wanted && present) {
      throw ValidationError(std::string("field '") + key +
                                "' not allowed for " +
                                std::string(to_string(layer.kind)),
                            at);
    }
  }
  if (layer.kind == LayerKind::kConv2D) {
    layer.kernel_h = read_count(obj, "kernel_h", at);
    layer.kernel_w = read_count(obj, "kernel_w", at);
    layer.c_in = read_count(obj, "c_in", at);
    layer.c_out = read_count(obj, "c_out", at);
  } else if (layer.kind == LayerKind::kLinear) {
    layer.n_in = read_count(obj, "n_in", at);
    layer.n_out = read_count(obj, "n_out", at);
  }
  return layer;
}

json layer_to_json(const LayerSpec& layer) {
  json obj = {{"index", layer.index},
              {"kind", std::string(to_string(layer.kind))},
              {"param_count", layer.param_count}};
  if (layer.kind == LayerKind::kConv2D) {
    obj["kernel_h"] = layer.kernel_h;
    obj["kernel_w"] = layer.kernel_w;
    obj["c_in"] = layer.c_in;
    obj["c_out"] = layer.c_out;
  } else if (layer.kind == LayerKind::kLinear) {
    obj["n_in"] = layer.n_in;
    obj["n_out"] = layer.n_out;
  }
  return obj;
}

void validate_layer(const LayerSpec& layer) {
  const auto at = layer.index;
  switch (layer.kind) {
    case LayerKind::kConv2D:
      if (layer.kernel_h == 0 || layer.kernel_w == 0 || layer.c_in == 0 ||
          layer.c_out == 0) {
        throw ValidationError("conv2d kernel and channel sizes must be >= 1",
                              at);
      }
      if (layer.n_in != 0 || layer.n_out != 0) {
        throw ValidationError("conv2d layer carries linear fields", at);
      }
      break;
    case LayerKind::kLinear:
      if (layer.n_in == 0 || layer.n_out == 0) {
        throw ValidationError("linear feature sizes must be >= 1", at);
      }
      if (layer.kernel_h != 0 || layer.kernel_w != 0 || layer.c_in != 0 ||
          layer.c_out != 0) {
        throw ValidationError("linear layer carries conv2d fields", at);
      }
      break;
    case LayerKind::kOther:
      if (layer.kernel_h != 0 || layer.kernel_w != 0 || layer.c_in != 0 ||
          layer.c_out != 0 || layer.n_in != 0 || layer.n_out != 0) {
        throw ValidationError("other layer carries shape fields", at);
      }
      break;
  }
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2D:
      return "conv2d";
    case LayerKind::kLinear:
      return "linear";
    case LayerKind::kOther:
      break;
  }
  return "other";
}

LayerSpec LayerSpec::conv2d(std::size_t index, std::uint64_t kernel_h,
                            std::uint64_t kernel_w, std::uint64_t c_in,
                            std::uint64_t c_out, std::uint64_t param_count) {
  LayerSpec l;
  l.index = index;
  l.kind = LayerKind::kConv2D;
  l.kernel_h = kernel_h;
  l.kernel_w = kernel_w;
  l.c_in = c_in;
  l.c_out = c_out;
  l.param_count = param_count;
  return l;
}

LayerSpec LayerSpec::linear(std::size_t index, std::uint64_t n_in,
                            std::uint64_t n_out, std::uint64_t param_count) {
  LayerSpec l;
  l.index = index;
  l.kind = LayerKind::kLinear;
  l.n_in = n_in;
  l.n_out = n_out;
  l.param_count = param_count;
  return l;
}

LayerSpec LayerSpec::other(std::size_t index, std::uint64_t param_count) {
  LayerSpec l;
  l.index = index;
  l.param_count = param_count;
  return l;
}

void validate(const ModelManifest& manifest) {
  if (manifest.layers.empty()) {
    throw ValidationError("manifest '" + manifest.name + "' has no layers");
  }
  for (std::size_t i = 0; i < manifest.layers.size(); ++i) {
    const auto& layer = manifest.layers[i];
    if (layer.index != i) {
      throw ValidationError(
          "index is not contiguous (expected " + std::to_string(i) + ")",
          layer.index);
    }
    validate_layer(layer);
  }
}

ModelManifest make_manifest(std::string name, std::vector<LayerSpec> layers) {
  ModelManifest m{std::move(name), std::move(layers)};
  validate(m);
  return m;
}

ModelManifest parse_manifest(std::string_view text) {
  ModelManifest manifest;
  bool name_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      // The first comment before any layer names the model.
      if (!name_seen && manifest.layers.empty()) {
        manifest.name = std::string(trim(line.substr(1)));
        name_seen = true;
      }
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    manifest.layers.push_back(layer_from_json(obj, manifest.layers.size()));
  }
  if (manifest.name.empty()) manifest.name = "model";
  validate(manifest);
  return manifest;
}

ModelManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

std::string serialize_manifest(const ModelManifest& manifest) {
  std::string out = "# " + manifest.name + "\n";
  for (const auto& layer : manifest.layers) {
    out += layer_to_json(layer).dump();
    out += '\n';
  }
  return out;
}

void save_manifest(const ModelManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path + "'");
  out << serialize_manifest(manifest);
  if (!out) throw IoError("write failed for '" + path + "'");
}

ModelManifest sub_manifest(const ModelManifest& manifest, LayerRange range) {
  if (range.first > range.last || range.last >= manifest.layers.size()) {
    throw DomainError("layer range [" + std::to_string(range.first) + ", " +
                      std::to_string(range.last) + "] outside manifest of " +
                      std::to_string(manifest.layers.size()) + " layers");
  }
  ModelManifest part;
  part.name = manifest.name + "[" + std::to_string(range.first) + "-" +
              std::to_string(range.last) + "]";
  part.layers.assign(manifest.layers.begin() + range.first,
                     manifest.layers.begin() + range.last + 1);
  for (std::size_t i = 0; i < part.layers.size(); ++i) part.layers[i].index = i;
  return part;
}

}  // namespace edgepart
