/* Copyright 2026 The XSepConv Authors. All Rights Reserved.

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

#include "xsepconv/serialization.hpp"

#include <stdexcept>
#include <string>

namespace xsepconv {

using nlohmann::json;

namespace {

// Wraps nlohmann type errors so callers see one exception type.
template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

void to_json(json& j, const Tensor4& t) {
  const Dims& d = t.dims();
  j = json{{"dims", {d.n, d.c, d.h, d.w}}, {"data", t.values()}};
}

void from_json(const json& j, Tensor4& t) {
  const auto dims = field<std::vector<int>>(j, "dims");
  if (dims.size() != 4) throw std::invalid_argument("tensor dims must have 4 entries");
  t = Tensor4(Dims{dims[0], dims[1], dims[2], dims[3]},
              field<std::vector<double>>(j, "data"));
}

void to_json(json& j, const DepthwiseWeights& w) {
  j = json{{"kh", w.kh()}, {"kw", w.kw()}, {"c", w.c()}, {"values", w.values()}};
}

void from_json(const json& j, DepthwiseWeights& w) {
  w = DepthwiseWeights(field<int>(j, "kh"), field<int>(j, "kw"),
                       field<int>(j, "c"), field<std::vector<double>>(j, "values"));
}

void to_json(json& j, const PaddingSchedule& s) {
  json layers = json::array();
  for (const auto& a : s.layers) layers.push_back(to_code(a));
  j = json{{"n", s.n_even_layers()}, {"layers", layers}};
}

void from_json(const json& j, PaddingSchedule& s) {
  const auto codes = field<std::vector<std::string>>(j, "layers");
  const int n = field<int>(j, "n");
  if (n != static_cast<int>(codes.size())) {
    throw std::invalid_argument("schedule: n=" + std::to_string(n) +
                                " but " + std::to_string(codes.size()) +
                                " layers listed");
  }
  s.layers.clear();
  for (const auto& c : codes) s.layers.push_back(assignment_from_code(c));
}

void to_json(json& j, const BlockSpec& s) {
  j = json{{"variant", to_string(s.variant)},
           {"k", s.k},
           {"c", s.c},
           {"stride", {s.stride.h, s.stride.w}},
           {"activation", to_string(s.activation)},
           {"pad", to_code(s.pad)}};
}

void from_json(const json& j, BlockSpec& s) {
  s.variant = variant_from_string(field<std::string>(j, "variant"));
  s.k = field<int>(j, "k");
  s.c = field<int>(j, "c");
  const auto stride = field<std::vector<int>>(j, "stride");
  if (stride.size() != 2) throw std::invalid_argument("stride must be [h, w]");
  s.stride = {stride[0], stride[1]};
  s.activation = activation_from_string(field<std::string>(j, "activation"));
  s.pad = assignment_from_code(field<std::string>(j, "pad"));
  validate(s);
}

void to_json(json& j, const BatchNormParams& bn) {
  j = json{{"gamma", bn.gamma},
           {"beta", bn.beta},
           {"running_mean", bn.running_mean},
           {"running_var", bn.running_var},
           {"epsilon", bn.epsilon},
           {"momentum", bn.momentum},
           {"mode", bn.mode == BnMode::Train ? "train" : "inference"}};
}

void from_json(const json& j, BatchNormParams& bn) {
  bn.gamma = field<std::vector<double>>(j, "gamma");
  bn.beta = field<std::vector<double>>(j, "beta");
  bn.running_mean = field<std::vector<double>>(j, "running_mean");
  bn.running_var = field<std::vector<double>>(j, "running_var");
  bn.epsilon = field<double>(j, "epsilon");
  bn.momentum = field<double>(j, "momentum");
  const auto mode = field<std::string>(j, "mode");
  if (mode != "train" && mode != "inference") {
    throw std::invalid_argument("bn mode must be 'train' or 'inference'");
  }
  bn.mode = mode == "train" ? BnMode::Train : BnMode::Inference;
  validate(bn);
}

void to_json(json& j, const BlockState& s) {
  j = json{{"weights", s.weights}, {"bn", s.bn}};
}

void from_json(const json& j, BlockState& s) {
  s.weights = field<std::vector<DepthwiseWeights>>(j, "weights");
  s.bn = field<std::vector<BatchNormParams>>(j, "bn");
}

void to_json(json& j, const GradCheckReport& r) {
  json groups = json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"name", g.name},
                      {"max_rel_error", g.max_rel_error},
                      {"max_abs_error", g.max_abs_error},
                      {"checked", g.checked}});
  }
  j = json{{"groups", groups},
           {"epsilon", r.epsilon},
           {"tolerance", r.tolerance},
           {"max_rel_error", r.max_rel_error()},
           {"passed", r.passed()}};
}

void to_json(json& j, const ShiftTraceReport& r) {
  json layers = json::array();
  for (const auto& c : r.per_layer) layers.push_back({c.cy, c.cx});
  j = json{{"per_layer_centroid", layers},
           {"impulse", {r.impulse_y, r.impulse_x}},
           {"offset", {r.offset_y, r.offset_x}},
           {"predicted", {r.predicted_y, r.predicted_x}}};
}

}  // namespace xsepconv
