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

#ifndef XSEPCONV_SERIALIZATION_HPP_
#define XSEPCONV_SERIALIZATION_HPP_

// nlohmann::json adapters for the on-disk formats:
//   tensor    {"dims": [n,c,h,w], "data": [...]}
//   weights   {"kh", "kw", "c", "values": [...]}
//   schedule  {"n": N, "layers": ["RB","LT","LB","RT","GROUPED", ...]}
//   block     {"variant", "k", "c", "stride": [h,w], "activation", "pad"}
// Malformed input raises std::invalid_argument.

#include <json.hpp>

#include "xsepconv/blocks.hpp"
#include "xsepconv/dwconv.hpp"
#include "xsepconv/padding.hpp"
#include "xsepconv/tensor.hpp"
#include "xsepconv/verification.hpp"

namespace xsepconv {

void to_json(nlohmann::json& j, const Tensor4& t);
void from_json(const nlohmann::json& j, Tensor4& t);

void to_json(nlohmann::json& j, const DepthwiseWeights& w);
void from_json(const nlohmann::json& j, DepthwiseWeights& w);

void to_json(nlohmann::json& j, const PaddingSchedule& s);
void from_json(const nlohmann::json& j, PaddingSchedule& s);

void to_json(nlohmann::json& j, const BlockSpec& s);
void from_json(const nlohmann::json& j, BlockSpec& s);

void to_json(nlohmann::json& j, const BatchNormParams& bn);
void from_json(const nlohmann::json& j, BatchNormParams& bn);

void to_json(nlohmann::json& j, const BlockState& s);
void from_json(const nlohmann::json& j, BlockState& s);

void to_json(nlohmann::json& j, const GradCheckReport& r);
void to_json(nlohmann::json& j, const ShiftTraceReport& r);

}  // namespace xsepconv

#endif  // XSEPCONV_SERIALIZATION_HPP_
