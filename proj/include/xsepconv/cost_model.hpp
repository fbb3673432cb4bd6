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

#ifndef XSEPCONV_COST_MODEL_HPP_
#define XSEPCONV_COST_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xsepconv/blocks.hpp"

namespace xsepconv {

// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational of(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
  bool less_than_one() const { return num < den; }
};

// (4 + 2k) / k^2
Rational ratio_basic_exact(int k);
double ratio_basic(int k);

// (16 + 3k) / k^2
Rational ratio_downsample_exact(int k);
double ratio_downsample(int k);

struct LayerConfig {
  std::string name;
  BlockVariant variant = BlockVariant::VanillaDW;
  int k = 3;
  int c = 1;
  int h = 1;
  int w = 1;
  Stride stride{};
};

struct CostReport {
  std::uint64_t macs = 0;
  std::uint64_t params = 0;
  std::optional<std::uint64_t> baseline_macs;
  std::optional<std::uint64_t> baseline_params;

  std::uint64_t flops() const { return 2 * macs; }
  std::optional<double> ratio() const;
};

// Convolution MACs and weights of one block (BN, activation, bias excluded).
// Uses exact ceil(h/stride) output sizes. Baseline fields hold the VanillaDW
// layer with the same k, stride and dims.
CostReport layer_cost(const LayerConfig& cfg);

// Input that fails schema or dim-flow checks; message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NetworkLayer {
  enum class Kind { Depthwise, Opaque };

  std::string name;
  Kind kind = Kind::Depthwise;
  BlockVariant variant = BlockVariant::VanillaDW;
  int k = 3;
  int c = 0;  // depthwise: channels; opaque: output channels (0 = unchanged)
  int stride = 1;
  std::uint64_t opaque_macs = 0;
  std::uint64_t opaque_params = 0;
  std::optional<int> h;  // depthwise: optional input-size assertion
  std::optional<int> w;
  std::optional<std::pair<int, int>> out_hw;  // opaque: explicit output size
};

// Reference totals shipped with a config, tagged with the FLOP convention
// they were published in ("macs" or "flops").
struct NetworkReference {
  std::string flops_convention = "macs";
  double baseline_flops = 0.0;
  double substituted_flops = 0.0;
  double baseline_params = 0.0;
  double substituted_params = 0.0;
};

struct NetworkConfig {
  int in_c = 1;
  int in_h = 1;
  int in_w = 1;
  std::vector<NetworkLayer> layers;
  std::optional<NetworkReference> reference;
};

NetworkConfig parse_network_config(const std::string& json_text);
NetworkConfig load_network_config(const std::string& path);

// Replacement rule: stride-1 VanillaDW with k >= 5 becomes `replacement`
// with the same k, or with `last_stage_k` once past the last downsampling
// layer; stride-2 VanillaDW becomes XSepDownsample only when k >= 7.
struct SubstitutionPolicy {
  BlockVariant replacement = BlockVariant::XSep;
  int last_stage_k = 3;
};

struct AnalysisRow {
  std::string layer;
  std::uint64_t baseline_macs = 0;
  std::uint64_t xsep_macs = 0;
  std::uint64_t baseline_params = 0;
  std::uint64_t xsep_params = 0;
  std::string substitution;  // e.g. "XSep k=5", empty when untouched

  double ratio() const;
};

struct NetworkAnalysis {
  std::vector<AnalysisRow> rows;
  std::uint64_t baseline_macs = 0;
  std::uint64_t xsep_macs = 0;
  std::uint64_t baseline_params = 0;
  std::uint64_t xsep_params = 0;
};

NetworkAnalysis analyze_network(const NetworkConfig& config,
                                const SubstitutionPolicy& policy = {});

// layer,baseline_macs,xsep_macs,baseline_params,xsep_params,ratio plus a
// TOTAL row.
std::string to_csv(const NetworkAnalysis& analysis);

}  // namespace xsepconv

#endif  // XSEPCONV_COST_MODEL_HPP_
