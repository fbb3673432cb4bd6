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

#include "xsepconv/cost_model.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace xsepconv {

Rational Rational::of(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

namespace {

void check_k(int k) {
  if (k < 1) throw std::invalid_argument("kernel size must be >= 1");
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

}  // namespace

Rational ratio_basic_exact(int k) {
  check_k(k);
  return Rational::of(4 + 2 * static_cast<std::int64_t>(k),
                      static_cast<std::int64_t>(k) * k);
}

double ratio_basic(int k) { return ratio_basic_exact(k).value(); }

Rational ratio_downsample_exact(int k) {
  check_k(k);
  return Rational::of(16 + 3 * static_cast<std::int64_t>(k),
                      static_cast<std::int64_t>(k) * k);
}

double ratio_downsample(int k) { return ratio_downsample_exact(k).value(); }

std::optional<double> CostReport::ratio() const {
  if (!baseline_macs || *baseline_macs == 0) return std::nullopt;
  return static_cast<double>(macs) / static_cast<double>(*baseline_macs);
}

namespace {

CostReport raw_cost(const LayerConfig& cfg) {
  BlockSpec spec;
  spec.variant = cfg.variant;
  spec.k = cfg.k;
  spec.c = cfg.c;
  spec.stride = cfg.stride;
  validate(spec);
  if (cfg.h < 1 || cfg.w < 1) {
    throw std::invalid_argument("layer_cost: spatial dims must be >= 1");
  }
  const std::uint64_t k = cfg.k, c = cfg.c, h = cfg.h, w = cfg.w;
  const std::uint64_t hw = h * w;
  CostReport r;
  switch (cfg.variant) {
    case BlockVariant::VanillaDW: {
      const std::uint64_t oh = ceil_div(h, cfg.stride.h);
      const std::uint64_t ow = ceil_div(w, cfg.stride.w);
      r.macs = k * k * oh * ow * c;
      r.params = k * k * c;
      break;
    }
    case BlockVariant::XSep:
    case BlockVariant::XSepBehind:
    case BlockVariant::XSepParallel:
      r.macs = (4 + 2 * k) * hw * c;
      r.params = (4 + 2 * k) * c;
      break;
    case BlockVariant::XSepNo2x2:
      r.macs = 2 * k * hw * c;
      r.params = 2 * k * c;
      break;
    case BlockVariant::XSepDownsample: {
      // 2x2 at full size, 1xk halves the width, kx1 halves the height.
      const std::uint64_t ow = ceil_div(w, 2), oh = ceil_div(h, 2);
      r.macs = 4 * hw * c + k * h * ow * c + k * oh * ow * c;
      r.params = (4 + 2 * k) * c;
      break;
    }
  }
  return r;
}

}  // namespace

CostReport layer_cost(const LayerConfig& cfg) {
  CostReport r = raw_cost(cfg);
  LayerConfig base = cfg;
  base.variant = BlockVariant::VanillaDW;
  const CostReport b = raw_cost(base);
  r.baseline_macs = b.macs;
  r.baseline_params = b.params;
  return r;
}

double AnalysisRow::ratio() const {
  if (baseline_macs == 0) return 1.0;
  return static_cast<double>(xsep_macs) / static_cast<double>(baseline_macs);
}

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(path + "." + key + ": missing required field");
  }
  return *it;
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) {
    throw ConfigError(path + ": expected integer");
  }
  return v.get<int>();
}

std::uint64_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(path + ": expected non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected number");
  return v.get<double>();
}

NetworkLayer parse_layer(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected object");
  NetworkLayer l;
  const json& name = require(j, "name", path);
  if (!name.is_string()) throw ConfigError(path + ".name: expected string");
  l.name = name.get<std::string>();
  const json& kind = require(j, "kind", path);
  const std::string kind_s = kind.is_string() ? kind.get<std::string>() : "";
  if (kind_s == "dw") {
    l.kind = NetworkLayer::Kind::Depthwise;
  } else if (kind_s == "opaque") {
    l.kind = NetworkLayer::Kind::Opaque;
  } else {
    throw ConfigError(path + ".kind: expected \"dw\" or \"opaque\"");
  }
  if (j.contains("stride")) l.stride = as_int(j["stride"], path + ".stride");
  if (l.stride != 1 && l.stride != 2) {
    throw ConfigError(path + ".stride: must be 1 or 2");
  }
  if (l.kind == NetworkLayer::Kind::Depthwise) {
    l.k = as_int(require(j, "k", path), path + ".k");
    l.c = as_int(require(j, "c", path), path + ".c");
    if (j.contains("variant")) {
      const json& v = j["variant"];
      if (!v.is_string()) throw ConfigError(path + ".variant: expected string");
      try {
        l.variant = variant_from_string(v.get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ".variant: " + e.what());
      }
    }
    if (j.contains("h")) l.h = as_int(j["h"], path + ".h");
    if (j.contains("w")) l.w = as_int(j["w"], path + ".w");
  } else {
    if (j.contains("c")) l.c = as_int(j["c"], path + ".c");
    if (j.contains("opaque_macs")) {
      l.opaque_macs = as_count(j["opaque_macs"], path + ".opaque_macs");
    }
    if (j.contains("opaque_params")) {
      l.opaque_params = as_count(j["opaque_params"], path + ".opaque_params");
    }
    if (j.contains("out_hw")) {
      const json& o = j["out_hw"];
      if (!o.is_array() || o.size() != 2) {
        throw ConfigError(path + ".out_hw: expected [h, w]");
      }
      l.out_hw = std::pair{as_int(o[0], path + ".out_hw[0]"),
                           as_int(o[1], path + ".out_hw[1]")};
    }
  }
  return l;
}

}  // namespace

NetworkConfig parse_network_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: expected top-level object");
  NetworkConfig cfg;
  const json& input = require(root, "input", "config");
  if (!input.is_array() || input.size() != 3) {
    throw ConfigError("config.input: expected [c, h, w]");
  }
  cfg.in_c = as_int(input[0], "config.input[0]");
  cfg.in_h = as_int(input[1], "config.input[1]");
  cfg.in_w = as_int(input[2], "config.input[2]");
  if (cfg.in_c < 1 || cfg.in_h < 1 || cfg.in_w < 1) {
    throw ConfigError("config.input: dims must be >= 1");
  }
  const json& layers = require(root, "layers", "config");
  if (!layers.is_array()) throw ConfigError("config.layers: expected array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    cfg.layers.push_back(
        parse_layer(layers[i], "config.layers[" + std::to_string(i) + "]"));
  }
  if (root.contains("reference")) {
    const json& r = root["reference"];
    const std::string p = "config.reference";
    NetworkReference ref;
    if (r.contains("flops_convention")) {
      ref.flops_convention = r["flops_convention"].get<std::string>();
      if (ref.flops_convention != "macs" && ref.flops_convention != "flops") {
        throw ConfigError(p + ".flops_convention: expected \"macs\" or \"flops\"");
      }
    }
    ref.baseline_flops = as_number(require(r, "baseline_flops", p), p + ".baseline_flops");
    ref.substituted_flops =
        as_number(require(r, "substituted_flops", p), p + ".substituted_flops");
    ref.baseline_params =
        as_number(require(r, "baseline_params", p), p + ".baseline_params");
    ref.substituted_params =
        as_number(require(r, "substituted_params", p), p + ".substituted_params");
    cfg.reference = ref;
  }
  return cfg;
}

NetworkConfig load_network_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network_config(ss.str());
}

NetworkAnalysis analyze_network(const NetworkConfig& config,
                                const SubstitutionPolicy& policy) {
  int last_downsample = -1;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    if (config.layers[i].stride == 2) last_downsample = static_cast<int>(i);
  }
  NetworkAnalysis out;
  int c = config.in_c, h = config.in_h, w = config.in_w;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    const NetworkLayer& l = config.layers[i];
    const std::string path = "config.layers[" + std::to_string(i) + "]";
    AnalysisRow row;
    row.layer = l.name;
    if (l.kind == NetworkLayer::Kind::Opaque) {
      row.baseline_macs = row.xsep_macs = l.opaque_macs;
      row.baseline_params = row.xsep_params = l.opaque_params;
      if (l.c > 0) c = l.c;
      if (l.out_hw) {
        h = l.out_hw->first;
        w = l.out_hw->second;
      } else {
        h = static_cast<int>(ceil_div(h, l.stride));
        w = static_cast<int>(ceil_div(w, l.stride));
      }
    } else {
      if (l.c != c) {
        throw ConfigError(path + ".c: inconsistent dim flow, expected " +
                          std::to_string(c) + " channels, got " +
                          std::to_string(l.c));
      }
      if ((l.h && *l.h != h) || (l.w && *l.w != w)) {
        throw ConfigError(path + ": inconsistent dim flow, expected input " +
                          std::to_string(h) + "x" + std::to_string(w));
      }
      LayerConfig base{l.name, l.variant, l.k, c, h, w, {l.stride, l.stride}};
      LayerConfig subst = base;
      if (l.variant == BlockVariant::VanillaDW) {
        if (l.stride == 1 && l.k >= 5) {
          subst.variant = policy.replacement;
          if (static_cast<int>(i) > last_downsample) subst.k = policy.last_stage_k;
        } else if (l.stride == 2 && downsample_recommended(l.k)) {
          subst.variant = BlockVariant::XSepDownsample;
        }
      }
      CostReport b, s;
      try {
        b = layer_cost(base);
        s = layer_cost(subst);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
      }
      row.baseline_macs = b.macs;
      row.baseline_params = b.params;
      row.xsep_macs = s.macs;
      row.xsep_params = s.params;
      if (subst.variant != base.variant || subst.k != base.k) {
        row.substitution = std::string(to_string(subst.variant)) +
                           " k=" + std::to_string(subst.k);
      }
      h = static_cast<int>(ceil_div(h, l.stride));
      w = static_cast<int>(ceil_div(w, l.stride));
    }
    out.baseline_macs += row.baseline_macs;
    out.xsep_macs += row.xsep_macs;
    out.baseline_params += row.baseline_params;
    out.xsep_params += row.xsep_params;
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string to_csv(const NetworkAnalysis& analysis) {
  std::string out = "layer,baseline_macs,xsep_macs,baseline_params,xsep_params,ratio\n";
  auto line = [&out](const std::string& name, std::uint64_t bm, std::uint64_t xm,
                     std::uint64_t bp, std::uint64_t xp, double ratio) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", ratio);
    out += name + "," + std::to_string(bm) + "," + std::to_string(xm) + "," +
           std::to_string(bp) + "," + std::to_string(xp) + "," + buf + "\n";
  };
  for (const auto& r : analysis.rows) {
    line(r.layer, r.baseline_macs, r.xsep_macs, r.baseline_params,
         r.xsep_params, r.ratio());
  }
  const double total_ratio =
      analysis.baseline_macs == 0
          ? 1.0
          : static_cast<double>(analysis.xsep_macs) / analysis.baseline_macs;
  line("TOTAL", analysis.baseline_macs, analysis.xsep_macs,
       analysis.baseline_params, analysis.xsep_params, total_ratio);
  return out;
}

}  // namespace xsepconv
