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

#include <doctest.h>

#include <string>

#include "xsepconv/cost_model.hpp"
#include "xsepconv/verification.hpp"

using namespace xsepconv;

#ifndef XSEPCONV_CONFIG_DIR
#error "XSEPCONV_CONFIG_DIR must point at the bundled configs"
#endif

namespace {

const std::string kConfigDir = XSEPCONV_CONFIG_DIR;

std::string config_error(const std::string& text) {
  try {
    parse_network_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("cost_model") {

TEST_CASE("exact cost ratios") {
  CHECK(ratio_basic_exact(5) == Rational{14, 25});
  CHECK(ratio_basic(5) == 0.56);
  CHECK(ratio_downsample_exact(7) == Rational{37, 49});
  CHECK(ratio_downsample_exact(5) == Rational{31, 25});
  CHECK(ratio_basic_exact(3) == Rational{10, 9});
  CHECK(ratio_basic_exact(4) == Rational{3, 4});
  CHECK_FALSE(ratio_basic_exact(3).less_than_one());
  CHECK(ratio_basic_exact(5).less_than_one());
  CHECK_FALSE(ratio_downsample_exact(5).less_than_one());
  CHECK(ratio_downsample_exact(7).less_than_one());
  CHECK(Rational::of(6, -4) == Rational{-3, 2});
}

TEST_CASE("hand-computed layer costs on 32x32x16") {
  const CostReport x = layer_cost({"x", BlockVariant::XSep, 5, 16, 32, 32, {1, 1}});
  CHECK(x.macs == 229376);
  CHECK(*x.baseline_macs == 409600);
  CHECK(x.params == 14 * 16);
  CHECK(*x.baseline_params == 25 * 16);
  CHECK(x.flops() == 2 * x.macs);
  const CostReport d = layer_cost({"d", BlockVariant::XSepDownsample, 7, 16, 32, 32, {2, 2}});
  CHECK(d.macs == 151552);
  CHECK(*d.baseline_macs == 200704);
  CHECK(*d.ratio() == doctest::Approx(37.0 / 49.0));
  const CostReport odd = layer_cost({"o", BlockVariant::VanillaDW, 3, 2, 7, 9, {2, 2}});
  CHECK(odd.macs == 9ull * 4 * 5 * 2);
}

TEST_CASE("analytic counts equal instrumented counts") {
  Rng rng(77);
  for (BlockVariant v : all_variants()) {
    for (int k : {3, 5, 7}) {
      for (int t = 0; t < 3; ++t) {
        BlockSpec s;
        s.variant = v;
        s.k = k;
        s.c = rng.integer(1, 6);
        s.stride = v == BlockVariant::XSepDownsample ? Stride{2, 2} : Stride{1, 1};
        const int h = rng.integer(k + 1, 33), w = rng.integer(k + 1, 33);
        CHECK(layer_cost({"l", v, k, s.c, h, w, s.stride}).macs == block_mac_count(s, h, w));
      }
    }
  }
}

TEST_CASE("config diagnostics name the field") {
  CHECK(config_error(R"({"input":[4,8,8],"layers":[{"name":"a","kind":"dw","c":4}]})") ==
        "config.layers[0].k: missing required field");
  CHECK(config_error(R"({"input":[4,8,8],"layers":[{"name":"a","kind":"dw","k":3,"c":5}]})")
            .empty());  // only the dim-flow check sees this
  CHECK(config_error(R"({"input":[4,8,8],"layers":[{"name":"a","kind":"pw"}]})")
            .find("config.layers[0].kind") != std::string::npos);
  CHECK(config_error(R"({"input":[4,8,8],"layers":[{"name":"a","kind":"dw","k":3,"c":4,"stride":3}]})")
            .find("config.layers[0].stride") != std::string::npos);
  CHECK(config_error("{\"input\": [4, 8, 8],\n \"layers\": [}").find("line 2") !=
        std::string::npos);
  CHECK(config_error(R"({"layers":[]})") == "config.input: missing required field");
  const NetworkConfig bad =
      parse_network_config(R"({"input":[4,8,8],"layers":[{"name":"a","kind":"dw","k":3,"c":5}]})");
  CHECK_THROWS_WITH_AS(analyze_network(bad), doctest::Contains("config.layers[0].c"), ConfigError);
}

TEST_CASE("missing config file names the path") {
  CHECK_THROWS_WITH(load_network_config("/nonexistent/net.json"),
                    doctest::Contains("/nonexistent/net.json"));
}

TEST_CASE("two-layer config: only the stride-1 layer is substituted") {
  const NetworkAnalysis a = analyze_network(load_network_config(kConfigDir + "/toy-two-layer.json"));
  REQUIRE(a.rows.size() == 2);
  CHECK(a.rows[0].baseline_macs == 25 * 16 * 16 * 48);
  CHECK(a.rows[0].xsep_macs == 14 * 16 * 16 * 48);
  CHECK(a.rows[0].substitution == "XSep k=5");
  CHECK(a.rows[1].baseline_macs == 25 * 8 * 8 * 48);
  CHECK(a.rows[1].xsep_macs == a.rows[1].baseline_macs);
  CHECK(a.rows[1].substitution.empty());
  CHECK(to_csv(a) ==
        "layer,baseline_macs,xsep_macs,baseline_params,xsep_params,ratio\n"
        "mid_dw5,307200,172032,1200,672,0.560000\n"
        "down_dw5,76800,76800,1200,1200,1.000000\n"
        "TOTAL,384000,248832,2400,1872,0.648000\n");
}

TEST_CASE("bundled MobileNetV3-Small totals") {
  const NetworkConfig cfg = load_network_config(kConfigDir + "/mobilenetv3-small-cifar.json");
  const NetworkAnalysis a = analyze_network(cfg);
  CHECK(a.baseline_macs == 17507328);
  CHECK(a.xsep_macs == 16707072);
  CHECK(a.baseline_params == 1528106);
  CHECK(a.xsep_params == 1502642);
  REQUIRE(cfg.reference.has_value());
  CHECK(cfg.reference->flops_convention == "macs");
  SUBCASE("substitution policy") {
    int xsep5 = 0, xsep3 = 0;
    for (const auto& r : a.rows) {
      if (r.substitution == "XSep k=5") ++xsep5;
      if (r.substitution == "XSep k=3") ++xsep3;
    }
    CHECK(xsep5 == 4);  // mid stage
    CHECK(xsep3 == 2);  // after the last downsampling
  }
  SUBCASE("other replacements") {
    SubstitutionPolicy p;
    p.replacement = BlockVariant::XSepNo2x2;
    CHECK(analyze_network(cfg, p).xsep_macs == 16442880);
  }
}

}
