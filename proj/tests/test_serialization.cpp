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

#include "xsepconv/serialization.hpp"

using namespace xsepconv;
using nlohmann::json;

TEST_SUITE("serialization") {

TEST_CASE("tensor round trip") {
  Rng rng(1);
  const Tensor4 t = random_tensor({2, 1, 3, 2}, rng);
  const json j = t;
  CHECK(j["dims"] == json({2, 1, 3, 2}));
  CHECK(max_abs_diff(j.get<Tensor4>(), t) == 0.0);
  CHECK_THROWS_AS(json::parse(R"({"dims":[1,1,2],"data":[0,0]})").get<Tensor4>(),
                  std::invalid_argument);
  CHECK_THROWS_AS(json::parse(R"({"dims":[1,1,1,2],"data":[0]})").get<Tensor4>(),
                  std::invalid_argument);
}

TEST_CASE("weights round trip") {
  Rng rng(2);
  const DepthwiseWeights w = random_weights(1, 5, 3, rng);
  const DepthwiseWeights back = json(w).get<DepthwiseWeights>();
  CHECK(back.kh() == 1);
  CHECK(back.kw() == 5);
  CHECK(back.values() == w.values());
  CHECK_THROWS_AS(json::parse(R"({"kh":1,"kw":2,"c":1})").get<DepthwiseWeights>(),
                  std::invalid_argument);
}

TEST_CASE("schedule round trip") {
  const PaddingSchedule s = improved_schedule(5);
  const json j = s;
  CHECK(j["layers"] == json({"RB", "LT", "LB", "RT", "GROUPED"}));
  CHECK(j.get<PaddingSchedule>().layers == s.layers);
  CHECK_THROWS_AS(json::parse(R"({"n":2,"layers":["RB"]})").get<PaddingSchedule>(),
                  std::invalid_argument);
  CHECK_THROWS_AS(json::parse(R"({"n":1,"layers":["UP"]})").get<PaddingSchedule>(),
                  std::invalid_argument);
}

TEST_CASE("BlockSpec and BlockState round trip") {
  BlockSpec s;
  s.variant = BlockVariant::XSepDownsample;
  s.k = 7;
  s.c = 3;
  s.stride = {2, 2};
  s.activation = Activation::ReLU;
  s.pad = PadAssignment::single(PadDirection::LeftBottom);
  const BlockSpec back = json(s).get<BlockSpec>();
  CHECK(json(back) == json(s));
  BlockState st = init_block(s, 3);
  set_bn_mode(st, BnMode::Train);
  const BlockState st2 = json(st).get<BlockState>();
  CHECK(json(st2) == json(st));
  CHECK(st2.bn[0].mode == BnMode::Train);
  json bad = s;
  bad["k"] = 4;
  CHECK_THROWS_AS(bad.get<BlockSpec>(), std::invalid_argument);
}

TEST_CASE("reports serialize") {
  const json j = shift_trace(improved_schedule(2), 2, {1, 1, 16, 16});
  CHECK(j.contains("offset"));
  CHECK(j["per_layer_centroid"].size() == 2);
}

}
