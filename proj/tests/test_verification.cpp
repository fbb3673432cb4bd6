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

#include <cmath>
#include <limits>

#include "xsepconv/suites.hpp"
#include "xsepconv/verification.hpp"

using namespace xsepconv;

TEST_SUITE("verification") {

TEST_CASE("rng is reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const int k = c.integer(-2, 2);
    CHECK(k >= -2);
    CHECK(k <= 2);
  }
}

TEST_CASE("grad_check argument checks") {
  Rng rng(1);
  DwConvTarget t(random_tensor({1, 1, 4, 4}, rng), random_weights(1, 1, 1, rng), {});
  CHECK_THROWS(grad_check(t, 1e-9, 1e-5));
  CHECK_THROWS(grad_check(t, 1e-2, 1e-5));
  BatchNormParams bn = BatchNormParams::identity(1);
  Tensor4 x(Dims{1, 1, 2, 2}, {1.0, std::numeric_limits<double>::infinity(), 0.0, 0.0});
  BatchNormTarget nan_target(x, bn);
  CHECK_THROWS_AS(grad_check(nan_target, 1e-5, 1e-5), std::domain_error);
}

TEST_CASE("a 1x1 convolution is checked to rounding accuracy") {
  Rng rng(2);
  DwConvTarget t(random_tensor({2, 3, 5, 5}, rng), random_weights(1, 1, 3, rng), {});
  const GradCheckReport r = grad_check(t, 1e-3, 1e-9, 3);
  CHECK(r.max_rel_error() < 1e-9);
  CHECK(r.checked() == 2 * 3 * 5 * 5 + 3);
  CHECK(r.groups.size() == 2);
}

TEST_CASE("XSep block gradients, Identity activation, c=2, k=3") {
  Rng rng(3);
  BlockSpec s;
  s.k = 3;
  s.c = 2;
  s.activation = Activation::Identity;
  BlockTarget t(s, init_block(s, 5), random_tensor({1, 2, 6, 6}, rng));
  const GradCheckReport r = grad_check(t, 1e-5, 1e-5, 4);
  CHECK(r.passed());
  REQUIRE(r.groups.size() == 10);
  CHECK(r.groups[0].name == "input");
  CHECK(r.groups[1].name == "layer0.weights");
}

TEST_CASE("a zeroed gradient tap is detected") {
  Rng rng(4);
  BlockSpec s;
  s.k = 3;
  s.c = 2;
  s.activation = Activation::Identity;
  BlockTarget inner(s, init_block(s, 6), random_tensor({1, 2, 6, 6}, rng));
  CHECK(grad_check(inner, 1e-5, 1e-5, 1).passed());
  ZeroedTapTarget broken(inner, 1, 3);
  CHECK_FALSE(grad_check(broken, 1e-5, 1e-5, 1).passed());
}

TEST_CASE("kink margin") {
  Rng rng(5);
  BlockSpec s;
  s.k = 3;
  s.c = 1;
  const BlockState st = init_block(s, 1);
  const Tensor4 x = random_tensor({1, 1, 6, 6}, rng);
  CHECK(kink_margin(st, s, x) >= 0.0);
  s.activation = Activation::Identity;
  CHECK(std::isinf(kink_margin(st, s, x)));
}

TEST_CASE("misaligned effective-kernel padding is visible") {
  Rng rng(6);
  BlockSpec s;
  s.k = 5;
  s.c = 2;
  BlockState st = init_block(s, 2);
  make_linear(st, s);
  const Tensor4 x = random_tensor({1, 2, 18, 18}, rng);
  CHECK(interior_deviation(st, s, x, effective_geometry(s), 6) < 1e-10);
  BlockSpec wrong = s;
  wrong.pad = PadAssignment::single(PadDirection::RightTop);
  CHECK(interior_deviation(st, s, x, effective_geometry(wrong), 6) > 1e-3);
}

TEST_CASE("shift trace") {
  const Dims d{1, 4, 32, 32};
  SUBCASE("four improved layers cancel") {
    const ShiftTraceReport r = shift_trace(improved_schedule(4), 4, d);
    CHECK(std::abs(r.offset_y) < 1e-9);
    CHECK(std::abs(r.offset_x) < 1e-9);
    CHECK(r.per_layer.size() == 4);
  }
  SUBCASE("six improved layers stay within a pixel") {
    const ShiftTraceReport r = shift_trace(improved_schedule(6), 6, d);
    CHECK(std::abs(r.offset_y) <= 1.0);
    CHECK(std::abs(r.offset_x) <= 1.0);
  }
  SUBCASE("all right-bottom drifts toward the top-left corner") {
    PaddingSchedule s;
    s.layers.assign(8, PadAssignment::single(PadDirection::RightBottom));
    const ShiftTraceReport r = shift_trace(s, 8, d);
    CHECK(r.offset_y == doctest::Approx(-4.0));
    CHECK(r.offset_x == doctest::Approx(-4.0));
    CHECK(r.per_layer[0].cy - r.impulse_y == doctest::Approx(-0.5));
  }
  SUBCASE("grouped layers do not drift") {
    PaddingSchedule s;
    s.layers.assign(3, PadAssignment::grouped());
    const ShiftTraceReport r = shift_trace(s, 3, d);
    CHECK(std::abs(r.offset_y) < 1e-9);
    CHECK(std::abs(r.offset_x) < 1e-9);
  }
  SUBCASE("inputs too small for the spreading response are rejected") {
    CHECK_THROWS_AS(shift_trace(improved_schedule(12), 12, Dims{1, 1, 28, 29}),
                    std::invalid_argument);
  }
}

TEST_CASE("all suites pass and are reproducible") {
  const auto a = to_json(run_suites("all", 0), 0);
  CHECK(a["passed"] == true);
  CHECK(a["suites"].size() == suite_names().size());
  CHECK(a.dump() == to_json(run_suites("all", 0), 0).dump());
  CHECK_THROWS_AS(run_suites("speed", 0), std::invalid_argument);
}

TEST_CASE("suites pass across seeds") {
  for (std::uint64_t seed : {1ull, 7ull, 123456789ull}) {
    for (const auto& r : run_suites("all", seed)) {
      INFO(r.name << " seed " << seed);
      CHECK(r.passed);
    }
  }
}

}
