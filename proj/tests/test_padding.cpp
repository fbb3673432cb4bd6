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

#include "xsepconv/padding.hpp"

using namespace xsepconv;

TEST_SUITE("padding") {

TEST_CASE("direction codes round-trip") {
  for (auto d : {PadDirection::RightBottom, PadDirection::LeftTop,
                 PadDirection::LeftBottom, PadDirection::RightTop}) {
    CHECK(direction_from_code(to_code(d)) == d);
    CHECK(opposite(opposite(d)) == d);
    const auto [dy, dx] = half_pixel_shift(d);
    const auto [oy, ox] = half_pixel_shift(opposite(d));
    CHECK(dy == -oy);
    CHECK(dx == -ox);
  }
  CHECK(assignment_from_code("GROUPED").is_grouped());
  CHECK_THROWS(direction_from_code("XX"));
}

TEST_CASE("bottom and right padding pull the centroid up and left") {
  CHECK(half_pixel_shift(PadDirection::RightBottom) == std::pair{-0.5, -0.5});
  CHECK(half_pixel_shift(PadDirection::LeftTop) == std::pair{0.5, 0.5});
  CHECK(half_pixel_shift(PadDirection::LeftBottom) == std::pair{-0.5, 0.5});
  CHECK(half_pixel_shift(PadDirection::RightTop) == std::pair{0.5, -0.5});
}

TEST_CASE("same padding") {
  CHECK(same_pad(3, 3, 1, 1) == PadSpec{1, 1, 1, 1});
  CHECK(same_pad(1, 5, 1, 1) == PadSpec{0, 0, 2, 2});
  CHECK(same_pad(2, 2, 1, 1, PadDirection::RightBottom) == PadSpec{0, 1, 0, 1});
  CHECK(same_pad(2, 2, 1, 1, PadDirection::LeftTop) == PadSpec{1, 0, 1, 0});
  CHECK(same_pad(2, 2, 1, 1, PadDirection::LeftBottom) == PadSpec{0, 1, 1, 0});
  CHECK(same_pad(4, 4, 1, 1, PadDirection::RightTop) == PadSpec{2, 1, 1, 2});
  CHECK_THROWS(same_pad(2, 2, 1, 1));
}

TEST_CASE("improved schedule cycles RB, LT, LB, RT") {
  const auto s = improved_schedule(8);
  REQUIRE(s.n_even_layers() == 8);
  const PadDirection expect[] = {PadDirection::RightBottom, PadDirection::LeftTop,
                                 PadDirection::LeftBottom, PadDirection::RightTop};
  for (int i = 0; i < 8; ++i) {
    CHECK_FALSE(s.layers[i].is_grouped());
    CHECK(s.layers[i].direction == expect[i % 4]);
  }
  CHECK(improved_schedule(0).layers.empty());
  CHECK(improved_schedule(5).layers.back().is_grouped());
  CHECK_FALSE(improved_schedule(6).layers.back().is_grouped());
  CHECK_THROWS(improved_schedule(-1));
}

TEST_CASE("net offset of the improved schedule stays within one pixel") {
  for (int n = 0; n <= 64; ++n) {
    const auto [dy, dx] = net_offset(improved_schedule(n));
    CHECK(std::abs(dy) <= 1.0);
    CHECK(std::abs(dx) <= 1.0);
    if (n % 4 == 0) {
      CHECK(dy == 0.0);
      CHECK(dx == 0.0);
    }
  }
  PaddingSchedule all_rb;
  all_rb.layers.assign(8, PadAssignment::single(PadDirection::RightBottom));
  CHECK(net_offset(all_rb) == std::pair{-4.0, -4.0});
}

TEST_CASE("channel groups split contiguously") {
  const auto g = channel_groups(10);
  REQUIRE(g.size() == 4);
  CHECK(g[0].begin == 0);
  CHECK(g[0].end == 3);
  CHECK(g[1].end == 6);
  CHECK(g[2].end == 8);
  CHECK(g[3].end == 10);
  CHECK(g[0].direction == PadDirection::LeftTop);
  CHECK(g[1].direction == PadDirection::RightBottom);
  CHECK(g[2].direction == PadDirection::LeftBottom);
  CHECK(g[3].direction == PadDirection::RightTop);
  CHECK(channel_groups(2).size() == 2);
}

TEST_CASE("grouped padding places each group toward its corner") {
  Tensor4 x(Dims{1, 4, 2, 2});
  for (double& v : x.data()) v = 1.0;
  const GroupedPadding gp = grouped_original_pad(x);
  CHECK(gp.padded.dims() == Dims{1, 4, 3, 3});
  CHECK(gp.padded(0, 0, 0, 0) == 0.0);  // LeftTop pads the top row and left column
  CHECK(gp.padded(0, 0, 2, 2) == 1.0);
  CHECK(gp.padded(0, 1, 0, 0) == 1.0);  // RightBottom
  CHECK(gp.padded(0, 1, 2, 2) == 0.0);
  CHECK(max_abs_diff(grouped_original_crop(gp.padded, gp.groups), x) == 0.0);
}

}
