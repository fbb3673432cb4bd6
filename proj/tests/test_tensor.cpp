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

#include <stdexcept>

#include "xsepconv/tensor.hpp"

using namespace xsepconv;

TEST_SUITE("tensor") {

TEST_CASE("layout is n, c, h, w row-major") {
  Tensor4 t(Dims{2, 3, 4, 5});
  CHECK(t.size() == 120);
  CHECK(t.index(1, 2, 3, 4) == 119);
  CHECK(t.index(0, 1, 0, 0) == 20);
  t(1, 0, 2, 3) = 7.0;
  CHECK(t.plane(1, 0)[2 * 5 + 3] == 7.0);
}

TEST_CASE("zero dimensions and bad data sizes are rejected") {
  CHECK_THROWS_AS(Tensor4(Dims{1, 0, 3, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor4(Dims{1, 1, 2, 2}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_WITH_AS(validate(Dims{1, 1, 0, 1}), doctest::Contains("zero dimension"),
                       std::invalid_argument);
}

TEST_CASE("impulse places one unit") {
  const Tensor4 t = impulse(Dims{1, 2, 5, 5}, 1, 2, 3);
  CHECK(sum(t) == 1.0);
  CHECK(t(0, 1, 2, 3) == 1.0);
  CHECK_THROWS_AS(impulse(Dims{1, 2, 5, 5}, 2, 0, 0), std::out_of_range);
  CHECK_THROWS_AS(impulse(Dims{1, 2, 5, 5}, 0, 5, 0), std::out_of_range);
}

TEST_CASE("pad then crop is the identity") {
  Tensor4 t(Dims{1, 2, 3, 4});
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = static_cast<double>(i) + 1.0;
  const PadSpec p{1, 2, 0, 3};
  const Tensor4 padded = pad(t, p);
  CHECK(padded.dims() == Dims{1, 2, 6, 7});
  CHECK(sum(padded) == doctest::Approx(sum(t)));
  CHECK(padded(0, 0, 1, 0) == 1.0);
  CHECK(max_abs_diff(crop(padded, p), t) == 0.0);
  CHECK_THROWS(crop(t, PadSpec{2, 1, 0, 0}));
  CHECK_THROWS(pad(t, PadSpec{-1, 0, 0, 0}));
}

TEST_CASE("elementwise helpers") {
  const Tensor4 a(Dims{1, 1, 1, 3}, {1.0, 2.0, 3.0});
  const Tensor4 b(Dims{1, 1, 1, 3}, {4.0, -1.0, 0.5});
  CHECK(dot(a, b) == doctest::Approx(3.5));
  CHECK(add(a, b).values() == std::vector<double>{5.0, 1.0, 3.5});
  CHECK(max_abs_diff(a, b) == 3.0);
  CHECK_THROWS(max_abs_diff(a, Tensor4(Dims{1, 1, 3, 1})));
}

TEST_CASE("centroid is the mass-weighted mean") {
  Tensor4 t(Dims{1, 1, 4, 4});
  t(0, 0, 1, 1) = 1.0;
  t(0, 0, 3, 1) = 1.0;
  const Centroid c = centroid(t, 0);
  CHECK(c.cy == doctest::Approx(2.0));
  CHECK(c.cx == doctest::Approx(1.0));
  CHECK_THROWS_AS(centroid(Tensor4(Dims{1, 1, 2, 2}), 0), std::domain_error);
}

}
