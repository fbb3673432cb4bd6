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

#ifndef XSEPCONV_TENSOR_HPP_
#define XSEPCONV_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace xsepconv {

// Shape of a batch x channels x height x width activation.
struct Dims {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t size() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  bool operator==(const Dims&) const = default;
};

// Explicit zero padding per side, in pixels.
struct PadSpec {
  int top = 0;
  int bottom = 0;
  int left = 0;
  int right = 0;

  bool symmetric() const { return top == bottom && left == right; }
  bool operator==(const PadSpec&) const = default;
};

void validate(const PadSpec& p);

// Dense rank-4 tensor in n, c, h, w row-major order, double precision.
class Tensor4 {
 public:
  Tensor4() : Tensor4(Dims{}) {}
  explicit Tensor4(Dims dims);
  Tensor4(Dims dims, std::vector<double> data);

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * dims_.c + c) * dims_.h + y) *
               dims_.w +
           x;
  }
  double& operator()(int n, int c, int y, int x) {
    return data_[index(n, c, y, x)];
  }
  double operator()(int n, int c, int y, int x) const {
    return data_[index(n, c, y, x)];
  }

  // Contiguous h*w plane for batch item n, channel c.
  std::span<double> plane(int n, int c) {
    return {data_.data() + index(n, c, 0, 0), dims_.plane()};
  }
  std::span<const double> plane(int n, int c) const {
    return {data_.data() + index(n, c, 0, 0), dims_.plane()};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

 private:
  Dims dims_{};
  std::vector<double> data_;
};

void validate(const Dims& d);

Tensor4 zeros(Dims dims);

// Zeros except 1.0 at (0, channel, y, x).
Tensor4 impulse(Dims dims, int channel, int y, int x);

Tensor4 pad(const Tensor4& x, const PadSpec& p);
Tensor4 crop(const Tensor4& x, const PadSpec& p);

double max_abs_diff(const Tensor4& a, const Tensor4& b);

// Elementwise a + b; dims must match.
Tensor4 add(const Tensor4& a, const Tensor4& b);

double sum(const Tensor4& x);
double dot(const Tensor4& a, const Tensor4& b);

struct Centroid {
  double cy = 0.0;
  double cx = 0.0;
};

// Mass-weighted mean coordinate of one channel of batch item 0.
Centroid centroid(const Tensor4& x, int channel);

}  // namespace xsepconv

#endif  // XSEPCONV_TENSOR_HPP_
