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

#include "xsepconv/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace xsepconv {

void validate(const Dims& d) {
  if (d.n < 1 || d.c < 1 || d.h < 1 || d.w < 1) {
    throw std::invalid_argument("zero dimension in tensor dims (" +
                                std::to_string(d.n) + "," +
                                std::to_string(d.c) + "," +
                                std::to_string(d.h) + "," +
                                std::to_string(d.w) + ")");
  }
}

void validate(const PadSpec& p) {
  if (p.top < 0 || p.bottom < 0 || p.left < 0 || p.right < 0) {
    throw std::invalid_argument("negative padding");
  }
}

Tensor4::Tensor4(Dims dims) : dims_(dims) {
  validate(dims_);
  data_.assign(dims_.size(), 0.0);
}

Tensor4::Tensor4(Dims dims, std::vector<double> data)
    : dims_(dims), data_(std::move(data)) {
  validate(dims_);
  if (data_.size() != dims_.size()) {
    throw std::invalid_argument("tensor data length " +
                                std::to_string(data_.size()) +
                                " does not match dims product " +
                                std::to_string(dims_.size()));
  }
}

Tensor4 zeros(Dims dims) { return Tensor4(dims); }

Tensor4 impulse(Dims dims, int channel, int y, int x) {
  Tensor4 t(dims);
  if (channel < 0 || channel >= dims.c || y < 0 || y >= dims.h || x < 0 ||
      x >= dims.w) {
    throw std::out_of_range("impulse coordinate out of range");
  }
  t(0, channel, y, x) = 1.0;
  return t;
}

Tensor4 pad(const Tensor4& x, const PadSpec& p) {
  validate(p);
  const Dims& d = x.dims();
  Tensor4 out(Dims{d.n, d.c, d.h + p.top + p.bottom, d.w + p.left + p.right});
  for (int n = 0; n < d.n; ++n) {
    for (int c = 0; c < d.c; ++c) {
      for (int y = 0; y < d.h; ++y) {
        const double* src = &x.data()[x.index(n, c, y, 0)];
        std::copy(src, src + d.w,
                  &out.data()[out.index(n, c, y + p.top, p.left)]);
      }
    }
  }
  return out;
}

Tensor4 crop(const Tensor4& x, const PadSpec& p) {
  validate(p);
  const Dims& d = x.dims();
  if (d.h <= p.top + p.bottom || d.w <= p.left + p.right) {
    throw std::invalid_argument("crop would produce an empty result");
  }
  Tensor4 out(Dims{d.n, d.c, d.h - p.top - p.bottom, d.w - p.left - p.right});
  const Dims& o = out.dims();
  for (int n = 0; n < o.n; ++n) {
    for (int c = 0; c < o.c; ++c) {
      for (int y = 0; y < o.h; ++y) {
        const double* src = &x.data()[x.index(n, c, y + p.top, p.left)];
        std::copy(src, src + o.w, &out.data()[out.index(n, c, y, 0)]);
      }
    }
  }
  return out;
}

double max_abs_diff(const Tensor4& a, const Tensor4& b) {
  if (!(a.dims() == b.dims())) {
    throw std::invalid_argument("max_abs_diff: dim mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

Tensor4 add(const Tensor4& a, const Tensor4& b) {
  if (!(a.dims() == b.dims())) throw std::invalid_argument("add: dim mismatch");
  Tensor4 out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

double sum(const Tensor4& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return s;
}

double dot(const Tensor4& a, const Tensor4& b) {
  if (!(a.dims() == b.dims())) {
    throw std::invalid_argument("dot: dim mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

Centroid centroid(const Tensor4& x, int channel) {
  const Dims& d = x.dims();
  if (channel < 0 || channel >= d.c) {
    throw std::out_of_range("centroid: channel out of range");
  }
  double mass = 0.0, my = 0.0, mx = 0.0;
  for (int y = 0; y < d.h; ++y) {
    for (int xx = 0; xx < d.w; ++xx) {
      const double v = x(0, channel, y, xx);
      mass += v;
      my += y * v;
      mx += xx * v;
    }
  }
  if (mass == 0.0) throw std::domain_error("centroid: zero mass");
  return {my / mass, mx / mass};
}

}  // namespace xsepconv
