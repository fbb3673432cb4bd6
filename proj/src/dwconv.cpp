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

#include "xsepconv/dwconv.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace xsepconv {

DepthwiseWeights::DepthwiseWeights(int kh, int kw, int c)
    : DepthwiseWeights(kh, kw, c,
                       std::vector<double>(static_cast<std::size_t>(
                                               std::max(kh, 0)) *
                                               std::max(kw, 0) * std::max(c, 0),
                                           0.0)) {}

DepthwiseWeights::DepthwiseWeights(int kh, int kw, int c,
                                   std::vector<double> values)
    : kh_(kh), kw_(kw), c_(c), values_(std::move(values)) {
  if (kh < 1 || kw < 1 || c < 1) {
    throw std::invalid_argument("depthwise weights need kh, kw, c >= 1");
  }
  if (values_.size() != static_cast<std::size_t>(kh) * kw * c) {
    throw std::invalid_argument("depthwise weights: values length " +
                                std::to_string(values_.size()) +
                                " != kh*kw*c");
  }
}

Dims conv_output_dims(const Dims& input, int kh, int kw, const ConvGeom& g) {
  validate(input);
  validate(g.pad);
  auto stride_ok = [](int s) { return s == 1 || s == 2; };
  if (!stride_ok(g.stride_h) || !stride_ok(g.stride_w)) {
    throw std::invalid_argument("conv geometry: strides must be 1 or 2");
  }
  const int ph = input.h + g.pad.top + g.pad.bottom;
  const int pw = input.w + g.pad.left + g.pad.right;
  if (ph < kh || pw < kw) {
    throw std::invalid_argument(
        "conv geometry: kernel " + std::to_string(kh) + "x" +
        std::to_string(kw) + " larger than padded input " +
        std::to_string(ph) + "x" + std::to_string(pw));
  }
  return {input.n, input.c, (ph - kh) / g.stride_h + 1,
          (pw - kw) / g.stride_w + 1};
}

namespace {

void check_channels(const Tensor4& x, const DepthwiseWeights& w) {
  if (x.dims().c != w.c()) {
    throw std::invalid_argument("channel mismatch: input has " +
                                std::to_string(x.dims().c) +
                                " channels, weights " + std::to_string(w.c()));
  }
}

// Output columns [lo, hi) whose tap kx lands inside the unpadded row.
struct ColumnRange {
  int lo;
  int hi;
};

ColumnRange valid_columns(int kx, int stride, int left, int in_w, int out_w) {
  // ix = ox*stride + kx - left must satisfy 0 <= ix < in_w.
  const int first = left - kx;
  int lo = first <= 0 ? 0 : (first + stride - 1) / stride;
  const int last = in_w - 1 + left - kx;
  int hi = last < 0 ? 0 : last / stride + 1;
  lo = std::min(lo, out_w);
  hi = std::clamp(hi, lo, out_w);
  return {lo, hi};
}

// Unit-stride inner loop; the rows never alias.
void accumulate_row(double* __restrict out, const double* __restrict in,
                    double wv, int count) {
  for (int i = 0; i < count; ++i) out[i] += wv * in[i];
}

}  // namespace

Tensor4 dw_forward(const Tensor4& x, const DepthwiseWeights& w,
                   const ConvGeom& g) {
  check_channels(x, w);
  const Dims in = x.dims();
  const Dims od = conv_output_dims(in, w.kh(), w.kw(), g);
  Tensor4 y(od);
  const int planes = in.n * in.c;
  const int kh = w.kh(), kw = w.kw();
  const int sh = g.stride_h, sw = g.stride_w;

#pragma omp parallel for schedule(static)
  for (int p = 0; p < planes; ++p) {
    const int n = p / in.c, z = p % in.c;
    const double* src = x.plane(n, z).data();
    double* dst = y.plane(n, z).data();
    for (int oy = 0; oy < od.h; ++oy) {
      double* out_row = dst + static_cast<std::size_t>(oy) * od.w;
      for (int ky = 0; ky < kh; ++ky) {
        const int iy = oy * sh + ky - g.pad.top;
        if (iy < 0 || iy >= in.h) continue;
        const double* in_row = src + static_cast<std::size_t>(iy) * in.w;
        for (int kx = 0; kx < kw; ++kx) {
          const double wv = w(ky, kx, z);
          const auto [lo, hi] = valid_columns(kx, sw, g.pad.left, in.w, od.w);
          const int base = kx - g.pad.left;
          if (sw == 1) {
            accumulate_row(out_row + lo, in_row + lo + base, wv, hi - lo);
          } else {
            for (int ox = lo; ox < hi; ++ox) {
              out_row[ox] += wv * in_row[ox * sw + base];
            }
          }
        }
      }
    }
  }
  return y;
}

Tensor4 naive_reference(const Tensor4& x, const DepthwiseWeights& w,
                        const ConvGeom& g, std::uint64_t& macs) {
  check_channels(x, w);
  const Dims od = conv_output_dims(x.dims(), w.kh(), w.kw(), g);
  const Tensor4 xp = pad(x, g.pad);
  Tensor4 y(od);
  for (int ky = 0; ky < w.kh(); ++ky) {
    for (int kx = 0; kx < w.kw(); ++kx) {
      for (int n = 0; n < od.n; ++n) {
        for (int z = 0; z < od.c; ++z) {
          for (int oy = 0; oy < od.h; ++oy) {
            for (int ox = 0; ox < od.w; ++ox) {
              y(n, z, oy, ox) +=
                  w(ky, kx, z) *
                  xp(n, z, oy * g.stride_h + ky, ox * g.stride_w + kx);
              ++macs;
            }
          }
        }
      }
    }
  }
  return y;
}

Tensor4 naive_reference(const Tensor4& x, const DepthwiseWeights& w,
                        const ConvGeom& g) {
  std::uint64_t unused = 0;
  return naive_reference(x, w, g, unused);
}

Tensor4 dw_backward_input(const Tensor4& grad_y, const DepthwiseWeights& w,
                          const ConvGeom& g, const Dims& input_dims) {
  const Dims od = conv_output_dims(input_dims, w.kh(), w.kw(), g);
  if (!(grad_y.dims() == od)) {
    throw std::invalid_argument(
        "dw_backward_input: grad_y dims do not match forward output");
  }
  if (input_dims.c != w.c()) {
    throw std::invalid_argument("dw_backward_input: channel mismatch");
  }
  const Dims in = input_dims;
  Tensor4 gx(in);
  const int planes = in.n * in.c;
  const int kh = w.kh(), kw = w.kw();
  const int sh = g.stride_h, sw = g.stride_w;

#pragma omp parallel for schedule(static)
  for (int p = 0; p < planes; ++p) {
    const int n = p / in.c, z = p % in.c;
    const double* gy = grad_y.plane(n, z).data();
    double* dst = gx.plane(n, z).data();
    for (int oy = 0; oy < od.h; ++oy) {
      const double* gy_row = gy + static_cast<std::size_t>(oy) * od.w;
      for (int ky = 0; ky < kh; ++ky) {
        const int iy = oy * sh + ky - g.pad.top;
        if (iy < 0 || iy >= in.h) continue;
        double* in_row = dst + static_cast<std::size_t>(iy) * in.w;
        for (int kx = 0; kx < kw; ++kx) {
          const double wv = w(ky, kx, z);
          const auto [lo, hi] = valid_columns(kx, sw, g.pad.left, in.w, od.w);
          const int base = kx - g.pad.left;
          for (int ox = lo; ox < hi; ++ox) {
            in_row[ox * sw + base] += wv * gy_row[ox];
          }
        }
      }
    }
  }
  return gx;
}

DepthwiseWeights dw_backward_weights(const Tensor4& x, const Tensor4& grad_y,
                                     const ConvGeom& g, int kh, int kw) {
  const Dims in = x.dims();
  const Dims od = conv_output_dims(in, kh, kw, g);
  if (!(grad_y.dims() == od)) {
    throw std::invalid_argument(
        "dw_backward_weights: grad_y dims do not match forward output");
  }
  DepthwiseWeights gw(kh, kw, in.c);
  const int sh = g.stride_h, sw = g.stride_w;

#pragma omp parallel for schedule(static)
  for (int z = 0; z < in.c; ++z) {
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        const auto [lo, hi] = valid_columns(kx, sw, g.pad.left, in.w, od.w);
        const int base = kx - g.pad.left;
        double acc = 0.0;
        for (int n = 0; n < in.n; ++n) {
          const double* src = x.plane(n, z).data();
          const double* gy = grad_y.plane(n, z).data();
          for (int oy = 0; oy < od.h; ++oy) {
            const int iy = oy * sh + ky - g.pad.top;
            if (iy < 0 || iy >= in.h) continue;
            const double* in_row = src + static_cast<std::size_t>(iy) * in.w;
            const double* gy_row = gy + static_cast<std::size_t>(oy) * od.w;
            for (int ox = lo; ox < hi; ++ox) {
              acc += gy_row[ox] * in_row[ox * sw + base];
            }
          }
        }
        gw(ky, kx, z) = acc;
      }
    }
  }
  return gw;
}

}  // namespace xsepconv
