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

#ifndef XSEPCONV_DWCONV_HPP_
#define XSEPCONV_DWCONV_HPP_

#include <cstdint>
#include <vector>

#include "xsepconv/tensor.hpp"

namespace xsepconv {

// Per-channel kernels of a depthwise convolution. values is indexed
// (ky, kx, channel) with channel fastest.
class DepthwiseWeights {
 public:
  DepthwiseWeights() : DepthwiseWeights(1, 1, 1) {}
  DepthwiseWeights(int kh, int kw, int c);
  DepthwiseWeights(int kh, int kw, int c, std::vector<double> values);

  int kh() const { return kh_; }
  int kw() const { return kw_; }
  int c() const { return c_; }

  std::size_t index(int ky, int kx, int z) const {
    return (static_cast<std::size_t>(ky) * kw_ + kx) * c_ + z;
  }
  double& operator()(int ky, int kx, int z) { return values_[index(ky, kx, z)]; }
  double operator()(int ky, int kx, int z) const {
    return values_[index(ky, kx, z)];
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  int kh_;
  int kw_;
  int c_;
  std::vector<double> values_;
};

struct ConvGeom {
  int stride_h = 1;
  int stride_w = 1;
  PadSpec pad{};
};

// Output dims for a depthwise conv with kernel kh x kw. Throws when strides
// are outside {1, 2} or the kernel does not fit the padded input.
Dims conv_output_dims(const Dims& input, int kh, int kw, const ConvGeom& g);

// Y[n,z,oy,ox] = sum_{ky,kx} w[ky,kx,z] * Xpad[n,z,oy*sh+ky,ox*sw+kx].
// Cross-correlation; planes run in parallel, each output element is summed in
// fixed (ky, kx) order so results do not depend on the thread count.
Tensor4 dw_forward(const Tensor4& x, const DepthwiseWeights& w,
                   const ConvGeom& g);

// Serial, unoptimized version of dw_forward that materializes the padded
// input. Oracle for the kernel above; keep it dumb.
Tensor4 naive_reference(const Tensor4& x, const DepthwiseWeights& w,
                        const ConvGeom& g);

// naive_reference that also counts every multiply-accumulate, including taps
// that land on zero padding.
Tensor4 naive_reference(const Tensor4& x, const DepthwiseWeights& w,
                        const ConvGeom& g, std::uint64_t& macs);

Tensor4 dw_backward_input(const Tensor4& grad_y, const DepthwiseWeights& w,
                          const ConvGeom& g, const Dims& input_dims);

DepthwiseWeights dw_backward_weights(const Tensor4& x, const Tensor4& grad_y,
                                     const ConvGeom& g, int kh, int kw);

}  // namespace xsepconv

#endif  // XSEPCONV_DWCONV_HPP_
