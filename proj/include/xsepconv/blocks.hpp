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

#ifndef XSEPCONV_BLOCKS_HPP_
#define XSEPCONV_BLOCKS_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "xsepconv/dwconv.hpp"
#include "xsepconv/layers.hpp"
#include "xsepconv/padding.hpp"
#include "xsepconv/tensor.hpp"

namespace xsepconv {

enum class BlockVariant {
  VanillaDW,       // k x k
  XSep,            // 2x2 -> 1xk -> kx1
  XSepNo2x2,       // 1xk -> kx1
  XSepBehind,      // 1xk -> kx1 -> 2x2
  XSepParallel,    // 2x2 + (1xk -> kx1), summed
  XSepDownsample,  // 2x2 -> 1xk s(1,2) -> kx1 s(2,1)
};

std::string_view to_string(BlockVariant v);
BlockVariant variant_from_string(std::string_view name);
std::vector<BlockVariant> all_variants();

struct Stride {
  int h = 1;
  int w = 1;
  bool operator==(const Stride&) const = default;
};

struct BlockSpec {
  BlockVariant variant = BlockVariant::XSep;
  int k = 5;
  int c = 1;
  Stride stride{};
  Activation activation = Activation::HardSwish;
  // Padding of the 2x2 layer; taken from the network-wide schedule.
  PadAssignment pad = PadAssignment::single(PadDirection::RightBottom);
};

void validate(const BlockSpec& spec);

// XSepDownsample only pays off for k >= 7.
bool downsample_recommended(int k);

// One depthwise layer of a block. Even kernels take their padding from
// `pad`; odd ones pad symmetrically.
struct LayerPlan {
  int kh = 1;
  int kw = 1;
  int stride_h = 1;
  int stride_w = 1;
  PadAssignment pad{};

  bool even() const { return kh % 2 == 0 || kw % 2 == 0; }
};

std::vector<LayerPlan> layer_plan(const BlockSpec& spec);

// Geometry for a non-grouped layer.
ConvGeom layer_geometry(const LayerPlan& layer);

Tensor4 conv_layer_forward(const Tensor4& x, const DepthwiseWeights& w,
                           const LayerPlan& layer);
Tensor4 conv_layer_backward_input(const Tensor4& grad_y,
                                  const DepthwiseWeights& w,
                                  const LayerPlan& layer,
                                  const Dims& input_dims);
DepthwiseWeights conv_layer_backward_weights(const Tensor4& x,
                                             const Tensor4& grad_y,
                                             const LayerPlan& layer);

// Weights and BN parameters in layer_plan order.
struct BlockState {
  std::vector<DepthwiseWeights> weights;
  std::vector<BatchNormParams> bn;
};

std::size_t conv_param_count(const BlockState& state);
void set_bn_mode(BlockState& state, BnMode mode);

// Weights ~ U(-b, b), b = sqrt(6 / (kh*kw)); BN starts as identity in
// inference mode. Bit-identical for equal seeds.
BlockState init_block(const BlockSpec& spec, std::uint64_t seed);

struct LayerTrace {
  Tensor4 input;
  Tensor4 conv_out;
  BnCache bn;
  Tensor4 pre_activation;
};

struct BlockTrace {
  Tensor4 output;
  std::vector<LayerTrace> layers;
  BlockState updated;  // running BN statistics after a train-mode pass
};

BlockTrace block_forward_trace(const BlockState& state, const BlockSpec& spec,
                               const Tensor4& x);

Tensor4 block_forward(const BlockState& state, const BlockSpec& spec,
                      const Tensor4& x);

struct BlockGradients {
  std::vector<DepthwiseWeights> weights;
  std::vector<std::vector<double>> gamma;
  std::vector<std::vector<double>> beta;
};

struct BlockBackward {
  Tensor4 grad_input;
  BlockGradients grads;
};

BlockBackward block_backward(const BlockState& state, const BlockSpec& spec,
                             const Tensor4& x, const Tensor4& grad_out);

struct ReceptiveField {
  int h = 1;
  int w = 1;
  bool operator==(const ReceptiveField&) const = default;
};

// Input window seen by one output pixel, composed layer by layer with
// strides; parallel branches take the larger support.
ReceptiveField receptive_field(const BlockSpec& spec);

// True when the block is a linear map of its input: Identity activation and
// inference BN with zero mean and zero shift on every layer.
bool is_linear_configuration(const BlockState& state, const BlockSpec& spec);

// Single depthwise kernel equal to the serial layer composition (BN scales
// folded in). Requires XSep, XSepNo2x2 or XSepBehind with a single-direction
// 2x2 pad and a linear configuration.
DepthwiseWeights effective_kernel(const BlockState& state,
                                  const BlockSpec& spec);

// Padding that aligns effective_kernel with block_forward: per-side sums of
// the layer pads.
ConvGeom effective_geometry(const BlockSpec& spec);

}  // namespace xsepconv

#endif  // XSEPCONV_BLOCKS_HPP_
