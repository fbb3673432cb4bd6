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

#include "xsepconv/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace xsepconv {

std::string_view to_string(BlockVariant v) {
  switch (v) {
    case BlockVariant::VanillaDW: return "VanillaDW";
    case BlockVariant::XSep: return "XSep";
    case BlockVariant::XSepNo2x2: return "XSepNo2x2";
    case BlockVariant::XSepBehind: return "XSepBehind";
    case BlockVariant::XSepParallel: return "XSepParallel";
    case BlockVariant::XSepDownsample: return "XSepDownsample";
  }
  throw std::logic_error("unknown BlockVariant");
}

BlockVariant variant_from_string(std::string_view name) {
  for (BlockVariant v : all_variants()) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown block variant '" + std::string(name) +
                              "'");
}

std::vector<BlockVariant> all_variants() {
  return {BlockVariant::VanillaDW,    BlockVariant::XSep,
          BlockVariant::XSepNo2x2,    BlockVariant::XSepBehind,
          BlockVariant::XSepParallel, BlockVariant::XSepDownsample};
}

void validate(const BlockSpec& spec) {
  if (spec.k < 3 || spec.k % 2 == 0) {
    throw std::invalid_argument("block kernel size must be odd and >= 3, got " +
                                std::to_string(spec.k));
  }
  if (spec.c < 1) throw std::invalid_argument("block needs >= 1 channel");
  const bool unit = spec.stride == Stride{1, 1};
  const bool two = spec.stride == Stride{2, 2};
  switch (spec.variant) {
    case BlockVariant::VanillaDW:
      if (!unit && !two) {
        throw std::invalid_argument("VanillaDW stride must be (1,1) or (2,2)");
      }
      break;
    case BlockVariant::XSepDownsample:
      if (!two) {
        throw std::invalid_argument("XSepDownsample requires stride (2,2)");
      }
      break;
    default:
      if (!unit) {
        throw std::invalid_argument(std::string(to_string(spec.variant)) +
                                    " requires stride (1,1)");
      }
  }
}

bool downsample_recommended(int k) { return 16 + 3 * k < k * k; }

std::vector<LayerPlan> layer_plan(const BlockSpec& spec) {
  validate(spec);
  const int k = spec.k;
  const LayerPlan two{2, 2, 1, 1, spec.pad};
  const LayerPlan row{1, k, 1, 1, {}};
  const LayerPlan col{k, 1, 1, 1, {}};
  switch (spec.variant) {
    case BlockVariant::VanillaDW:
      return {LayerPlan{k, k, spec.stride.h, spec.stride.w, {}}};
    case BlockVariant::XSep: return {two, row, col};
    case BlockVariant::XSepNo2x2: return {row, col};
    case BlockVariant::XSepBehind: return {row, col, two};
    case BlockVariant::XSepParallel: return {two, row, col};
    case BlockVariant::XSepDownsample:
      return {two, LayerPlan{1, k, 1, 2, {}}, LayerPlan{k, 1, 2, 1, {}}};
  }
  throw std::logic_error("unknown BlockVariant");
}

ConvGeom layer_geometry(const LayerPlan& layer) {
  if (layer.even() && layer.pad.is_grouped()) {
    throw std::invalid_argument(
        "layer_geometry: grouped padding has no single geometry");
  }
  std::optional<PadDirection> dir;
  if (layer.even()) dir = layer.pad.direction;
  return {layer.stride_h, layer.stride_w,
          same_pad(layer.kh, layer.kw, layer.stride_h, layer.stride_w, dir)};
}

namespace {

bool grouped(const LayerPlan& layer) {
  return layer.even() && layer.pad.is_grouped();
}

void check_grouped_layer(const LayerPlan& layer) {
  if (layer.kh != 2 || layer.kw != 2 || layer.stride_h != 1 ||
      layer.stride_w != 1) {
    throw std::invalid_argument(
        "grouped padding is defined for 2x2 stride-1 layers only");
  }
}

const ConvGeom kValid{1, 1, PadSpec{}};

}  // namespace

Tensor4 conv_layer_forward(const Tensor4& x, const DepthwiseWeights& w,
                           const LayerPlan& layer) {
  if (w.kh() != layer.kh || w.kw() != layer.kw) {
    throw std::invalid_argument("conv layer: weight dims do not match plan");
  }
  if (grouped(layer)) {
    check_grouped_layer(layer);
    return dw_forward(grouped_original_pad(x).padded, w, kValid);
  }
  return dw_forward(x, w, layer_geometry(layer));
}

Tensor4 conv_layer_backward_input(const Tensor4& grad_y,
                                  const DepthwiseWeights& w,
                                  const LayerPlan& layer,
                                  const Dims& input_dims) {
  if (grouped(layer)) {
    check_grouped_layer(layer);
    const Dims padded{input_dims.n, input_dims.c, input_dims.h + 1,
                      input_dims.w + 1};
    return grouped_original_crop(dw_backward_input(grad_y, w, kValid, padded),
                                 channel_groups(input_dims.c));
  }
  return dw_backward_input(grad_y, w, layer_geometry(layer), input_dims);
}

DepthwiseWeights conv_layer_backward_weights(const Tensor4& x,
                                             const Tensor4& grad_y,
                                             const LayerPlan& layer) {
  if (grouped(layer)) {
    check_grouped_layer(layer);
    return dw_backward_weights(grouped_original_pad(x).padded, grad_y, kValid,
                               layer.kh, layer.kw);
  }
  return dw_backward_weights(x, grad_y, layer_geometry(layer), layer.kh,
                             layer.kw);
}

std::size_t conv_param_count(const BlockState& state) {
  std::size_t total = 0;
  for (const auto& w : state.weights) total += w.size();
  return total;
}

void set_bn_mode(BlockState& state, BnMode mode) {
  for (auto& bn : state.bn) bn.mode = mode;
}

BlockState init_block(const BlockSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Top 53 bits -> [0, 1); avoids distribution objects whose output is
  // library-specific.
  auto uniform01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  BlockState state;
  for (const LayerPlan& layer : layer_plan(spec)) {
    const double bound = std::sqrt(6.0 / (layer.kh * layer.kw));
    DepthwiseWeights w(layer.kh, layer.kw, spec.c);
    for (double& v : w.values()) v = (2.0 * uniform01() - 1.0) * bound;
    state.weights.push_back(std::move(w));
    state.bn.push_back(BatchNormParams::identity(spec.c));
  }
  return state;
}

namespace {

void check_state(const BlockState& state, const std::vector<LayerPlan>& plan,
                 int channels) {
  if (state.weights.size() != plan.size() || state.bn.size() != plan.size()) {
    throw std::invalid_argument("block state does not match variant layout");
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& w = state.weights[i];
    if (w.kh() != plan[i].kh || w.kw() != plan[i].kw || w.c() != channels ||
        state.bn[i].channels() != channels) {
      throw std::invalid_argument("block state layer " + std::to_string(i) +
                                  " has wrong shape");
    }
  }
}

Tensor4 run_layer(const BlockState& state, const LayerPlan& layer,
                  std::size_t i, Activation act, const Tensor4& in,
                  BlockTrace& trace) {
  LayerTrace lt;
  lt.input = in;
  lt.conv_out = conv_layer_forward(in, state.weights[i], layer);
  BnForward bnf = bn_forward(state.bn[i], lt.conv_out);
  lt.bn = std::move(bnf.cache);
  lt.pre_activation = std::move(bnf.output);
  trace.updated.bn[i] = std::move(bnf.updated);
  Tensor4 out = activation_forward(act, lt.pre_activation);
  trace.layers[i] = std::move(lt);
  return out;
}

// Returns grad w.r.t. the layer input; fills gradients for layer i.
Tensor4 back_layer(const BlockState& state, const LayerPlan& layer,
                   std::size_t i, Activation act, const LayerTrace& lt,
                   const Tensor4& grad_out, BlockGradients& grads) {
  const Tensor4 g_pre = activation_backward(act, lt.pre_activation, grad_out);
  BnBackward bnb = bn_backward(state.bn[i], lt.bn, g_pre);
  grads.gamma[i] = std::move(bnb.grad_gamma);
  grads.beta[i] = std::move(bnb.grad_beta);
  grads.weights[i] = conv_layer_backward_weights(lt.input, bnb.grad_input, layer);
  return conv_layer_backward_input(bnb.grad_input, state.weights[i], layer,
                                   lt.input.dims());
}

}  // namespace

namespace {

void check_block_input(const BlockState& state, const BlockSpec& spec,
                       const std::vector<LayerPlan>& plan, const Tensor4& x) {
  check_state(state, plan, spec.c);
  const Dims d = x.dims();
  if (d.c != spec.c) {
    throw std::invalid_argument("block input has " + std::to_string(d.c) +
                                " channels, block expects " +
                                std::to_string(spec.c));
  }
  if (d.h < spec.k + 1 || d.w < spec.k + 1) {
    throw std::invalid_argument("block input spatial dims must be >= k+1");
  }
}

Tensor4 fused_layer(const BlockState& state, const LayerPlan& layer,
                    std::size_t i, Activation act, const Tensor4& in) {
  Tensor4 y = conv_layer_forward(in, state.weights[i], layer);
  bn_activation_inplace(state.bn[i], act, y);
  return y;
}

}  // namespace

BlockTrace block_forward_trace(const BlockState& state, const BlockSpec& spec,
                               const Tensor4& x) {
  const auto plan = layer_plan(spec);
  check_block_input(state, spec, plan, x);
  BlockTrace trace;
  trace.layers.resize(plan.size());
  trace.updated = state;
  if (spec.variant == BlockVariant::XSepParallel) {
    Tensor4 a = run_layer(state, plan[0], 0, spec.activation, x, trace);
    Tensor4 b = run_layer(state, plan[1], 1, spec.activation, x, trace);
    b = run_layer(state, plan[2], 2, spec.activation, b, trace);
    trace.output = add(a, b);
    return trace;
  }
  Tensor4 cur = x;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    cur = run_layer(state, plan[i], i, spec.activation, cur, trace);
  }
  trace.output = std::move(cur);
  return trace;
}

Tensor4 block_forward(const BlockState& state, const BlockSpec& spec,
                      const Tensor4& x) {
  const auto plan = layer_plan(spec);
  check_block_input(state, spec, plan, x);
  if (spec.variant == BlockVariant::XSepParallel) {
    const Tensor4 a = fused_layer(state, plan[0], 0, spec.activation, x);
    Tensor4 b = fused_layer(state, plan[1], 1, spec.activation, x);
    b = fused_layer(state, plan[2], 2, spec.activation, b);
    return add(a, b);
  }
  Tensor4 cur = fused_layer(state, plan[0], 0, spec.activation, x);
  for (std::size_t i = 1; i < plan.size(); ++i) {
    cur = fused_layer(state, plan[i], i, spec.activation, cur);
  }
  return cur;
}

BlockBackward block_backward(const BlockState& state, const BlockSpec& spec,
                             const Tensor4& x, const Tensor4& grad_out) {
  const auto plan = layer_plan(spec);
  const BlockTrace trace = block_forward_trace(state, spec, x);
  if (!(grad_out.dims() == trace.output.dims())) {
    throw std::invalid_argument("block_backward: grad_out dims mismatch");
  }
  BlockBackward result;
  BlockGradients& grads = result.grads;
  grads.weights.resize(plan.size());
  grads.gamma.resize(plan.size());
  grads.beta.resize(plan.size());

  if (spec.variant == BlockVariant::XSepParallel) {
    const Tensor4 ga = back_layer(state, plan[0], 0, spec.activation,
                                  trace.layers[0], grad_out, grads);
    Tensor4 gb = back_layer(state, plan[2], 2, spec.activation,
                            trace.layers[2], grad_out, grads);
    gb = back_layer(state, plan[1], 1, spec.activation, trace.layers[1], gb,
                    grads);
    result.grad_input = add(ga, gb);
    return result;
  }
  Tensor4 g = grad_out;
  for (std::size_t i = plan.size(); i-- > 0;) {
    g = back_layer(state, plan[i], i, spec.activation, trace.layers[i], g,
                   grads);
  }
  result.grad_input = std::move(g);
  return result;
}

ReceptiveField receptive_field(const BlockSpec& spec) {
  auto compose = [](const std::vector<LayerPlan>& layers) {
    ReceptiveField rf;
    int jump_h = 1, jump_w = 1;
    for (const auto& l : layers) {
      rf.h += (l.kh - 1) * jump_h;
      rf.w += (l.kw - 1) * jump_w;
      jump_h *= l.stride_h;
      jump_w *= l.stride_w;
    }
    return rf;
  };
  const auto plan = layer_plan(spec);
  if (spec.variant == BlockVariant::XSepParallel) {
    const ReceptiveField a = compose({plan[0]});
    const ReceptiveField b = compose({plan[1], plan[2]});
    return {std::max(a.h, b.h), std::max(a.w, b.w)};
  }
  return compose(plan);
}

bool is_linear_configuration(const BlockState& state, const BlockSpec& spec) {
  if (spec.activation != Activation::Identity) return false;
  for (const auto& bn : state.bn) {
    if (bn.mode != BnMode::Inference) return false;
    for (std::size_t c = 0; c < bn.gamma.size(); ++c) {
      if (bn.running_mean[c] != 0.0 || bn.beta[c] != 0.0) return false;
    }
  }
  return true;
}

namespace {

void check_effective(const BlockSpec& spec) {
  switch (spec.variant) {
    case BlockVariant::XSep:
    case BlockVariant::XSepNo2x2:
    case BlockVariant::XSepBehind:
      break;
    default:
      throw std::invalid_argument(
          "effective kernel is defined for serial stride-1 variants only, got " +
          std::string(to_string(spec.variant)));
  }
  if (spec.variant != BlockVariant::XSepNo2x2 && spec.pad.is_grouped()) {
    throw std::invalid_argument(
        "effective kernel needs a single-direction 2x2 pad");
  }
}

}  // namespace

DepthwiseWeights effective_kernel(const BlockState& state,
                                  const BlockSpec& spec) {
  check_effective(spec);
  const auto plan = layer_plan(spec);
  check_state(state, plan, spec.c);
  if (!is_linear_configuration(state, spec)) {
    throw std::invalid_argument(
        "effective kernel requires Identity activation and zero-shift "
        "inference BN");
  }
  int eh = 1, ew = 1;
  for (const auto& l : plan) {
    eh += l.kh - 1;
    ew += l.kw - 1;
  }
  DepthwiseWeights eff(eh, ew, spec.c);
  std::vector<double> acc, next;
  for (int z = 0; z < spec.c; ++z) {
    int ah = 1, aw = 1;
    acc.assign(1, 1.0);
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const auto& w = state.weights[i];
      const auto& bn = state.bn[i];
      const double scale =
          bn.gamma[z] / std::sqrt(bn.running_var[z] + bn.epsilon);
      // Stacked cross-correlations compose as the full (unflipped)
      // convolution of their kernels.
      const int nh = ah + w.kh() - 1, nw = aw + w.kw() - 1;
      next.assign(static_cast<std::size_t>(nh) * nw, 0.0);
      for (int ay = 0; ay < ah; ++ay) {
        for (int ax = 0; ax < aw; ++ax) {
          const double a = acc[static_cast<std::size_t>(ay) * aw + ax];
          for (int ky = 0; ky < w.kh(); ++ky) {
            for (int kx = 0; kx < w.kw(); ++kx) {
              next[static_cast<std::size_t>(ay + ky) * nw + ax + kx] +=
                  a * scale * w(ky, kx, z);
            }
          }
        }
      }
      acc.swap(next);
      ah = nh;
      aw = nw;
    }
    for (int y = 0; y < eh; ++y) {
      for (int x = 0; x < ew; ++x) {
        eff(y, x, z) = acc[static_cast<std::size_t>(y) * ew + x];
      }
    }
  }
  return eff;
}

ConvGeom effective_geometry(const BlockSpec& spec) {
  check_effective(spec);
  ConvGeom g;
  for (const auto& l : layer_plan(spec)) {
    const PadSpec p = layer_geometry(l).pad;
    g.pad.top += p.top;
    g.pad.bottom += p.bottom;
    g.pad.left += p.left;
    g.pad.right += p.right;
  }
  return g;
}

}  // namespace xsepconv
