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

#include "xsepconv/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

namespace xsepconv {

Tensor4 random_tensor(Dims dims, Rng& rng, double lo, double hi) {
  Tensor4 t(dims);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

DepthwiseWeights random_weights(int kh, int kw, int c, Rng& rng) {
  DepthwiseWeights w(kh, kw, c);
  for (double& v : w.values()) v = rng.uniform(-1.0, 1.0);
  return w;
}

double GradCheckReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& g : groups) m = std::max(m, g.max_rel_error);
  return m;
}

double GradCheckReport::max_abs_error() const {
  double m = 0.0;
  for (const auto& g : groups) m = std::max(m, g.max_abs_error);
  return m;
}

std::size_t GradCheckReport::checked() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.checked;
  return n;
}

GradCheckReport grad_check(GradCheckTarget& target, double eps, double tol,
                           std::uint64_t seed) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw std::invalid_argument("grad_check: eps must lie in [1e-7, 1e-3]");
  }
  auto finite = [](double v, const char* what) {
    if (!std::isfinite(v)) {
      throw std::domain_error(std::string("grad_check: non-finite ") + what);
    }
  };
  const Tensor4 y0 = target.forward();
  Rng rng(seed);
  const Tensor4 projection = random_tensor(y0.dims(), rng);
  const auto analytic = target.backward(projection);
  auto params = target.parameters();
  if (analytic.size() != params.size()) {
    throw std::logic_error("grad_check: backward/parameters size mismatch");
  }

  GradCheckReport report;
  report.epsilon = eps;
  report.tolerance = tol;
  for (std::size_t g = 0; g < params.size(); ++g) {
    std::vector<double>& values = *params[g].values;
    if (analytic[g].size() != values.size()) {
      throw std::logic_error("grad_check: gradient size mismatch for " +
                             params[g].name);
    }
    GroupError err{params[g].name, 0.0, 0.0, 0};
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      const double hi = saved + eps, lo = saved - eps;  // representable step
      values[i] = hi;
      const double plus = dot(projection, target.forward());
      values[i] = lo;
      const double minus = dot(projection, target.forward());
      values[i] = saved;
      finite(plus, "loss");
      finite(minus, "loss");
      const double numeric = (plus - minus) / (hi - lo);
      const double a = analytic[g][i];
      finite(a, "analytic gradient");
      const double abs_err = std::abs(a - numeric);
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-4});
      err.max_abs_error = std::max(err.max_abs_error, abs_err);
      err.max_rel_error = std::max(err.max_rel_error, abs_err / denom);
      ++err.checked;
    }
    report.groups.push_back(err);
  }
  return report;
}

DwConvTarget::DwConvTarget(Tensor4 x, DepthwiseWeights w, ConvGeom g)
    : x_(x.values()), dims_(x.dims()), w_(std::move(w)), g_(g) {}

Tensor4 DwConvTarget::forward() {
  return dw_forward(Tensor4(dims_, x_), w_, g_);
}

std::vector<std::vector<double>> DwConvTarget::backward(const Tensor4& grad_out) {
  const Tensor4 x(dims_, x_);
  return {dw_backward_input(grad_out, w_, g_, dims_).values(),
          dw_backward_weights(x, grad_out, g_, w_.kh(), w_.kw()).values()};
}

std::vector<ParamGroup> DwConvTarget::parameters() {
  return {{"input", &x_}, {"weights", &w_.values()}};
}

BatchNormTarget::BatchNormTarget(Tensor4 x, BatchNormParams bn)
    : x_(x.values()), dims_(x.dims()), bn_(std::move(bn)) {}

Tensor4 BatchNormTarget::forward() {
  return bn_forward(bn_, Tensor4(dims_, x_)).output;
}

std::vector<std::vector<double>> BatchNormTarget::backward(
    const Tensor4& grad_out) {
  const BnForward f = bn_forward(bn_, Tensor4(dims_, x_));
  BnBackward b = bn_backward(bn_, f.cache, grad_out);
  return {b.grad_input.values(), std::move(b.grad_gamma),
          std::move(b.grad_beta)};
}

std::vector<ParamGroup> BatchNormTarget::parameters() {
  return {{"input", &x_}, {"gamma", &bn_.gamma}, {"beta", &bn_.beta}};
}

BlockTarget::BlockTarget(BlockSpec spec, BlockState state, Tensor4 x)
    : spec_(spec), state_(std::move(state)), x_(x.values()), dims_(x.dims()) {}

Tensor4 BlockTarget::forward() {
  return block_forward(state_, spec_, Tensor4(dims_, x_));
}

std::vector<std::vector<double>> BlockTarget::backward(const Tensor4& grad_out) {
  BlockBackward b = block_backward(state_, spec_, Tensor4(dims_, x_), grad_out);
  std::vector<std::vector<double>> out;
  out.push_back(b.grad_input.values());
  for (std::size_t i = 0; i < state_.weights.size(); ++i) {
    out.push_back(b.grads.weights[i].values());
    out.push_back(std::move(b.grads.gamma[i]));
    out.push_back(std::move(b.grads.beta[i]));
  }
  return out;
}

std::vector<ParamGroup> BlockTarget::parameters() {
  std::vector<ParamGroup> p{{"input", &x_}};
  for (std::size_t i = 0; i < state_.weights.size(); ++i) {
    const std::string s = std::to_string(i);
    p.push_back({"layer" + s + ".weights", &state_.weights[i].values()});
    p.push_back({"layer" + s + ".gamma", &state_.bn[i].gamma});
    p.push_back({"layer" + s + ".beta", &state_.bn[i].beta});
  }
  return p;
}

std::vector<std::vector<double>> ZeroedTapTarget::backward(
    const Tensor4& grad_out) {
  auto g = inner_.backward(grad_out);
  g.at(group_).at(index_) = 0.0;
  return g;
}

double kink_margin(const BlockState& state, const BlockSpec& spec,
                   const Tensor4& x) {
  if (spec.activation == Activation::Identity) {
    return std::numeric_limits<double>::infinity();
  }
  const BlockTrace trace = block_forward_trace(state, spec, x);
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& layer : trace.layers) {
    for (double v : layer.pre_activation.data()) {
      if (spec.activation == Activation::ReLU) {
        margin = std::min(margin, std::abs(v));
      } else {
        margin = std::min({margin, std::abs(v - 3.0), std::abs(v + 3.0)});
      }
    }
  }
  return margin;
}

void make_linear(BlockState& state, BlockSpec& spec) {
  spec.activation = Activation::Identity;
  for (auto& bn : state.bn) {
    bn = BatchNormParams::identity(bn.channels(), 0.0);
    bn.mode = BnMode::Inference;
  }
}

double interior_deviation(const BlockState& state, const BlockSpec& spec,
                          const Tensor4& x, const ConvGeom& geom, int margin) {
  const Tensor4 block = block_forward(state, spec, x);
  const Tensor4 direct = dw_forward(x, effective_kernel(state, spec), geom);
  if (!(block.dims() == direct.dims())) {
    throw std::logic_error("interior_deviation: output dims differ");
  }
  const Dims d = block.dims();
  if (d.h <= 2 * margin || d.w <= 2 * margin) {
    throw std::invalid_argument("interior_deviation: no interior pixels");
  }
  double m = 0.0;
  for (int n = 0; n < d.n; ++n) {
    for (int c = 0; c < d.c; ++c) {
      for (int y = margin; y < d.h - margin; ++y) {
        for (int xx = margin; xx < d.w - margin; ++xx) {
          m = std::max(m, std::abs(block(n, c, y, xx) - direct(n, c, y, xx)));
        }
      }
    }
  }
  return m;
}

double equivalence_check(const BlockSpec& spec, const BlockState& state,
                         int trials, std::uint64_t seed) {
  const ConvGeom geom = effective_geometry(spec);
  const int margin = spec.k + 1;
  const int size = 3 * (spec.k + 1);
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Tensor4 x = random_tensor(Dims{2, spec.c, size, size}, rng);
    worst = std::max(worst, interior_deviation(state, spec, x, geom, margin));
  }
  return worst;
}

namespace {

bool touches_border(const Tensor4& t) {
  const Dims d = t.dims();
  for (int c = 0; c < d.c; ++c) {
    for (int y = 0; y < d.h; ++y) {
      for (int x = 0; x < d.w; ++x) {
        const bool edge = y == 0 || x == 0 || y == d.h - 1 || x == d.w - 1;
        if (edge && t(0, c, y, x) != 0.0) return true;
      }
    }
  }
  return false;
}

}  // namespace

ShiftTraceReport shift_trace(const PaddingSchedule& schedule, int layers,
                             Dims input_dims) {
  if (layers < 0 || layers > schedule.n_even_layers()) {
    throw std::invalid_argument("shift_trace: layer count exceeds schedule");
  }
  input_dims.n = 1;
  validate(input_dims);
  if (input_dims.h < 2 * layers + 5 || input_dims.w < 2 * layers + 5) {
    throw std::invalid_argument("shift_trace: input too small for " +
                                std::to_string(layers) + " layers");
  }
  ShiftTraceReport report;
  const int cy = input_dims.h / 2, cx = input_dims.w / 2;
  report.impulse_y = cy;
  report.impulse_x = cx;

  Tensor4 act(input_dims);
  for (int c = 0; c < input_dims.c; ++c) act(0, c, cy, cx) = 1.0;
  DepthwiseWeights ones(2, 2, input_dims.c,
                        std::vector<double>(4 * input_dims.c, 1.0));

  PaddingSchedule traced;
  for (int i = 0; i < layers; ++i) {
    const PadAssignment& a = schedule.layers[i];
    traced.layers.push_back(a);
    if (a.is_grouped()) {
      act = dw_forward(grouped_original_pad(act).padded, ones,
                       ConvGeom{1, 1, PadSpec{}});
    } else {
      act = dw_forward(act, ones,
                       ConvGeom{1, 1, same_pad(2, 2, 1, 1, a.direction)});
    }
    if (touches_border(act)) {
      throw std::runtime_error("shift_trace: response reached the border at layer " +
                               std::to_string(i + 1));
    }
    Centroid mean{0.0, 0.0};
    for (int c = 0; c < input_dims.c; ++c) {
      const Centroid cc = centroid(act, c);
      mean.cy += cc.cy / input_dims.c;
      mean.cx += cc.cx / input_dims.c;
    }
    report.per_layer.push_back(mean);
  }
  const Centroid last =
      report.per_layer.empty() ? Centroid{report.impulse_y, report.impulse_x}
                               : report.per_layer.back();
  report.offset_y = last.cy - report.impulse_y;
  report.offset_x = last.cx - report.impulse_x;
  std::tie(report.predicted_y, report.predicted_x) = net_offset(traced);
  return report;
}

std::uint64_t mac_count(const Tensor4& x, const DepthwiseWeights& w,
                        const ConvGeom& g) {
  std::uint64_t macs = 0;
  naive_reference(x, w, g, macs);
  return macs;
}

std::uint64_t block_mac_count(const BlockSpec& spec, int h, int w) {
  const auto plan = layer_plan(spec);
  auto count_layer = [&spec](const LayerPlan& layer, const Tensor4& in,
                             std::uint64_t& total) {
    const DepthwiseWeights zero(layer.kh, layer.kw, spec.c);
    std::uint64_t macs = 0;
    Tensor4 out;
    if (layer.even() && layer.pad.is_grouped()) {
      out = naive_reference(grouped_original_pad(in).padded, zero,
                            ConvGeom{1, 1, PadSpec{}}, macs);
    } else {
      out = naive_reference(in, zero, layer_geometry(layer), macs);
    }
    total += macs;
    return out;
  };
  const Tensor4 x(Dims{1, spec.c, h, w});
  std::uint64_t total = 0;
  if (spec.variant == BlockVariant::XSepParallel) {
    count_layer(plan[0], x, total);
    count_layer(plan[2], count_layer(plan[1], x, total), total);
    return total;
  }
  Tensor4 cur = x;
  for (const auto& layer : plan) cur = count_layer(layer, cur, total);
  return total;
}

}  // namespace xsepconv
