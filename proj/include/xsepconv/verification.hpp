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

#ifndef XSEPCONV_VERIFICATION_HPP_
#define XSEPCONV_VERIFICATION_HPP_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "xsepconv/blocks.hpp"
#include "xsepconv/dwconv.hpp"
#include "xsepconv/layers.hpp"
#include "xsepconv/padding.hpp"
#include "xsepconv/tensor.hpp"

namespace xsepconv {

// Deterministic uniform draws shared by tests, oracles and tools.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

Tensor4 random_tensor(Dims dims, Rng& rng, double lo = -1.0, double hi = 1.0);
DepthwiseWeights random_weights(int kh, int kw, int c, Rng& rng);

// ---------------------------------------------------------------------------
// Finite-difference gradient checking

struct ParamGroup {
  std::string name;
  std::vector<double>* values;
};

// A differentiable map whose parameters can be perturbed in place.
class GradCheckTarget {
 public:
  virtual ~GradCheckTarget() = default;
  virtual Tensor4 forward() = 0;
  // Analytic gradient of <grad_out, forward()> for every group, in
  // parameters() order.
  virtual std::vector<std::vector<double>> backward(const Tensor4& grad_out) = 0;
  virtual std::vector<ParamGroup> parameters() = 0;
};

struct GroupError {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
};

struct GradCheckReport {
  std::vector<GroupError> groups;
  double epsilon = 0.0;
  double tolerance = 0.0;

  double max_rel_error() const;
  double max_abs_error() const;
  std::size_t checked() const;
  bool passed() const { return max_rel_error() < tolerance; }
};

// Central differences against target.backward(), scalarizing the output by a
// fixed random projection drawn from `seed`. Relative error uses
// max(|analytic|, |numeric|, 1e-4) as denominator so tiny gradients are
// compared absolutely. Throws std::domain_error on non-finite values.
GradCheckReport grad_check(GradCheckTarget& target, double eps, double tol,
                           std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

class DwConvTarget : public GradCheckTarget {
 public:
  DwConvTarget(Tensor4 x, DepthwiseWeights w, ConvGeom g);
  Tensor4 forward() override;
  std::vector<std::vector<double>> backward(const Tensor4& grad_out) override;
  std::vector<ParamGroup> parameters() override;

 private:
  std::vector<double> x_;
  Dims dims_;
  DepthwiseWeights w_;
  ConvGeom g_;
};

class BatchNormTarget : public GradCheckTarget {
 public:
  BatchNormTarget(Tensor4 x, BatchNormParams bn);
  Tensor4 forward() override;
  std::vector<std::vector<double>> backward(const Tensor4& grad_out) override;
  std::vector<ParamGroup> parameters() override;

 private:
  std::vector<double> x_;
  Dims dims_;
  BatchNormParams bn_;
};

class BlockTarget : public GradCheckTarget {
 public:
  BlockTarget(BlockSpec spec, BlockState state, Tensor4 x);
  Tensor4 forward() override;
  std::vector<std::vector<double>> backward(const Tensor4& grad_out) override;
  std::vector<ParamGroup> parameters() override;

  const BlockState& state() const { return state_; }
  Tensor4 input() const { return Tensor4(dims_, x_); }

 private:
  BlockSpec spec_;
  BlockState state_;
  std::vector<double> x_;
  Dims dims_;
};

// Wraps a target and zeroes one analytic gradient coordinate, simulating a
// backward pass that forgot a kernel tap.
class ZeroedTapTarget : public GradCheckTarget {
 public:
  ZeroedTapTarget(GradCheckTarget& inner, std::size_t group, std::size_t index)
      : inner_(inner), group_(group), index_(index) {}
  Tensor4 forward() override { return inner_.forward(); }
  std::vector<std::vector<double>> backward(const Tensor4& grad_out) override;
  std::vector<ParamGroup> parameters() override { return inner_.parameters(); }

 private:
  GradCheckTarget& inner_;
  std::size_t group_;
  std::size_t index_;
};

// Smallest distance from any pre-activation in the block to a kink of the
// activation (0 for ReLU, -3 and 3 for HardSwish). Infinite for Identity.
double kink_margin(const BlockState& state, const BlockSpec& spec,
                   const Tensor4& x);

// ---------------------------------------------------------------------------
// Linearized composition

// Linear configuration for effective-kernel checks: Identity activation,
// identity inference BN with epsilon 0.
void make_linear(BlockState& state, BlockSpec& spec);

// Max |block_forward - dw_forward(effective_kernel, geom)| over pixels at
// least `margin` away from every border.
double interior_deviation(const BlockState& state, const BlockSpec& spec,
                          const Tensor4& x, const ConvGeom& geom, int margin);

// Max interior deviation between the block and its effective kernel over
// `trials` random inputs (margin k+1, spatial size 3(k+1)).
double equivalence_check(const BlockSpec& spec, const BlockState& state,
                         int trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Shift tracing

struct ShiftTraceReport {
  std::vector<Centroid> per_layer;  // channel-averaged centroid after each layer
  double impulse_y = 0.0;
  double impulse_x = 0.0;
  double offset_y = 0.0;  // final centroid - impulse position
  double offset_x = 0.0;
  double predicted_y = 0.0;  // net_offset of the traced prefix
  double predicted_x = 0.0;
};

// Runs `layers` all-ones 2x2 SAME convolutions on a centered impulse in
// every channel, padding per schedule entry (GroupedOriginal entries use the
// four-group split). Throws std::runtime_error if the response reaches the
// border.
ShiftTraceReport shift_trace(const PaddingSchedule& schedule, int layers,
                             Dims input_dims);

// ---------------------------------------------------------------------------
// MAC counting

// Multiply-accumulates performed by naive_reference on this geometry,
// padding taps included.
std::uint64_t mac_count(const Tensor4& x, const DepthwiseWeights& w,
                        const ConvGeom& g);

// Sum of mac_count over every layer of a block on an h x w input.
std::uint64_t block_mac_count(const BlockSpec& spec, int h, int w);

}  // namespace xsepconv

#endif  // XSEPCONV_VERIFICATION_HPP_
