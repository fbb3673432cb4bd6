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

#ifndef XSEPCONV_LAYERS_HPP_
#define XSEPCONV_LAYERS_HPP_

#include <string_view>
#include <vector>

#include "xsepconv/tensor.hpp"

namespace xsepconv {

enum class Activation { ReLU, HardSwish, Identity };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

// relu(x) = max(0, x); hardswish(x) = x * clamp(x + 3, 0, 6) / 6.
double activate(Activation a, double x);
double activate_derivative(Activation a, double x);

Tensor4 activation_forward(Activation a, const Tensor4& x);
// grad_out * f'(pre), elementwise.
Tensor4 activation_backward(Activation a, const Tensor4& pre,
                            const Tensor4& grad_out);

enum class BnMode { Train, Inference };

struct BatchNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double epsilon = 1e-5;
  double momentum = 0.1;
  BnMode mode = BnMode::Inference;

  // gamma=1, beta=0, mean=0, var=1.
  static BatchNormParams identity(int channels, double epsilon = 1e-5);

  int channels() const { return static_cast<int>(gamma.size()); }
};

void validate(const BatchNormParams& bn);

// Intermediates needed by bn_backward.
struct BnCache {
  Tensor4 normalized;             // (x - mean) / sqrt(var + eps)
  std::vector<double> inv_std;    // per channel
};

struct BnForward {
  Tensor4 output;
  BnCache cache;
  BatchNormParams updated;  // running statistics after this batch
};

// Train mode normalizes with biased batch statistics and folds the unbiased
// batch variance into the running estimate; inference mode uses the running
// statistics and leaves them untouched.
BnForward bn_forward(const BatchNormParams& bn, const Tensor4& x);

// bn_forward followed by activation_forward without the cache or running
// statistics update. Same arithmetic, so results match bit for bit.
void bn_activation_inplace(const BatchNormParams& bn, Activation a, Tensor4& x);

struct BnBackward {
  Tensor4 grad_input;
  std::vector<double> grad_gamma;
  std::vector<double> grad_beta;
};

BnBackward bn_backward(const BatchNormParams& bn, const BnCache& cache,
                       const Tensor4& grad_out);

}  // namespace xsepconv

#endif  // XSEPCONV_LAYERS_HPP_
