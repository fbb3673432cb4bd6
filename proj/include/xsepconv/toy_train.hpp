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

#ifndef XSEPCONV_TOY_TRAIN_HPP_
#define XSEPCONV_TOY_TRAIN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "xsepconv/blocks.hpp"
#include "xsepconv/tensor.hpp"

namespace xsepconv {

// Synthetic orientation task: 16x16 single-channel images, each holding one
// bar. Labels: 0 horizontal, 1 vertical, 2 diagonal (either slope).
struct ToyDataset {
  Tensor4 images;  // n x 1 x 16 x 16
  std::vector<int> labels;
};

ToyDataset make_toy_dataset(int samples, std::uint64_t seed);

struct ToyOptions {
  int epochs = 20;
  std::uint64_t seed = 0;
  BlockVariant variant = BlockVariant::XSep;
  int k = 3;
  int channels = 8;
  int batch = 32;
  double learning_rate = 0.05;
  int train_samples = 512;
  int test_samples = 256;
};

struct EpochMetrics {
  int epoch = 0;  // 0 = before training
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
};

struct ToyReport {
  std::vector<EpochMetrics> epochs;
  bool diverged = false;

  bool improved() const {
    return !diverged && epochs.size() > 1 &&
           epochs.back().train_loss < epochs.front().train_loss;
  }
};

// Three blocks of `variant` (HardSwish, train-mode BN, 2x2 pads from the
// improved schedule), global average pooling and a linear head trained with
// plain SGD on softmax cross-entropy. Metrics use batch statistics over the
// whole split. Throws std::invalid_argument for epochs < 1.
ToyReport train_toy(const ToyOptions& options);

// epoch,train_loss,train_acc,test_loss,test_acc
std::string to_csv(const ToyReport& report);

}  // namespace xsepconv

#endif  // XSEPCONV_TOY_TRAIN_HPP_
