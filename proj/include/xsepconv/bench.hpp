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

#ifndef XSEPCONV_BENCH_HPP_
#define XSEPCONV_BENCH_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xsepconv/blocks.hpp"
#include "xsepconv/tensor.hpp"

namespace xsepconv {

inline constexpr int kMinBenchReps = 30;
inline constexpr int kMinBenchWarmup = 5;

struct BenchOptions {
  std::vector<BlockVariant> variants{BlockVariant::VanillaDW, BlockVariant::XSep};
  int k = 5;
  Dims dims{1, 64, 56, 56};
  int reps = kMinBenchReps;
  int warmup = kMinBenchWarmup;
  bool parallel = false;  // channel-parallel kernels; single thread otherwise
  std::uint64_t seed = 0;
};

struct BenchResult {
  BlockVariant variant = BlockVariant::VanillaDW;
  int k = 0;
  Dims dims{};
  double median_ns = 0.0;  // per forward pass
  std::uint64_t macs = 0;
  double gmacs_per_s = 0.0;
  int reps = 0;
  int warmup = 0;
};

struct BenchReport {
  std::vector<BenchResult> rows;
  std::vector<std::string> warnings;
  int threads = 1;
  // Filled when both XSep and VanillaDW were measured.
  std::optional<double> time_ratio;  // median XSep / median VanillaDW
  std::optional<double> mac_ratio;
  // time_ratio within 3x of mac_ratio in either direction.
  std::optional<bool> consistent;
};

// Median wall time of fn() in nanoseconds after `warmup` untimed calls.
double median_ns(const std::function<void()>& fn, int reps, int warmup);

// Removes repeated variants, keeping first occurrences, and reports each
// dropped duplicate in `warnings`.
std::vector<BlockVariant> dedupe_variants(const std::vector<BlockVariant>& in,
                                          std::vector<std::string>& warnings);

// Times block_forward for each variant on the same random input. Throws
// std::invalid_argument("reps below minimum") when reps < 30 and for
// warmup < 5 or an invalid block spec.
BenchReport run_bench(const BenchOptions& options);

// variant,k,dims,median_ns,macs,gmacs_per_s,reps,warmup
std::string to_csv(const BenchReport& report);

Dims parse_dims(const std::string& text);  // "NxCxHxW"
std::string format_dims(const Dims& d);

}  // namespace xsepconv

#endif  // XSEPCONV_BENCH_HPP_
