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

#include "xsepconv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "xsepconv/cost_model.hpp"
#include "xsepconv/parallel.hpp"
#include "xsepconv/verification.hpp"

namespace xsepconv {

double median_ns(const std::function<void()>& fn, int reps, int warmup) {
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<double> samples(static_cast<std::size_t>(reps));
  for (auto& s : samples) {
    const auto t0 = clock::now();
    fn();
    s = std::chrono::duration<double, std::nano>(clock::now() - t0).count();
  }
  const auto mid = samples.begin() + reps / 2;
  std::nth_element(samples.begin(), mid, samples.end());
  if (reps % 2 == 1) return std::max(*mid, 1.0);
  const double upper = *mid;
  const double lower = *std::max_element(samples.begin(), mid);
  return std::max(0.5 * (lower + upper), 1.0);
}

std::vector<BlockVariant> dedupe_variants(const std::vector<BlockVariant>& in,
                                          std::vector<std::string>& warnings) {
  std::vector<BlockVariant> out;
  for (BlockVariant v : in) {
    if (std::find(out.begin(), out.end(), v) != out.end()) {
      warnings.push_back("duplicate variant " + std::string(to_string(v)) +
                         " ignored");
      continue;
    }
    out.push_back(v);
  }
  return out;
}

BenchReport run_bench(const BenchOptions& o) {
  if (o.reps < kMinBenchReps) throw std::invalid_argument("reps below minimum");
  if (o.warmup < kMinBenchWarmup) throw std::invalid_argument("warmup below minimum");
  validate(o.dims);
  BenchReport report;
  const auto variants = dedupe_variants(o.variants, report.warnings);
  if (variants.empty()) throw std::invalid_argument("no variants to benchmark");

  parallel::ThreadScope scope(o.parallel ? parallel::max_threads() : 1);
  report.threads = parallel::max_threads();

  Rng rng(o.seed);
  const Tensor4 x = random_tensor(o.dims, rng);
  for (BlockVariant v : variants) {
    BlockSpec spec;
    spec.variant = v;
    spec.k = o.k;
    spec.c = o.dims.c;
    spec.stride = v == BlockVariant::XSepDownsample ? Stride{2, 2} : Stride{1, 1};
    validate(spec);
    const BlockState state = init_block(spec, o.seed);
    Tensor4 sink;
    const double ns = median_ns([&] { sink = block_forward(state, spec, x); },
                                o.reps, o.warmup);
    BenchResult r;
    r.variant = v;
    r.k = o.k;
    r.dims = o.dims;
    r.median_ns = ns;
    r.macs = layer_cost({"bench", v, o.k, o.dims.c, o.dims.h, o.dims.w, spec.stride}).macs *
             static_cast<std::uint64_t>(o.dims.n);
    r.gmacs_per_s = static_cast<double>(r.macs) / ns;
    r.reps = o.reps;
    r.warmup = o.warmup;
    report.rows.push_back(r);
  }

  auto find = [&](BlockVariant v) -> const BenchResult* {
    for (const auto& r : report.rows) {
      if (r.variant == v) return &r;
    }
    return nullptr;
  };
  const BenchResult* xsep = find(BlockVariant::XSep);
  const BenchResult* vanilla = find(BlockVariant::VanillaDW);
  if (xsep && vanilla) {
    report.time_ratio = xsep->median_ns / vanilla->median_ns;
    report.mac_ratio =
        static_cast<double>(xsep->macs) / static_cast<double>(vanilla->macs);
    const double q = *report.time_ratio / *report.mac_ratio;
    report.consistent = q <= 3.0 && q >= 1.0 / 3.0;
  }
  return report;
}

std::string to_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "variant,k,dims,median_ns,macs,gmacs_per_s,reps,warmup\n";
  char buf[64];
  for (const auto& r : report.rows) {
    out << to_string(r.variant) << ',' << r.k << ',' << format_dims(r.dims) << ',';
    std::snprintf(buf, sizeof buf, "%.1f", r.median_ns);
    out << buf << ',' << r.macs << ',';
    std::snprintf(buf, sizeof buf, "%.4f", r.gmacs_per_s);
    out << buf << ',' << r.reps << ',' << r.warmup << '\n';
  }
  return out.str();
}

Dims parse_dims(const std::string& text) {
  Dims d{};
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%dx%dx%dx%d%n", &d.n, &d.c, &d.h, &d.w,
                  &consumed) != 4 ||
      consumed != static_cast<int>(text.size())) {
    throw std::invalid_argument("dims must look like NxCxHxW, got '" + text + "'");
  }
  validate(d);
  return d;
}

std::string format_dims(const Dims& d) {
  return std::to_string(d.n) + "x" + std::to_string(d.c) + "x" +
         std::to_string(d.h) + "x" + std::to_string(d.w);
}

}  // namespace xsepconv
