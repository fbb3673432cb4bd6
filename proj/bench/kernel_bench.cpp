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

// Serial oracle vs the OpenMP depthwise kernel on the layer shapes that make
// up the blocks. Prints one CSV row per (shape, implementation).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "xsepconv/bench.hpp"
#include "xsepconv/dwconv.hpp"
#include "xsepconv/padding.hpp"
#include "xsepconv/parallel.hpp"
#include "xsepconv/verification.hpp"

namespace {

struct Shape {
  const char* name;
  int kh, kw, sh, sw;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace xsepconv;
  CLI::App app{"Depthwise kernel benchmark: naive_reference vs dw_forward"};
  std::string dims_text = "1x64x56x56";
  int reps = kMinBenchReps;
  int warmup = kMinBenchWarmup;
  app.add_option("--dims", dims_text, "Input NxCxHxW")->capture_default_str();
  app.add_option("--reps", reps, "Timed repetitions")->check(CLI::Range(kMinBenchReps, 100000));
  app.add_option("--warmup", warmup, "Warmup runs")->check(CLI::Range(kMinBenchWarmup, 1000));
  CLI11_PARSE(app, argc, argv);

  Dims dims;
  try {
    dims = parse_dims(dims_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const Shape shapes[] = {
      {"5x5", 5, 5, 1, 1},  {"2x2", 2, 2, 1, 1},   {"1x5", 1, 5, 1, 1},
      {"5x1", 5, 1, 1, 1},  {"1x5s12", 1, 5, 1, 2}, {"3x3s2", 3, 3, 2, 2},
  };
  Rng rng(0);
  const Tensor4 x = random_tensor(dims, rng);
  const int threads = parallel::max_threads();
  std::printf("shape,impl,threads,median_ns,macs,gmacs_per_s,max_abs_diff\n");
  int status = 0;
  for (const Shape& s : shapes) {
    const DepthwiseWeights w = random_weights(s.kh, s.kw, dims.c, rng);
    const ConvGeom g{s.sh, s.sw,
                     same_pad(s.kh, s.kw, s.sh, s.sw, PadDirection::RightBottom)};
    std::uint64_t macs = 0;
    const Tensor4 ref = naive_reference(x, w, g, macs);
    auto row = [&](const char* impl, int nthreads, double ns, double diff) {
      std::printf("%s,%s,%d,%.1f,%llu,%.4f,%.3g\n", s.name, impl, nthreads, ns,
                  static_cast<unsigned long long>(macs),
                  static_cast<double>(macs) / ns, diff);
    };
    Tensor4 sink;
    row("naive_reference", 1,
        median_ns([&] { sink = naive_reference(x, w, g); }, reps, warmup), 0.0);
    for (int t : {1, threads}) {
      parallel::ThreadScope scope(t);
      Tensor4 y = dw_forward(x, w, g);
      const double diff = max_abs_diff(y, ref);
      if (diff > 1e-12) status = 1;
      row("dw_forward", t, median_ns([&] { sink = dw_forward(x, w, g); }, reps, warmup),
          diff);
      if (threads == 1) break;
    }
  }
  return status;
}
