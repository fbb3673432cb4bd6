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

#include "xsepconv/suites.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xsepconv/blocks.hpp"
#include "xsepconv/cost_model.hpp"
#include "xsepconv/serialization.hpp"
#include "xsepconv/verification.hpp"

namespace xsepconv {

using nlohmann::json;

namespace {

constexpr int kKernelSizes[] = {3, 5, 7};

BlockSpec spec_for(BlockVariant v, int k, int c) {
  BlockSpec s;
  s.variant = v;
  s.k = k;
  s.c = c;
  s.stride = v == BlockVariant::XSepDownsample ? Stride{2, 2} : Stride{1, 1};
  return s;
}

std::string label(const BlockSpec& s) {
  return std::string(to_string(s.variant)) + " k=" + std::to_string(s.k);
}

}  // namespace

SuiteResult run_cost_suite(std::uint64_t seed) {
  SuiteResult r{"cost"};
  Rng rng(seed);
  int cases = 0;
  std::vector<BlockVariant> variants = all_variants();
  for (BlockVariant v : variants) {
    for (int k : kKernelSizes) {
      for (int trial = 0; trial < 3; ++trial) {
        const int c = rng.integer(1, 8);
        const int h = rng.integer(k + 1, 40);
        const int w = rng.integer(k + 1, 40);
        BlockSpec spec = spec_for(v, k, c);
        const CostReport analytic =
            layer_cost(LayerConfig{"case", v, k, c, h, w, spec.stride});
        const std::uint64_t counted = block_mac_count(spec, h, w);
        const std::size_t params = conv_param_count(init_block(spec, seed));
        ++cases;
        const std::string where = label(spec) + " c=" + std::to_string(c) +
                                  " " + std::to_string(h) + "x" +
                                  std::to_string(w);
        if (analytic.macs != counted) {
          r.fail("macs " + where + ": analytic " + std::to_string(analytic.macs) +
                 " != counted " + std::to_string(counted));
        }
        if (analytic.params != params) {
          r.fail("params " + where + ": analytic " +
                 std::to_string(analytic.params) + " != actual " +
                 std::to_string(params));
        }
      }
      if (v == BlockVariant::XSep) {
        const CostReport x = layer_cost({"x", v, k, 4, 16, 16, {1, 1}});
        const Rational measured = Rational::of(static_cast<std::int64_t>(x.macs),
                                               static_cast<std::int64_t>(*x.baseline_macs));
        if (!(measured == ratio_basic_exact(k))) {
          r.fail("XSep/VanillaDW mac ratio differs from (4+2k)/k^2 at k=" +
                 std::to_string(k));
        }
      }
    }
  }
  r.details["cases"] = cases;
  r.details["mismatches"] = r.failures.size();
  return r;
}

SuiteResult run_equiv_suite(std::uint64_t seed) {
  SuiteResult r{"equiv"};
  Rng rng(seed);
  double worst = 0.0;
  int trials_run = 0;
  json per_k = json::object();
  for (int k : kKernelSizes) {
    double worst_k = 0.0;
    for (BlockVariant v : {BlockVariant::XSep, BlockVariant::XSepNo2x2,
                           BlockVariant::XSepBehind}) {
      for (int c : {1, 4}) {
        BlockSpec spec = spec_for(v, k, c);
        spec.pad = PadAssignment::single(
            static_cast<PadDirection>(rng.integer(0, 3)));
        // 100 trials per k, split across variants and channel counts.
        for (int t = 0; t < 17; ++t) {
          BlockState state = init_block(spec, rng.next());
          BlockSpec linear = spec;
          make_linear(state, linear);
          worst_k = std::max(worst_k, equivalence_check(linear, state, 1, rng.next()));
          ++trials_run;
        }
      }
    }
    per_k[std::to_string(k)] = worst_k;
    worst = std::max(worst, worst_k);
  }
  r.details["max_deviation"] = worst;
  r.details["max_deviation_per_k"] = per_k;
  r.details["trials"] = trials_run;
  if (!(worst < tolerance::kEquivalence)) {
    r.fail("composition deviation " + std::to_string(worst) + " >= 1e-10");
  }

  // Rank-1 factors of a k x k kernel reproduce VanillaDW exactly.
  double rank1 = 0.0;
  for (int k : kKernelSizes) {
    BlockSpec sep = spec_for(BlockVariant::XSepNo2x2, k, 3);
    BlockState state = init_block(sep, rng.next());
    make_linear(state, sep);
    BlockSpec van = spec_for(BlockVariant::VanillaDW, k, 3);
    BlockState vstate = init_block(van, 0);
    make_linear(vstate, van);
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        for (int z = 0; z < 3; ++z) {
          vstate.weights[0](ky, kx, z) =
              state.weights[1](ky, 0, z) * state.weights[0](0, kx, z);
        }
      }
    }
    const Tensor4 x = random_tensor(Dims{2, 3, 2 * k + 4, 2 * k + 4}, rng);
    const Tensor4 a = block_forward(state, sep, x);
    const Tensor4 b = block_forward(vstate, van, x);
    rank1 = std::max(rank1, max_abs_diff(a, b));
  }
  r.details["rank1_no2x2_vs_vanilla"] = rank1;
  if (!(rank1 < tolerance::kEquivalence)) {
    r.fail("rank-1 XSepNo2x2 deviates from VanillaDW by " + std::to_string(rank1));
  }

  // Aligning the effective kernel with the wrong pad must be visible.
  BlockSpec spec = spec_for(BlockVariant::XSep, 5, 2);
  spec.pad = PadAssignment::single(PadDirection::RightBottom);
  BlockState state = init_block(spec, rng.next());
  make_linear(state, spec);
  BlockSpec wrong = spec;
  wrong.pad = PadAssignment::single(PadDirection::LeftTop);
  const Tensor4 x = random_tensor(Dims{1, 2, 18, 18}, rng);
  const double misaligned =
      interior_deviation(state, spec, x, effective_geometry(wrong), spec.k + 1);
  r.details["misaligned_pad_deviation"] = misaligned;
  if (!(misaligned > tolerance::kMisalignedMin)) {
    r.fail("misaligned pad not detected (deviation " +
           std::to_string(misaligned) + ")");
  }
  return r;
}

SuiteResult run_shift_suite(std::uint64_t seed) {
  SuiteResult r{"shift"};
  double worst_offset = 0.0;
  for (int n = 0; n <= 64; ++n) {
    const auto [dy, dx] = net_offset(improved_schedule(n));
    worst_offset = std::max({worst_offset, std::abs(dy), std::abs(dx)});
    if (std::abs(dy) > tolerance::kShiftBound || std::abs(dx) > tolerance::kShiftBound) {
      r.fail("improved_schedule(" + std::to_string(n) + ") offset exceeds 1 px");
    }
  }
  r.details["max_predicted_offset_n0_64"] = worst_offset;

  const Dims dims{1, 4, 32, 32};
  double worst_gap = 0.0, worst_measured = 0.0;
  json improved = json::array();
  for (int n = 0; n <= 12; ++n) {
    const ShiftTraceReport t = shift_trace(improved_schedule(n), n, dims);
    const double gap = std::max(std::abs(t.offset_y - t.predicted_y),
                                std::abs(t.offset_x - t.predicted_x));
    worst_gap = std::max(worst_gap, gap);
    worst_measured =
        std::max({worst_measured, std::abs(t.offset_y), std::abs(t.offset_x)});
    improved.push_back({{"n", n}, {"offset", {t.offset_y, t.offset_x}},
                        {"predicted", {t.predicted_y, t.predicted_x}}});
  }
  Rng rng(seed);
  for (int trial = 0; trial < 32; ++trial) {
    PaddingSchedule s;
    const int n = rng.integer(1, 12);
    for (int i = 0; i < n; ++i) {
      s.layers.push_back(
          PadAssignment::single(static_cast<PadDirection>(rng.integer(0, 3))));
    }
    const ShiftTraceReport t = shift_trace(s, n, dims);
    worst_gap = std::max({worst_gap, std::abs(t.offset_y - t.predicted_y),
                          std::abs(t.offset_x - t.predicted_x)});
  }
  r.details["improved"] = improved;
  r.details["max_measured_offset_improved"] = worst_measured;
  r.details["max_trace_vs_prediction_gap"] = worst_gap;
  if (worst_measured > tolerance::kShiftBound) {
    r.fail("measured improved-schedule offset exceeds 1 px");
  }
  if (worst_gap > tolerance::kShiftAgreement) {
    r.fail("shift trace disagrees with net_offset by " + std::to_string(worst_gap));
  }

  // Reference that is expected to violate the bound.
  PaddingSchedule adversarial;
  adversarial.layers.assign(8, PadAssignment::single(PadDirection::RightBottom));
  const ShiftTraceReport a = shift_trace(adversarial, 8, dims);
  r.details["adversarial_all_rb_8"] = {
      {"offset", {a.offset_y, a.offset_x}},
      {"violates_bound", std::abs(a.offset_y) > 1.0 || std::abs(a.offset_x) > 1.0},
      {"expected", "fail"}};
  if (std::abs(a.offset_y + 4.0) > tolerance::kAdversarialSlack ||
      std::abs(a.offset_x + 4.0) > tolerance::kAdversarialSlack) {
    r.fail("adversarial schedule did not drift ~4 px toward left-top");
  }
  return r;
}

namespace {

// Random inference statistics on inner layers, batch statistics on the
// layers that end a branch (upstream gammas would be scale-invariant).
void randomize_bn(BlockState& state, const BlockSpec& spec, Rng& rng) {
  const std::size_t last = state.bn.size() - 1;
  for (std::size_t l = 0; l < state.bn.size(); ++l) {
    BatchNormParams& bn = state.bn[l];
    for (int z = 0; z < bn.channels(); ++z) {
      bn.gamma[z] = rng.uniform(0.5, 1.5);
      bn.beta[z] = rng.uniform(-0.5, 0.5);
      bn.running_mean[z] = rng.uniform(-0.2, 0.2);
      bn.running_var[z] = rng.uniform(0.5, 2.0);
    }
    const bool branch_end =
        l == last || (spec.variant == BlockVariant::XSepParallel && l == 0);
    bn.mode = branch_end ? BnMode::Train : BnMode::Inference;
  }
}

void record(SuiteResult& r, json& list, const std::string& name,
            const GradCheckReport& report) {
  json j = report;
  j["case"] = name;
  list.push_back(j);
  if (!report.passed()) {
    r.fail(name + ": max rel error " + std::to_string(report.max_rel_error()));
  }
}

}  // namespace

SuiteResult run_grad_suite(std::uint64_t seed) {
  using namespace tolerance;
  SuiteResult r{"grad"};
  json cases = json::array();
  Rng rng(seed);

  struct ConvCase {
    const char* name;
    Dims dims;
    int kh, kw;
    ConvGeom geom;
  };
  const ConvCase conv_cases[] = {
      {"dw 2x2 RB", {1, 2, 6, 6}, 2, 2, {1, 1, same_pad(2, 2, 1, 1, PadDirection::RightBottom)}},
      {"dw 2x2 LT", {2, 2, 5, 6}, 2, 2, {1, 1, same_pad(2, 2, 1, 1, PadDirection::LeftTop)}},
      {"dw 1x5 s(1,2)", {1, 3, 7, 8}, 1, 5, {1, 2, same_pad(1, 5, 1, 2)}},
      {"dw 5x1 s(2,1)", {2, 3, 7, 7}, 5, 1, {2, 1, same_pad(5, 1, 2, 1)}},
      {"dw 3x3 s2", {1, 2, 7, 6}, 3, 3, {2, 2, same_pad(3, 3, 2, 2)}},
      {"dw 5x5 same", {1, 2, 8, 8}, 5, 5, {1, 1, same_pad(5, 5, 1, 1)}},
  };
  for (const auto& c : conv_cases) {
    DwConvTarget t(random_tensor(c.dims, rng),
                   random_weights(c.kh, c.kw, c.dims.c, rng), c.geom);
    record(r, cases, c.name, grad_check(t, kGradEps, kGradIdentity, rng.next()));
  }

  for (BnMode mode : {BnMode::Train, BnMode::Inference}) {
    BatchNormParams bn = BatchNormParams::identity(3);
    bn.mode = mode;
    for (int z = 0; z < 3; ++z) {
      bn.gamma[z] = rng.uniform(0.5, 1.5);
      bn.beta[z] = rng.uniform(-0.5, 0.5);
      bn.running_mean[z] = rng.uniform(-0.2, 0.2);
      bn.running_var[z] = rng.uniform(0.5, 2.0);
    }
    BatchNormTarget t(random_tensor({4, 3, 3, 3}, rng), bn);
    record(r, cases, mode == BnMode::Train ? "bn train" : "bn inference",
           grad_check(t, kGradEps, kGradIdentity, rng.next()));
  }

  // Every block variant, Identity activation.
  for (BlockVariant v : all_variants()) {
    BlockSpec spec = spec_for(v, 3, 2);
    spec.activation = Activation::Identity;
    BlockState state = init_block(spec, rng.next());
    randomize_bn(state, spec, rng);
    const int size = v == BlockVariant::XSepDownsample ? 7 : 6;
    BlockTarget t(spec, state, random_tensor({2, 2, size, size}, rng));
    record(r, cases, "block " + std::string(to_string(v)) + " identity",
           grad_check(t, kGradEps, kGradIdentity, rng.next()));
  }
  {
    BlockSpec spec = spec_for(BlockVariant::XSep, 3, 4);
    spec.activation = Activation::Identity;
    spec.pad = PadAssignment::grouped();
    BlockState state = init_block(spec, rng.next());
    randomize_bn(state, spec, rng);
    BlockTarget t(spec, state, random_tensor({2, 4, 6, 6}, rng));
    record(r, cases, "block XSep grouped-pad identity",
           grad_check(t, kGradEps, kGradIdentity, rng.next()));
  }

  // HardSwish, inputs resampled until every pre-activation is off-kink.
  for (BlockVariant v : {BlockVariant::XSep, BlockVariant::XSepParallel}) {
    BlockSpec spec = spec_for(v, 3, 2);
    spec.activation = Activation::HardSwish;
    BlockState state = init_block(spec, rng.next());
    randomize_bn(state, spec, rng);
    Tensor4 x;
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      x = random_tensor({2, 2, 6, 6}, rng, -2.0, 2.0);
      found = kink_margin(state, spec, x) > 1e-3;
    }
    if (!found) {
      r.fail(std::string("no off-kink input found for ") + std::string(to_string(v)));
      continue;
    }
    BlockTarget t(spec, state, x);
    record(r, cases, "block " + std::string(to_string(v)) + " hardswish",
           grad_check(t, kGradEps, kGradHardSwish, rng.next()));
  }

  // Mutation: zeroing one weight-gradient tap must fail the check.
  {
    BlockSpec spec = spec_for(BlockVariant::XSep, 3, 2);
    spec.activation = Activation::Identity;
    BlockState state = init_block(spec, rng.next());
    BlockTarget inner(spec, state, random_tensor({1, 2, 6, 6}, rng));
    ZeroedTapTarget corrupted(inner, 1, 0);  // layer0.weights, tap (0,0,ch0)
    const GradCheckReport rep = grad_check(corrupted, kGradEps, kGradIdentity, rng.next());
    r.details["mutation_detected"] = !rep.passed();
    r.details["mutation_max_rel_error"] = rep.max_rel_error();
    if (rep.passed()) r.fail("zeroed-tap mutation not detected");
  }
  r.details["cases"] = cases;
  return r;
}

SuiteResult run_receptive_field_suite(std::uint64_t seed) {
  SuiteResult r{"rf"};
  Rng rng(seed);
  json cases = json::array();
  for (BlockVariant v : {BlockVariant::XSep, BlockVariant::VanillaDW}) {
    for (int k : kKernelSizes) {
      BlockSpec spec = spec_for(v, k, 2);
      BlockState state = init_block(spec, rng.next());
      make_linear(state, spec);
      const int size = 4 * (k + 1);
      const Tensor4 base = random_tensor({1, 2, size, size}, rng);
      Tensor4 bumped = base;
      const int py = size / 2, px = size / 2;
      bumped(0, 1, py, px) += 1.0;
      const Tensor4 y0 = block_forward(state, spec, base);
      const Tensor4 y1 = block_forward(state, spec, bumped);
      int min_y = size, max_y = -1, min_x = size, max_x = -1, count = 0;
      bool other_channel = false;
      for (int c = 0; c < 2; ++c) {
        for (int y = 0; y < size; ++y) {
          for (int x = 0; x < size; ++x) {
            if (y0(0, c, y, x) == y1(0, c, y, x)) continue;
            if (c != 1) {
              other_channel = true;
              continue;
            }
            ++count;
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
          }
        }
      }
      const int bh = max_y - min_y + 1, bw = max_x - min_x + 1;
      const ReceptiveField rf = receptive_field(spec);
      const int expected = v == BlockVariant::XSep ? k + 1 : k;
      cases.push_back({{"variant", to_string(v)},
                       {"k", k},
                       {"window", {bh, bw}},
                       {"affected", count},
                       {"receptive_field", {rf.h, rf.w}}});
      const std::string where = label(spec);
      if (other_channel) r.fail(where + ": perturbation leaked across channels");
      if (bh != expected || bw != expected || count != expected * expected) {
        r.fail(where + ": affected window " + std::to_string(bh) + "x" +
               std::to_string(bw) + " (" + std::to_string(count) +
               " px), expected " + std::to_string(expected) + "x" +
               std::to_string(expected));
      }
      if (rf.h != expected || rf.w != expected) {
        r.fail(where + ": receptive_field() disagrees with measurement");
      }
    }
  }
  r.details["cases"] = cases;
  return r;
}

std::vector<std::string> suite_names() {
  return {"cost", "equiv", "shift", "grad", "rf"};
}

std::vector<SuiteResult> run_suites(const std::string& which,
                                    std::uint64_t seed) {
  std::vector<SuiteResult> out;
  auto run = [&](const std::string& name) {
    if (name == "cost") return run_cost_suite(seed);
    if (name == "equiv") return run_equiv_suite(seed);
    if (name == "shift") return run_shift_suite(seed);
    if (name == "grad") return run_grad_suite(seed);
    if (name == "rf") return run_receptive_field_suite(seed);
    throw std::invalid_argument("unknown suite '" + name + "'");
  };
  if (which == "all") {
    for (const auto& name : suite_names()) out.push_back(run(name));
  } else {
    out.push_back(run(which));
  }
  return out;
}

json to_json(const std::vector<SuiteResult>& results, std::uint64_t seed) {
  json suites = json::object();
  bool all_passed = true;
  for (const auto& r : results) {
    suites[r.name] = {{"passed", r.passed},
                      {"failures", r.failures},
                      {"details", r.details}};
    all_passed = all_passed && r.passed;
  }
  return {{"seed", seed}, {"passed", all_passed}, {"suites", suites}};
}

}  // namespace xsepconv
