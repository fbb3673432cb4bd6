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

#ifndef XSEPCONV_SUITES_HPP_
#define XSEPCONV_SUITES_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace xsepconv {

// Outcome of one verification suite. `details` holds the measured margins;
// it contains no timings so output is reproducible for a fixed seed.
struct SuiteResult {
  explicit SuiteResult(std::string suite = {}) : name(std::move(suite)) {}

  std::string name;
  bool passed = true;
  std::vector<std::string> failures;
  nlohmann::json details = nlohmann::json::object();

  void fail(std::string what) {
    passed = false;
    failures.push_back(std::move(what));
  }
};

namespace tolerance {
inline constexpr double kEquivalence = 1e-10;
inline constexpr double kMisalignedMin = 1e-3;
inline constexpr double kGradIdentity = 1e-5;
inline constexpr double kGradHardSwish = 1e-4;
inline constexpr double kGradEps = 1e-5;
inline constexpr double kShiftBound = 1.0;
inline constexpr double kShiftAgreement = 0.25;
inline constexpr double kAdversarialSlack = 0.5;
}  // namespace tolerance

// Analytic MACs/params vs instrumented counts, every variant, k in {3,5,7},
// three random dim sets each.
SuiteResult run_cost_suite(std::uint64_t seed);

// Block vs effective kernel over 102 trials per k in {3,5,7}, rank-1
// No2x2 vs VanillaDW, and a misaligned-pad sensitivity check.
SuiteResult run_equiv_suite(std::uint64_t seed);

// Offset bound for N in 0..64, trace-vs-prediction for N <= 12 and random
// single-direction schedules, and the adversarial all-RightBottom reference.
SuiteResult run_shift_suite(std::uint64_t seed);

// Finite-difference checks of every backward pass plus the zeroed-tap
// mutation check.
SuiteResult run_grad_suite(std::uint64_t seed);

// Receptive-field support certificate for XSep and VanillaDW, k in {3,5,7}.
SuiteResult run_receptive_field_suite(std::uint64_t seed);

std::vector<std::string> suite_names();  // "cost", "equiv", "shift", "grad", "rf"

// Runs "all" or one named suite; throws std::invalid_argument otherwise.
std::vector<SuiteResult> run_suites(const std::string& which,
                                    std::uint64_t seed);

nlohmann::json to_json(const std::vector<SuiteResult>& results,
                       std::uint64_t seed);

}  // namespace xsepconv

#endif  // XSEPCONV_SUITES_HPP_
