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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "xsepconv/cli.hpp"
#include "xsepconv/cost_model.hpp"
#include "xsepconv/suites.hpp"

using namespace xsepconv;

namespace {

const std::string kConfigDir = XSEPCONV_CONFIG_DIR;
constexpr std::uint64_t kSeed = 0;

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str()};
}

Outcome from_suite(const SuiteResult& r, const std::string& detail) {
  Outcome o{r.passed, detail};
  for (const auto& f : r.failures) o.detail += "; " + f;
  return o;
}

std::string num(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool within(double got, double want, double tol) {
  return std::abs(got - want) <= tol * want;
}

Outcome cost_ratios() {
  const bool ok = ratio_basic_exact(5) == Rational{14, 25} && ratio_basic(5) == 0.56 &&
                  ratio_downsample_exact(7) == Rational{37, 49} &&
                  ratio_downsample_exact(5) == Rational{31, 25} &&
                  !ratio_downsample_exact(5).less_than_one() &&
                  ratio_downsample_exact(7).less_than_one();
  return {ok, "basic(5)=14/25, downsample(5)=31/25, downsample(7)=37/49"};
}

Outcome flop_oracle() {
  const SuiteResult r = run_cost_suite(kSeed);
  return from_suite(r, r.details["cases"].dump() + " cases, " +
                           r.details["mismatches"].dump() + " mismatches");
}

Outcome composition() {
  const SuiteResult r = run_equiv_suite(kSeed);
  return from_suite(r, "max interior deviation " +
                           num(r.details["max_deviation"].get<double>()) + " over " +
                           r.details["trials"].dump() + " trials");
}

Outcome receptive() {
  return from_suite(run_receptive_field_suite(kSeed),
                    "XSep (k+1)^2 and VanillaDW k^2 windows for k in {3,5,7}");
}

Outcome schedule_bound() {
  const SuiteResult r = run_shift_suite(kSeed);
  const auto& adv = r.details["adversarial_all_rb_8"]["offset"];
  return from_suite(r, "max |offset| " +
                           num(r.details["max_measured_offset_improved"].get<double>()) +
                           ", trace gap " +
                           num(r.details["max_trace_vs_prediction_gap"].get<double>()) +
                           ", all-RB x8 offset (" + num(adv[0].get<double>()) + ", " +
                           num(adv[1].get<double>()) + ")");
}

Outcome gradients() {
  const SuiteResult r = run_grad_suite(kSeed);
  double worst = 0.0;
  for (const auto& c : r.details["cases"]) worst = std::max(worst, c["max_rel_error"].get<double>());
  Outcome o = from_suite(r, "worst rel error " + num(worst) + " over " +
                                std::to_string(r.details["cases"].size()) +
                                " cases, mutation detected: " +
                                r.details["mutation_detected"].dump());
  o.ok = o.ok && r.details["mutation_detected"] == true;
  return o;
}

Outcome table_accounting() {
  const std::string path = kConfigDir + "/mobilenetv3-small-cifar.json";
  const NetworkAnalysis a = analyze_network(load_network_config(path));
  const double bm = static_cast<double>(a.baseline_macs), sm = static_cast<double>(a.xsep_macs);
  const double bp = static_cast<double>(a.baseline_params), sp = static_cast<double>(a.xsep_params);
  const bool ok = within(bm, 17.51e6, 0.10) && within(sm, 16.71e6, 0.10) &&
                  within(bp, 1.52e6, 0.10) && within(sp, 1.50e6, 0.10) && sm < bm &&
                  sp < bp && cli({"analyze", "--config", path}).code == 0;
  return {ok, "MACs " + num(bm / 1e6, "%.3f") + "M -> " + num(sm / 1e6, "%.3f") +
                  "M, params " + num(bp / 1e6, "%.3f") + "M -> " + num(sp / 1e6, "%.3f") + "M"};
}

// Accuracy tables need full training runs; the toy loss curve stands in.
Outcome toy_training() {
  const std::vector<std::string> args = {"train-toy", "--epochs", "20", "--seed", "0"};
  const CliRun a = cli(args);
  const CliRun b = cli(args);
  std::istringstream lines(a.out);
  std::string line, first, last;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (first.empty()) first = line;
    last = line;
  }
  auto loss = [](const std::string& row) {
    return row.empty() ? NAN : std::stod(row.substr(row.find(',') + 1));
  };
  const double l0 = loss(first), l1 = loss(last);
  return {a.code == 0 && a.out == b.out && l1 < l0,
          "train loss " + num(l0) + " -> " + num(l1) +
              (a.out == b.out ? ", repeat run identical" : ", repeat run differs")};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"analyze", "--config", kConfigDir + "/mobilenetv3-small-cifar.json"},
      {"analyze", "--config", kConfigDir + "/toy-two-layer.json"},
      {"ratios", "--k-min", "1", "--k-max", "31"},
      {"verify", "--suite", "all", "--seed", "11"},
  };
  bool ok = true;
  for (const auto& c : commands) {
    const CliRun a = cli(c), b = cli(c);
    ok = ok && a.code == 0 && a.out == b.out;
  }
  return {ok, std::to_string(commands.size()) + " commands run twice, outputs compared byte for byte"};
}

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "cost-ratio reproduction", 1.0, cost_ratios},
      {2, "oracle FLOP equivalence", 30.0, flop_oracle},
      {3, "linearized composition", 60.0, composition},
      {4, "receptive field support", 10.0, receptive},
      {5, "padding-schedule bound", 60.0, schedule_bound},
      {6, "gradient correctness", 120.0, gradients},
      {7, "network cost accounting", 5.0, table_accounting},
      {8, "toy training loss decrease", 120.0, toy_training},
      {9, "determinism", 60.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.ok = false;
      o.detail += "; exceeded " + num(c.budget_s) + " s budget";
    }
    failed += !o.ok;
    std::printf("%s [%d] %s (%.2f s): %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
