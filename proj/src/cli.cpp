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

#include "xsepconv/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "xsepconv/bench.hpp"
#include "xsepconv/cost_model.hpp"
#include "xsepconv/suites.hpp"
#include "xsepconv/toy_train.hpp"

namespace xsepconv {

namespace {

// Bad input from the user: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw UsageError("cannot write '" + path + "'");
}

// Sends `body` to --out when given, else to `out`. Returns the stream that
// should receive the human-readable summary so it never mixes into data.
std::ostream& emit(const std::string& path, const std::string& body,
                   std::ostream& out, std::ostream& err) {
  if (path.empty()) {
    out << body;
    return err;
  }
  write_file(path, body);
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double percent_saved(std::uint64_t base, std::uint64_t sub) {
  return base == 0 ? 0.0
                   : 100.0 * (static_cast<double>(base) - static_cast<double>(sub)) /
                         static_cast<double>(base);
}

struct Options {
  std::string config;
  std::string out_path;
  std::uint64_t seed = 0;
  std::string suite = "all";
  int k = 5;
  int k_min = 3;
  int k_max = 15;
  std::string dims = "1x64x56x56";
  int reps = kMinBenchReps;
  int warmup = kMinBenchWarmup;
  int epochs = 20;
  std::vector<std::string> variants;
  bool parallel = false;
};

BlockVariant single_variant(const Options& o, BlockVariant fallback) {
  if (o.variants.empty()) return fallback;
  if (o.variants.size() > 1) throw UsageError("--variant takes one name here");
  return variant_from_string(o.variants.front());
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
  const NetworkConfig cfg = parse_network_config(read_file(o.config));
  SubstitutionPolicy policy;
  policy.replacement = single_variant(o, BlockVariant::XSep);
  const NetworkAnalysis a = analyze_network(cfg, policy);
  std::ostream& log = emit(o.out_path, to_csv(a), out, err);
  log << "baseline:    " << a.baseline_macs << " MACs, " << a.baseline_params
      << " params\n"
      << "substituted: " << a.xsep_macs << " MACs, " << a.xsep_params
      << " params\n"
      << "savings:     " << fmt("%.2f", percent_saved(a.baseline_macs, a.xsep_macs))
      << "% MACs, "
      << fmt("%.2f", percent_saved(a.baseline_params, a.xsep_params))
      << "% params\n";
  if (cfg.reference) {
    const NetworkReference& r = *cfg.reference;
    const double scale = r.flops_convention == "flops" ? 2.0 : 1.0;
    auto dev = [](double got, double want) {
      return fmt("%+.2f%%", 100.0 * (got - want) / want);
    };
    log << "reference (" << r.flops_convention << "): baseline "
        << dev(scale * a.baseline_macs, r.baseline_flops) << ", substituted "
        << dev(scale * a.xsep_macs, r.substituted_flops) << "; params baseline "
        << dev(a.baseline_params, r.baseline_params) << ", substituted "
        << dev(a.xsep_params, r.substituted_params) << "\n";
  }
  return exit_code::kOk;
}

int cmd_ratios(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.k_min < 1 || o.k_min > o.k_max || o.k_max > 31) {
    throw UsageError("need 1 <= k-min <= k-max <= 31, got " +
                     std::to_string(o.k_min) + ".." + std::to_string(o.k_max));
  }
  std::ostringstream csv;
  csv << "k,ratio_basic,ratio_downsample,recommend_basic,recommend_downsample\n";
  for (int k = o.k_min; k <= o.k_max; ++k) {
    const Rational b = ratio_basic_exact(k);
    const Rational d = ratio_downsample_exact(k);
    csv << k << ',' << fmt("%.6f", b.value()) << ',' << fmt("%.6f", d.value())
        << ',' << (b.less_than_one() ? "true" : "false") << ','
        << (d.less_than_one() ? "true" : "false") << '\n';
  }
  emit(o.out_path, csv.str(), out, err);
  return exit_code::kOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto names = suite_names();
  if (o.suite != "all" &&
      std::find(names.begin(), names.end(), o.suite) == names.end()) {
    throw UsageError("unknown suite '" + o.suite + "'");
  }
  const auto results = run_suites(o.suite, o.seed);
  const std::string report = to_json(results, o.seed).dump(2) + "\n";
  out << report;
  if (!o.out_path.empty()) write_file(o.out_path, report);
  bool ok = true;
  for (const auto& r : results) {
    for (const auto& f : r.failures) err << "FAIL [" << r.name << "] " << f << "\n";
    ok = ok && r.passed;
  }
  return ok ? exit_code::kOk : exit_code::kFailure;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  BenchOptions b;
  b.k = o.k;
  b.dims = parse_dims(o.dims);
  b.reps = o.reps;
  b.warmup = o.warmup;
  b.parallel = o.parallel;
  b.seed = o.seed;
  if (!o.variants.empty()) {
    b.variants.clear();
    for (const auto& v : o.variants) b.variants.push_back(variant_from_string(v));
  }
  const BenchReport r = run_bench(b);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  std::ostream& log = emit(o.out_path, to_csv(r), out, err);
  log << "threads: " << r.threads << "\n";
  if (r.time_ratio) {
    log << "time ratio XSep/VanillaDW: " << fmt("%.4f", *r.time_ratio)
        << " (MAC ratio " << fmt("%.4f", *r.mac_ratio) << ", within 3x: "
        << (*r.consistent ? "yes" : "no") << ")\n";
  }
  return exit_code::kOk;
}

int cmd_train_toy(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.epochs < 1) throw UsageError("epochs must be >= 1");
  ToyOptions t;
  t.epochs = o.epochs;
  t.seed = o.seed;
  t.variant = single_variant(o, BlockVariant::XSep);
  const ToyReport r = train_toy(t);
  std::ostream& log = emit(o.out_path, to_csv(r), out, err);
  if (r.diverged) {
    err << "error: training diverged (non-finite loss)\n";
    return exit_code::kFailure;
  }
  const double first = r.epochs.front().train_loss;
  const double last = r.epochs.back().train_loss;
  log << "train loss " << fmt("%.6f", first) << " -> " << fmt("%.6f", last)
      << ", test accuracy " << fmt("%.4f", r.epochs.back().test_acc) << "\n";
  if (!r.improved()) {
    err << "error: final train loss did not drop below the initial loss\n";
    return exit_code::kFailure;
  }
  return exit_code::kOk;
}

int guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"XSepConv cost analysis, verification and benchmarking", "xsepconv"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "Per-layer MAC/param table for a network config");
  analyze->add_option("--config", o.config, "NetworkConfig JSON")->required();
  analyze->add_option("--out", o.out_path, "CSV output path (default stdout)");
  analyze->add_option("--variant", o.variants, "Replacement block (default XSep)");

  auto* ratios = app.add_subcommand("ratios", "Cost ratios against VanillaDW per kernel size");
  ratios->add_option("--k-min", o.k_min, "Smallest k")->capture_default_str();
  ratios->add_option("--k-max", o.k_max, "Largest k")->capture_default_str();
  ratios->add_option("--out", o.out_path, "CSV output path (default stdout)");

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite", o.suite, "all|cost|equiv|shift|grad|rf")->capture_default_str();
  verify->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  verify->add_option("--out", o.out_path, "Also write the JSON report here");

  auto* bench = app.add_subcommand("bench", "Time block forward passes");
  bench->add_option("--k", o.k, "Kernel size")->capture_default_str();
  bench->add_option("--dims", o.dims, "Input NxCxHxW")->capture_default_str();
  bench->add_option("--reps", o.reps, "Timed repetitions (>= 30)")->capture_default_str();
  bench->add_option("--warmup", o.warmup, "Untimed warmup runs (>= 5)")->capture_default_str();
  bench->add_option("--variant", o.variants, "Variants, comma separated (default VanillaDW,XSep)")
      ->delimiter(',');
  bench->add_flag("--parallel", o.parallel, "Run kernels channel-parallel");
  bench->add_option("--seed", o.seed, "Input data seed")->capture_default_str();
  bench->add_option("--out", o.out_path, "CSV output path (default stdout)");

  auto* train = app.add_subcommand("train-toy", "Train a 3-block classifier on oriented bars");
  train->add_option("--epochs", o.epochs, "Epochs (>= 1)")->capture_default_str();
  train->add_option("--seed", o.seed, "Data and init seed")->capture_default_str();
  train->add_option("--variant", o.variants, "Block variant (default XSep)");
  train->add_option("--out", o.out_path, "CSV output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  if (*analyze) return guarded([&] { return cmd_analyze(o, out, err); }, err);
  if (*ratios) return guarded([&] { return cmd_ratios(o, out, err); }, err);
  if (*verify) return guarded([&] { return cmd_verify(o, out, err); }, err);
  if (*bench) return guarded([&] { return cmd_bench(o, out, err); }, err);
  return guarded([&] { return cmd_train_toy(o, out, err); }, err);
}

}  // namespace xsepconv
