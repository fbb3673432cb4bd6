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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xsepconv/cli.hpp"

using namespace xsepconv;

namespace {

const std::string kConfigDir = XSEPCONV_CONFIG_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "xsepconv_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"ratios", "--k-min", "abc"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("ratios") {
  const Run r = cli({"ratios", "--k-min", "3", "--k-max", "9"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("k,ratio_basic,ratio_downsample,recommend_basic,recommend_downsample\n", 0) == 0);
  CHECK(r.out.find("\n5,0.560000,1.240000,true,false\n") != std::string::npos);
  CHECK(r.out.find("\n7,0.367347,0.755102,true,true\n") != std::string::npos);
  CHECK(r.out.find("\n3,1.111111,2.777778,false,false\n") != std::string::npos);
  CHECK(cli({"ratios", "--k-min", "5", "--k-max", "3"}).code == 2);
  CHECK(cli({"ratios", "--k-min", "0", "--k-max", "3"}).code == 2);
  CHECK(cli({"ratios", "--k-min", "3", "--k-max", "32"}).code == 2);
}

TEST_CASE("analyze") {
  SUBCASE("bundled network") {
    const auto out = scratch("mbv3.csv");
    const Run r = cli({"analyze", "--config", kConfigDir + "/mobilenetv3-small-cifar.json",
                       "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("17507328") != std::string::npos);
    CHECK(r.out.find("savings") != std::string::npos);
    CHECK(slurp(out).find("\nTOTAL,17507328,16707072,1528106,1502642,") != std::string::npos);
  }
  SUBCASE("missing file names the path") {
    const Run r = cli({"analyze", "--config", "/no/such/config.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("/no/such/config.json") != std::string::npos);
  }
  SUBCASE("malformed config reports the field") {
    const auto bad = scratch("bad.json");
    std::ofstream(bad) << R"({"input": [4, 8, 8], "layers": [{"name": "a", "kind": "dw", "c": 4}]})";
    const Run r = cli({"analyze", "--config", bad.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("config.layers[0].k") != std::string::npos);
  }
  SUBCASE("config flag is required") { CHECK(cli({"analyze"}).code == 2); }
}

TEST_CASE("verify") {
  const Run r = cli({"verify", "--suite", "equiv", "--seed", "7"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["passed"] == true);
  CHECK(j["seed"] == 7);
  CHECK(j["suites"]["equiv"]["details"]["max_deviation"].get<double>() < 1e-10);
  CHECK(r.out.find("\n  \"passed\"") != std::string::npos);  // pretty-printed
  CHECK(cli({"verify", "--suite", "speed"}).code == 2);
  const Run shift = cli({"verify", "--suite", "shift"});
  CHECK(shift.code == 0);
  const auto s = nlohmann::json::parse(shift.out)["suites"]["shift"]["details"];
  CHECK(s["adversarial_all_rb_8"]["expected"] == "fail");
  CHECK(s["adversarial_all_rb_8"]["violates_bound"] == true);
}

TEST_CASE("outputs are byte-identical across runs") {
  const std::vector<std::vector<std::string>> commands = {
      {"analyze", "--config", kConfigDir + "/mobilenetv3-small-cifar.json"},
      {"ratios", "--k-min", "1", "--k-max", "31"},
      {"verify", "--suite", "all", "--seed", "3"},
  };
  for (const auto& c : commands) {
    const Run a = cli(c), b = cli(c);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("bench") {
  SUBCASE("reps below minimum") {
    const Run r = cli({"bench", "--reps", "10"});
    CHECK(r.code == 2);
    CHECK(r.err.find("reps below minimum") != std::string::npos);
  }
  SUBCASE("duplicates are dropped with a warning") {
    const Run r = cli({"bench", "--k", "3", "--dims", "1x4x12x12", "--reps", "30",
                       "--variant", "VanillaDW,XSep,VanillaDW"});
    CHECK(r.code == 0);
    CHECK(r.err.find("warning: duplicate variant VanillaDW") != std::string::npos);
    CHECK(r.out.find("variant,k,dims,median_ns,macs,gmacs_per_s,reps,warmup\n") == 0);
    CHECK(r.out.find("\nVanillaDW,3,1x4x12x12,") != std::string::npos);
    CHECK(r.out.find("\nXSep,3,1x4x12x12,") != std::string::npos);
    CHECK(r.err.find("time ratio XSep/VanillaDW") != std::string::npos);
  }
  SUBCASE("bad dims") { CHECK(cli({"bench", "--dims", "1x4x12"}).code == 2); }
  SUBCASE("unknown variant") { CHECK(cli({"bench", "--variant", "Fancy"}).code == 2); }
}

TEST_CASE("train-toy arguments") {
  CHECK(cli({"train-toy", "--epochs", "0"}).code == 2);
  CHECK(cli({"train-toy", "--variant", "Nope"}).code == 2);
}

}
