/*
 * Copyright 2026 The misocache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "misocache/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = misocache::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("compute prints exact values", "[cli]") {
  const auto r = run({"compute", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("T        19/12") != std::string::npos);
  CHECK(r.out.find("T_lb     1 (1) at s=2") != std::string::npos);
  CHECK(r.out.find("closed form 69/494") != std::string::npos);

  const auto j = run({"--format", "json", "compute", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["performance"]["exact"]["T"]["num"] == 19);
  CHECK(doc["performance"]["exact"]["T"]["den"] == 12);
  CHECK(doc["performance"]["regime"]["kind"] == "FirstBranch");

  const auto c = run({"--format", "csv", "compute", "--k", "4", "--n", "4", "--m", "2", "--alpha", "0"});
  REQUIRE(c.code == 0);
  CHECK(c.out.find("4,4,2,1/2,2,0,LargeGamma,,7/12,6/7,1/2,") != std::string::npos);
}

TEST_CASE("usage errors exit with 2", "[cli]") {
  CHECK(run({}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  auto r = run({"compute", "--k", "4", "--n", "3", "--m", "1", "--alpha", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("N < K") != std::string::npos);
  CHECK(run({"compute", "--k", "4", "--n", "8", "--m", "1", "--alpha", "2"}).code == 2);
  CHECK(run({"compute", "--k", "4", "--n", "8", "--m", "x", "--alpha", "0"}).code == 2);
  CHECK(run({"--format", "xml", "compute", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0"}).code == 2);
  CHECK(run({"sweep", "--k", "2..3", "--alpha", "0"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate reports success and file-size hints", "[cli]") {
  auto ok = run({"--seed", "7", "simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0", "--f", "8"});
  REQUIRE(ok.code == 0);
  CHECK(ok.out.find("SUCCESS") != std::string::npos);
  CHECK(ok.out.find("units    10") != std::string::npos);

  auto bad = run({"simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0", "--f", "100"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("least valid f is 8, next valid f is 104") != std::string::npos);

  auto hint = run({"simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0", "--suggest-f"});
  CHECK(hint.code == 0);
  CHECK(hint.out == "8\n");

  auto high = run({"simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "3/5", "--f", "8"});
  CHECK(high.code == 2);
  CHECK(high.err.find("12/25") != std::string::npos);

  auto dup = run({"simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0", "--f", "8", "--requests", "5,5,5,1"});
  CHECK(dup.code == 0);
  CHECK(dup.out.find("requests 5 5 5 1") != std::string::npos);
}

TEST_CASE("trace and --out write files atomically", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "misocache_cli_test";
  std::filesystem::create_directories(dir);
  const auto trace = dir / "trace.tsv";
  const auto report = dir / "report.json";
  auto r = run({"--format", "json", "--out", report.string(), "simulate", "--k", "3", "--n", "3", "--m", "1/3",
                "--alpha", "0", "--f", "9", "--trace", trace.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto doc = nlohmann::json::parse(slurp(report));
  CHECK(doc["success"] == true);
  const std::string t = slurp(trace);
  CHECK(t.rfind("# phase\ttag\tusers\tbits\toffset\n", 0) == 0);
  CHECK(t.find("1\tXorMulticast\t0,1\t1\t0\n") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep and audits", "[cli]") {
  auto s = run({"sweep", "--k", "2..3", "--n-mult", "1", "--m", "0", "--alpha", "0,1"});
  REQUIRE(s.code == 0);
  CHECK(s.out ==
        "K,N,M,gamma,Gamma,alpha,regime,eta,T,dof,T_lb,argmax_s,gap,delta\n"
        "2,2,0,0,0,0,FirstBranch,,3/2,2/3,3/2,2,1,0\n"
        "2,2,0,0,0,1,FullCsitBranch,,1,1,1,1,1,0\n"
        "3,3,0,0,0,0,FirstBranch,,11/6,6/11,11/6,3,1,0\n"
        "3,3,0,0,0,1,FullCsitBranch,,1,1,1,1,1,0\n");

  auto a = run({"gap-audit", "--k", "2..4", "--n-mult", "1", "--gamma-cum", "0,1", "--alpha", "0:0.5:1"});
  CHECK(a.code == 0);
  CHECK(a.out.find("PASS") != std::string::npos);
  auto tight = run({"gap-audit", "--k", "2..4", "--n-mult", "1", "--gamma-cum", "0,1", "--alpha", "0", "--bound", "1.1"});
  CHECK(tight.code == 1);

  auto d = run({"delta", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0,1/2,1"});
  CHECK(d.code == 0);
  CHECK(d.out.find("1/2,EtaBranch(1),") != std::string::npos);
  CHECK(d.out.find(",differ\n") != std::string::npos);
}

TEST_CASE("environment variables supply global options", "[cli]") {
  ::setenv("MISOCACHE_FORMAT", "csv", 1);
  auto r = run({"compute", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0"});
  ::unsetenv("MISOCACHE_FORMAT");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("K,N,M,", 0) == 0);

  ::setenv("MISOCACHE_SEED", "7", 1);
  auto a = run({"--format", "json", "simulate", "--k", "4", "--n", "8", "--m", "1", "--alpha", "0", "--f", "8"});
  ::unsetenv("MISOCACHE_SEED");
  REQUIRE(a.code == 0);
  CHECK(nlohmann::json::parse(a.out)["seed"] == 7);
}
