// Copyright 2026 The cohdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace cohdist::cli {
namespace {

namespace fs = std::filesystem;

const std::string kData = COHDIST_TEST_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cohdist");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("cohdist_test_" + std::to_string(::getpid()) + "_" + name);
}

nlohmann::json run_json(std::vector<std::string> args) {
  args.push_back("--json");
  const Result r = run_cli(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return nlohmann::json::parse(r.out);
}

TEST(CliFidelityTest, Anchors) {
  auto j = run_json({"fidelity", data("maximally_mixed_qubit.json"), "--m", "2"});
  EXPECT_NEAR(j["rows"][0]["fidelity_bound"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["rows"][0]["fidelity_sdp"].get<double>(), 1.0, 1e-8);
  j = run_json({"fidelity", data("diag_075.json"), "--m", "2"});
  EXPECT_NEAR(j["rows"][0]["fidelity_bound"].get<double>(), 0.9330127018922193, 1e-12);
  j = run_json({"fidelity", data("psi3.json"), "--m", "3"});
  EXPECT_NEAR(j["rows"][0]["fidelity_bound"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(j["rows"][0]["exact"].get<bool>());
}

TEST(CliFidelityTest, TableUsesSixDigits) {
  const Result r = run_cli({"fidelity", data("diag_075.json"), "--m", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.933013"), std::string::npos);
}

TEST(CliFidelityTest, CopiesAndLists) {
  auto j = run_json({"fidelity", data("diag_06.json"), "--m", "2,4", "--copies", "1,3"});
  ASSERT_EQ(j["rows"].size(), 4u);
  EXPECT_EQ(j["rows"][3]["dim"].get<int>(), 8);
  EXPECT_TRUE(j["rows"][3]["exact"].get<bool>());
  j = run_json({"fidelity", data("diag_06_squared.json"), "--m", "2"});
  EXPECT_TRUE(j["rows"][0]["exact"].get<bool>());
  j = run_json({"fidelity", data("diag4.json"), "--m", "2"});
  EXPECT_FALSE(j["rows"][0]["exact"].get<bool>());
}

TEST(CliRateTest, Anchors) {
  auto j = run_json({"rate", data("plus.json"), "--eps", "0"});
  EXPECT_EQ(j["rows"][0]["one_shot_rate_bits"].get<double>(), 1.0);
  j = run_json({"rate", data("diag_06.json"), "--copies", "3", "--eps", "0"});
  EXPECT_EQ(j["rows"][0]["one_shot_rate_bits"].get<double>(), 2.0);
  EXPECT_NEAR(j["rows"][0]["asymptotic_zero_error_bits_per_copy"].get<double>(), 0.7369655941662062, 1e-9);
  const Result r = run_cli({"rate", data("diag_06.json")});
  EXPECT_NE(r.out.find("0.736966 bits/copy"), std::string::npos);
}

TEST(CliDecomposeTest, Outputs) {
  auto j = run_json({"decompose", data("maximally_mixed_qubit.json")});
  EXPECT_EQ(j["atoms"].size(), 2u);
  j = run_json({"decompose", data("plus.json")});
  EXPECT_EQ(j["atoms"].size(), 1u);
  j = run_json({"decompose", data("qutrit.json")});
  EXPECT_LE(j["reconstruction_residual"].get<double>(), 1e-8);
  const Result r = run_cli({"decompose", data("qutrit.json")});
  EXPECT_NE(r.out.find("residual"), std::string::npos);
  EXPECT_EQ(run_cli({"decompose", data("diag4.json")}).code, kExitCapacity);
}

TEST(CliStateTest, DumpRoundTrip) {
  const fs::path p = temp_path("dump.json");
  const Result r = run_cli({"fidelity", data("qutrit.json"), "--dump-state", p.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const StateFile a = read_state_file(data("qutrit.json"));
  const StateFile b = read_state_file(p.string());
  EXPECT_LE((a.rho.matrix() - b.rho.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  fs::remove(p);

  const StateFile sq = read_state_file(data("diag_06_squared.json"));
  const StateFile sq2 = parse_state_json(state_to_json(sq.rho, sq.declared));
  EXPECT_EQ(sq2.declared.base_dim, 2);
  EXPECT_EQ(sq2.declared.copies, 2);
}

TEST(CliStateTest, Renormalize) {
  const StateFile s = read_state_file(data("unnormalized.json"));
  EXPECT_NEAR(s.rho(0, 0).real(), 0.75, 1e-15);
}

TEST(CliStateTest, MalformedInputsExitTwo) {
  for (const char* name : {"bad_syntax.json", "bad_shape.json", "bad_pair.json", "bad_nonhermitian.json",
                           "bad_trace.json", "bad_negative.json", "bad_declared.json", "missing.json"}) {
    const Result r = run_cli({"fidelity", data(name)});
    EXPECT_EQ(r.code, kExitInput) << name << ": " << r.err;
    EXPECT_FALSE(r.err.empty());
  }
  EXPECT_EQ(run_cli({"fidelity", data("diag_06.json"), "--m", "0"}).code, kExitInput);
  EXPECT_EQ(run_cli({"rate", data("diag_06.json"), "--eps", "1.5"}).code, kExitInput);
  EXPECT_EQ(run_cli({"nonsense"}).code, kExitInput);
  EXPECT_EQ(run_cli({"figure", data("bad_curves.json")}).code, kExitInput);
}

TEST(CliCapTest, FlagAndEnvironment) {
  EXPECT_EQ(run_cli({"fidelity", data("diag_06.json"), "--copies", "5", "--cap", "16"}).code, kExitCapacity);
  EXPECT_EQ(run_cli({"fidelity", data("diag_06.json"), "--copies", "4", "--cap", "16"}).code, kExitOk);
  ::setenv("COHDIST_CAP", "8", 1);
  EXPECT_EQ(run_cli({"fidelity", data("diag_06.json"), "--copies", "4"}).code, kExitCapacity);
  EXPECT_EQ(run_cli({"fidelity", data("diag_06.json"), "--copies", "4", "--cap", "16"}).code, kExitOk);
  ::setenv("COHDIST_CAP", "lots", 1);
  EXPECT_EQ(run_cli({"fidelity", data("diag_06.json")}).code, kExitInput);
  ::unsetenv("COHDIST_CAP");
}

TEST(CliFigureTest, SortedDeterministicCsv) {
  const fs::path a = temp_path("a.csv"), b = temp_path("b.csv");
  ASSERT_EQ(run_cli({"figure", data("curves_small.json"), "--out", a.string()}).code, 0);
  ASSERT_EQ(run_cli({"figure", data("curves_small.json"), "--out", b.string()}).code, 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string csv = slurp(a);
  EXPECT_EQ(csv, slurp(b));
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "family,p,n,m,F_assisted");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 18u);
  auto field = [&](std::size_t row, int col) {
    std::istringstream ls(rows[row]);
    std::string f;
    for (int c = 0; c <= col; ++c) std::getline(ls, f, ',');
    return f;
  };
  // diag n=1 rows first, p ascending.
  EXPECT_EQ(field(0, 0), "diag");
  EXPECT_EQ(std::stod(field(0, 1)), 0.1);
  EXPECT_EQ(field(2, 1), "0.90000000000000002");
  EXPECT_NEAR(std::stod(field(2, 4)), 0.8, 1e-9);
  EXPECT_EQ(field(3, 2), "2");
  EXPECT_EQ(std::stod(field(3, 1)), 0.1);
  EXPECT_EQ(rows[6].substr(0, 8), "offdiag,");
  EXPECT_EQ(rows[17].substr(0, 12), "depolarized,");
  fs::remove(a);
  fs::remove(b);
}

TEST(CliFigureTest, DeltaPathMatchesMatrixPath) {
  CurveSpec spec = default_curve_spec();
  spec.p_grid = {0.0, 0.3, 0.7, 0.95};
  for (const auto& row : compute_curves(spec)) {
    const DensityMatrix power = tensor_power(family_state(row.family, row.p), row.n);
    EXPECT_NEAR(row.fidelity, assisted_fidelity_bound(power, row.m), 1e-12);
  }
}

TEST(CliSelftest, Passes) {
  const Result r = run_cli({"selftest", "--seed", "5"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("selftest passed"), std::string::npos);
}

}  // namespace
}  // namespace cohdist::cli
