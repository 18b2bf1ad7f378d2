// Drives the hcvx binary named by HCVX_CLI and checks exit codes and reports.
#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Run {
  int exit_code = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("hcvx_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string cli() {
  const char* p = std::getenv("HCVX_CLI");
  return p ? p : "hcvx";
}

fs::path configs() {
  const char* d = std::getenv("HCVX_SOURCE_DIR");
  return fs::path(d ? d : HCVX_TEST_SOURCE_DIR) / "configs";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run hcvx(const std::string& args, const std::string& env = "") {
  const auto out = scratch() / "stdout.txt";
  const std::string cmd =
      env + " \"" + cli() + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  return r;
}

fs::path write_config(const std::string& name, const Json& j) {
  const auto p = scratch() / name;
  std::ofstream(p) << j.dump();
  return p;
}

Json result(const Run& r) { return Json::parse(r.out)["result"]; }

TEST(CliCertify, ExampleFixturePasses) {
  const auto r = hcvx("certify --config " + (configs() / "cubic_piecewise_certify.json").string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(result(r)["verdict"], "Certified");
}

TEST(CliCertify, WholeIntervalGateFailsWithWitness) {
  const auto r = hcvx("certify --config " + (configs() / "whole_interval_certify.json").string());
  EXPECT_EQ(r.exit_code, 2);
  const auto res = result(r);
  EXPECT_EQ(res["verdict"], "Violated");
  EXPECT_NEAR(res["arg_min"]["u"].get<double>(), 0.0, 1e-6);
  EXPECT_NEAR(res["arg_min"]["lambda"].get<double>(), 0.5, 0.1);
  EXPECT_LT(res["min_value"].get<double>(), -0.375);
  EXPECT_FALSE(res["confirmed_min"].is_null());
}

TEST(CliCertify, MalformedFamilyIsUsageError) {
  const auto p = write_config("bad.json", {{"f", "CubicTargett"}, {"g", "PiecewiseGate"}, {"v", 2}});
  EXPECT_EQ(hcvx("certify --config " + p.string()).exit_code, 1);
}

TEST(CliUsage, ErrorsExitOne) {
  EXPECT_EQ(hcvx("").exit_code, 1);
  EXPECT_EQ(hcvx("frobnicate").exit_code, 1);
  EXPECT_EQ(hcvx("certify").exit_code, 1);  // nothing to certify
  EXPECT_EQ(hcvx("certify --config /nonexistent.json").exit_code, 1);
  EXPECT_EQ(hcvx("jcoeff --config " + (configs() / "jcoeff_exp.json").string() +
                 " --format yaml").exit_code,
            1);
  const auto wrong = write_config("wrong.json", {{"command", "jcoeff"}, {"h", "IdentityWeight"}});
  EXPECT_EQ(hcvx("certify --config " + wrong.string()).exit_code, 1);
}

TEST(CliJcoeff, Examples) {
  auto run = [](const Json& h, const Json& K) {
    const auto p = write_config("jc.json", {{"h", h}, {"K", K}});
    const auto r = hcvx("jcoeff --config " + p.string());
    EXPECT_EQ(r.exit_code, 0);
    return result(r)["value"].get<double>();
  };
  const Json unit = {{"lo", 0}, {"hi", 1}, {"lo_open", true}, {"hi_open", true}};
  EXPECT_DOUBLE_EQ(run("IdentityWeight", {{"lo", 1}, {"hi", 3}}), 1.0);
  EXPECT_NEAR(run({{"family", "ExpWeight"}, {"params", {{"alpha", 1.5}, {"beta", 2.5}}}}, unit),
              0.6, 1e-6);
  EXPECT_NEAR(run({{"family", "PowerWeight"}, {"params", {{"beta", 2}}}}, unit), 0.0, 1e-6);
}

TEST(CliJensen, ExitCodeEncodesMarginSign) {
  const Json classical = {{"f", "ExpTarget"}, {"A", {{1, 0.5}, {0.5, 2}}}, {"x", {0.6, 0.8}}};
  const auto ok = hcvx("jensen --config " + write_config("j1.json", classical).string());
  EXPECT_EQ(ok.exit_code, 0);
  EXPECT_GE(result(ok)["margin"].get<double>(), 0.0);

  const auto bad = hcvx("jensen --config " + (configs() / "jensen_infimum.json").string());
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_NEAR(result(bad)["margin"].get<double>(), -0.0185824679, 1e-9);

  const Json domain = {{"f", "NegLogTarget"}, {"A", {{-1, 0}, {0, 1}}}, {"x", {1, 1}}};
  EXPECT_EQ(hcvx("jensen --config " + write_config("j3.json", domain).string()).exit_code, 1);
}

TEST(CliRefine, EqualityAndDerivedRows) {
  const auto r = hcvx("refine --config " + (configs() / "refine_amgm.json").string());
  EXPECT_EQ(r.exit_code, 2);  // the inner AM-GM link fails on the first row
  const auto rows = result(r)["chains"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0]["lhs"].get<double>(), 0.7155417527999327, 1e-14);
  EXPECT_NEAR(rows[0]["mid"].get<double>(), 0.7335044614184571, 1e-14);
  EXPECT_NEAR(rows[0]["rhs"].get<double>(), 0.72, 1e-14);
  EXPECT_EQ(rows[1]["gamma"], 0.0);
  EXPECT_NEAR(rows[1]["lhs"].get<double>(), rows[1]["rhs"].get<double>(), 1e-12);
  EXPECT_NEAR(rows[1]["mid"].get<double>(), rows[1]["rhs"].get<double>(), 1e-12);

  const auto hm = hcvx("refine --config " + (configs() / "refine_hm.json").string());
  const auto hrow = result(hm)["chains"][0];
  EXPECT_NEAR(hrow["lhs"].get<double>(), 0.5184, 1e-12);
  EXPECT_NEAR(hrow["mid"].get<double>(), 0.4859259259259260, 1e-12);
  EXPECT_NEAR(hrow["rhs"].get<double>(), 0.5248, 1e-12);

  const Json eq = {{"corollary", "KyFan"}, {"alpha", 0.5}, {"v", 0.5},
                   {"samples", {{{"a", {0.3, 0.3}}}}}};
  const auto k = hcvx("refine --config " + write_config("kf.json", eq).string());
  EXPECT_EQ(k.exit_code, 0);
}

TEST(CliRefine, ReadsSampleCsv) {
  const auto csv = scratch() / "sample.csv";
  std::ofstream(csv) << "a,q\r\n0.64,0.5\r\n0.8,0.5\r\n";
  const Json cfg = {{"corollary", "AmGm"}, {"alpha", 2}, {"v", 0.8}, {"sample_csv", csv.string()}};
  const auto r = hcvx("refine --format csv --config " + write_config("csv.json", cfg).string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.out.find("AmGm,2,2.0,0.16000000000000003,2.16,0.7155417527999327"),
            std::string::npos)
      << r.out;
}

TEST(CliFalsify, ReplayReproducesWitnessesBitForBit) {
  const auto report = scratch() / "thm21.json";
  const auto f = hcvx("falsify --config " + (configs() / "falsify_thm21.json").string() +
                      " --samples 400 --out " + report.string());
  ASSERT_EQ(f.exit_code, 2);
  const auto rep = Json::parse(slurp(report));
  EXPECT_EQ(rep["config"]["samples"], 400);  // flag beat the config
  const auto& ws = rep["result"]["witnesses"];
  ASSERT_GT(ws.size(), 3u);
  for (std::size_t i = 0; i < 4; ++i) {
    const Json cfg = {{"report", report.string()}, {"witness", i}};
    const auto r = hcvx("replay --config " + write_config("rp.json", cfg).string());
    EXPECT_EQ(r.exit_code, 2);
    const auto res = result(r);
    EXPECT_TRUE(res["reproduced"].get<bool>());
    EXPECT_EQ(res["margin_double"].dump(), ws[i]["margin_double"].dump());
    EXPECT_EQ(res["margin_confirmed"], ws[i]["margin_confirmed"]);
  }
  // An inline instance replays the same way.
  const Json inline_cfg = {{"instance", ws[0]["instance"]}};
  const auto r = hcvx("replay --config " + write_config("rp2.json", inline_cfg).string());
  EXPECT_EQ(result(r)["margin_confirmed"], ws[0]["margin_confirmed"]);
}

TEST(CliFalsify, DeterministicAcrossThreadCounts) {
  auto strip = [](const std::string& s) {
    auto j = Json::parse(s);
    j.erase("wall_seconds");
    return j.dump();
  };
  const std::string args = "falsify --target Chrystal --samples 600 --seed 5";
  const auto one = hcvx(args, "HCVX_THREADS=1");
  const auto four = hcvx(args, "HCVX_THREADS=4");
  EXPECT_EQ(one.exit_code, four.exit_code);
  EXPECT_EQ(strip(one.out), strip(four.out));
  EXPECT_NE(strip(one.out), strip(hcvx("falsify --target Chrystal --samples 600 --seed 6").out));
}

TEST(CliFalsify, OuterLinkFindsNothing) {
  const auto r = hcvx("falsify --config " + (configs() / "falsify_kyfan_outer.json").string() +
                      " --samples 2000");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(result(r)["confirmed"], 0);
}

TEST(CliSweep, ProfileOfLemmaInstance) {
  const auto r = hcvx("sweep --config " + (configs() / "sweep_lemma.json").string());
  EXPECT_EQ(r.exit_code, 2);
  const auto res = result(r);
  EXPECT_EQ(res["points"].size(), 99u);
  EXPECT_FALSE(res["holds_everywhere"].get<bool>());
}

}  // namespace
