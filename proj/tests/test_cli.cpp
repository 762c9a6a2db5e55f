#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with QFHECKE_OFFLINE set; stream selects stdout or stderr.
Run run(const std::string& args, bool stderr_only = false) {
  std::string cmd = std::string("QFHECKE_OFFLINE=1 '") + QFHECKE_CLI_PATH + "' " + args +
                    (stderr_only ? " 2>&1 1>/dev/null" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

nlohmann::json result_of(const std::string& args) {
  auto r = run(args);
  EXPECT_EQ(r.code, 0) << args;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["version"], "0.1.0");
  EXPECT_TRUE(j.contains("config_hash"));
  return j["result"];
}

}  // namespace

TEST(Cli, FieldSummary) {
  auto r = result_of("field --d 5");
  EXPECT_EQ(r["discriminant"], 5);
  EXPECT_EQ(r["fundamental_unit_norm"], -1);
  EXPECT_EQ(r["class_group"]["h"], 1);
  auto r10 = result_of("field --d 10");
  EXPECT_EQ(r10["class_group"]["order"], 2);
}

TEST(Cli, IdealFactorization) {
  auto r = result_of("ideal --d 10 --factor 3");
  EXPECT_EQ(r["splitting"], "split");
  ASSERT_EQ(r["ideals"].size(), 2u);
  EXPECT_EQ(r["ideals"][0]["principal"], false);
}

TEST(Cli, ClassicalKloosterman) {
  auto r = result_of("kloosterman classical --m 1 --n 1 --c 3");
  EXPECT_NEAR(r["value"]["re"].get<double>(), -1.0, 1e-12);
  EXPECT_NEAR(r["value"]["abs"].get<double>(), 1.0, 1e-12);
}

TEST(Cli, MeasureMassAndMoment) {
  auto r = result_of("measure phi --ord 2 --interval -2,2");
  EXPECT_NEAR(r["mass"].get<double>(), 1.0, 1e-10);
  auto st = result_of("measure sato-tate --interval -1,1");
  EXPECT_NEAR(st["mass"].get<double>(), 0.6089977810442293, 1e-10);
}

TEST(Cli, HeckePowerTable) {
  auto r = result_of("hecke power --lambda 0.5 --ell 3");
  EXPECT_NEAR(r["value"].get<double>(), -0.875, 1e-15);
  EXPECT_EQ(r["table"].size(), 4u);
  auto c = result_of("hecke cosets --d 5 --p 3 --ell 1");
  EXPECT_EQ(c["count"], 10);
  EXPECT_EQ(c["inequivalent"], true);
}

TEST(Cli, SamplesAreSeedDeterministic) {
  auto a = run("--seed 5 sample phi --ord 1 --n 50");
  auto b = run("sample phi --ord 1 --n 50 --seed 5");
  auto c = run("sample phi --ord 1 --n 50 --seed 6");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(nlohmann::json::parse(a.out)["result"], nlohmann::json::parse(c.out)["result"]);
}

TEST(Cli, SyntheticTestDistPasses) {
  auto r = result_of("test-dist --synthetic --n 20000 --ord 1 --seed 3");
  EXPECT_LT(r["ks"].get<double>(), 0.02);
  for (const auto& m : r["moments"]) EXPECT_LT(std::abs(m["z"].get<double>()), 4.5) << m["ell"];
}

TEST(Cli, OfflineFetchUsesFixtures) {
  auto r = result_of("fetch --offline --labels 1.12.a.a --max-prime 5");
  ASSERT_EQ(r["count"], 1);
  EXPECT_EQ(r["records"][0]["a_p"]["2"], "-24");
  EXPECT_NEAR(r["records"][0]["lambda_p"]["2"].get<double>(), -24 / std::pow(2.0, 5.5), 1e-12);
}

TEST(Cli, CsvHasMetadataLineThenHeader) {
  auto r = run("--format csv kloosterman classical --m 1 --n 1 --c-max 4");
  ASSERT_EQ(r.code, 0);
  auto first = r.out.substr(0, r.out.find('\n'));
  EXPECT_EQ(first.rfind("# version=0.1.0 seed=0 config_hash=", 0), 0u);
  auto rest = r.out.substr(first.size() + 1);
  EXPECT_EQ(rest.substr(0, rest.find('\n')), "c,re,im,weil_rhs,ratio");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
}

TEST(Cli, ConfigHashTracksOptions) {
  auto a = nlohmann::json::parse(run("measure phi --ord 2").out);
  auto b = nlohmann::json::parse(run("measure phi --ord 2").out);
  auto c = nlohmann::json::parse(run("measure phi --ord 3").out);
  EXPECT_EQ(a["config_hash"], b["config_hash"]);
  EXPECT_NE(a["config_hash"], c["config_hash"]);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--bogus").code, 2);
  EXPECT_EQ(run("measure nosuch").code, 2);
  EXPECT_EQ(run("--help").code, 0);
  auto e = run("hecke descent --d 10 --p 3", true);
  EXPECT_EQ(e.code, 1);
  auto j = nlohmann::json::parse(e.out);
  EXPECT_EQ(j["error"]["code"], "NotNarrowSquare");
  auto miss = run("fetch --mode cache-only --labels 11.2.a.a --cache-dir /nonexistent-qfhecke", true);
  EXPECT_EQ(miss.code, 1);
  EXPECT_EQ(nlohmann::json::parse(miss.out)["error"]["code"], "CacheMiss");
}
