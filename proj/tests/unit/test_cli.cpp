#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;

namespace uplift::cli {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "uplift");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("uplift_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // The audited seed-7 batch used by the golden and determinism checks.
  std::string seed7_batch() {
    const auto csv = path("synth.csv");
    const auto r = run({"simulate", "--seed", "7", "--skus", "50", "--days", "400", "--gamma",
                        "0.6", "--out", csv});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return csv;
  }

  fs::path dir_;
};

TEST(Helpers, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Helpers, RangeAndFormatting) {
  const auto r = parse_range("0:1.5");
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->first, 0.0);
  EXPECT_EQ(r->second, 1.5);
  EXPECT_FALSE(parse_range("1.5").has_value());
  EXPECT_FALSE(parse_range("a:b").has_value());
  EXPECT_EQ(format_g17(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_g17(M_PI)), M_PI);
}

TEST(Helpers, ThreadResolution) {
  EXPECT_EQ(resolve_threads(3), 3u);
  ::setenv("UPLIFT_THREADS", "2", 1);
  EXPECT_EQ(resolve_threads(0), 2u);
  ::unsetenv("UPLIFT_THREADS");
  EXPECT_GE(resolve_threads(0), 1u);
}

TEST_F(CliTest, UnknownFlagIsAValidationError) {
  EXPECT_EQ(run({"fit", "--bogus"}).code, kExitValidation);
  EXPECT_EQ(run({}).code, kExitValidation);
}

TEST_F(CliTest, MissingInputFile) {
  const auto r = run({"fit", "--input", path("nope.csv"), "--out-dir", path("out")});
  EXPECT_EQ(r.code, kExitValidation);
}

TEST_F(CliTest, EmptyInputHasNoEligibleSkus) {
  std::ofstream(path("empty.csv")).close();
  const auto r = run({"fit", "--input", path("empty.csv"), "--out-dir", path("out")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("no eligible SKUs"), std::string::npos) << r.err;
}

TEST_F(CliTest, InvalidRowsAreReportedWithLineAndField) {
  std::ofstream(path("bad.csv"))
      << "store,sku,date,weekday,stock,forecast,sales,discounted_sales\n"
      << "1,1,2024-01-01,Monday,5,1.0,6,0\n";
  const auto r = run({"fit", "--input", path("bad.csv"), "--out-dir", path("out")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("line:2 field:sales"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateZeroSkusWritesOnlyTheHeader) {
  const auto r = run({"simulate", "--skus", "0", "--out", "-"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "store,sku,date,weekday,stock,forecast,sales,discounted_sales\n");
}

TEST_F(CliTest, SimulateAcceptsNegativeUpliftAndRejectsBadConfig) {
  EXPECT_EQ(run({"simulate", "--skus", "1", "--days", "10", "--gamma", "-0.2", "--out", "-"}).code,
            kExitOk);
  EXPECT_EQ(run({"simulate", "--discount-prob", "1.5", "--out", "-"}).code, kExitValidation);
}

TEST_F(CliTest, SimulateDigestIsPinned) {
  const auto csv = seed7_batch();
  EXPECT_EQ(sha256_hex(slurp(csv)),
            "ef503bf656a85966b70cca658487b25c35ac4f4785210ff3c614c839971844b7");
  const auto manifest = nlohmann::json::parse(slurp(csv + ".manifest.json"));
  EXPECT_EQ(manifest["output_sha256"], sha256_hex(slurp(csv)));
}

TEST_F(CliTest, FitMatchesGoldenReports) {
  const auto csv = seed7_batch();
  const auto r = run({"fit", "--input", csv, "--out-dir", path("out"), "--min-entries", "100",
                      "--min-discount-days", "50", "--alpha", "0.05"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(slurp(path("out/reports.csv")),
            slurp(fs::path(UPLIFT_GOLDEN_DIR) / "reports_seed7.csv"));

  const auto manifest = nlohmann::json::parse(slurp(path("out/manifest.json")));
  EXPECT_EQ(manifest["config"]["min_entries"], 100);
  EXPECT_EQ(manifest["config"]["min_discount_days"], 50);
  EXPECT_EQ(manifest["config"]["alpha"], 0.05);
  EXPECT_EQ(manifest["config"]["input_sha256"], sha256_hex(slurp(csv)));

  const auto agg = nlohmann::json::parse(slurp(path("out/aggregate.json")));
  EXPECT_EQ(agg["n_ok"], 50);
  EXPECT_TRUE(fs::exists(path("out/histogram.csv")));
  EXPECT_TRUE(fs::exists(path("out/boxplot.csv")));
}

TEST_F(CliTest, FitIsByteIdenticalAcrossThreadCounts) {
  const auto csv = seed7_batch();
  for (const char* t : {"1", "4"}) {
    const auto r = run({"fit", "--input", csv, "--out-dir", path(std::string("out") + t),
                        "--threads", t});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  ASSERT_EQ(run({"fit", "--input", csv, "--out-dir", path("again"), "--threads", "1"}).code,
            kExitOk);
  for (const char* f : {"reports.csv", "aggregate.json", "histogram.csv", "boxplot.csv"}) {
    EXPECT_EQ(slurp(path(std::string("out1/") + f)), slurp(path(std::string("out4/") + f))) << f;
    EXPECT_EQ(slurp(path(std::string("out1/") + f)), slurp(path(std::string("again/") + f))) << f;
  }
}

TEST_F(CliTest, StoreSkuGroupingAddsStoreColumn) {
  const auto csv = path("s.csv");
  ASSERT_EQ(run({"simulate", "--skus", "2", "--days", "300", "--out", csv}).code, kExitOk);
  ASSERT_EQ(run({"fit", "--input", csv, "--out-dir", path("out"), "--group-by", "store-sku"}).code,
            kExitOk);
  const auto text = slurp(path("out/reports.csv"));
  EXPECT_EQ(text.rfind("store,sku,status", 0), 0u) << text.substr(0, 60);
}

TEST_F(CliTest, CycleSingleDay) {
  const auto r = run({"cycle", "--days", "1", "--out-dir", path("c")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream trace(slurp(path("c/trace.csv")));
  std::string line;
  int lines = 0;
  while (std::getline(trace, line)) ++lines;
  EXPECT_EQ(lines, 2);  // header plus one day
}

TEST_F(CliTest, CycleDefaultsAreFiniteAndOrdered) {
  ASSERT_EQ(run({"cycle", "--out-dir", path("a")}).code, kExitOk);
  ASSERT_EQ(run({"cycle", "--assumed-share", "1.0", "--out-dir", path("b")}).code, kExitOk);
  const auto a = nlohmann::json::parse(slurp(path("a/summary.json")));
  const auto b = nlohmann::json::parse(slurp(path("b/summary.json")));
  for (const auto& [key, value] : a.items()) {
    if (value.is_number()) EXPECT_TRUE(std::isfinite(value.get<double>())) << key;
  }
  EXPECT_GT(b["mean_stock"].get<double>(), a["mean_stock"].get<double>());
  EXPECT_EQ(run({"cycle", "--smoothing", "0", "--out-dir", path("x")}).code, kExitValidation);
}

}  // namespace
}  // namespace uplift::cli
