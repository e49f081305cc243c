#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "figures.hpp"

namespace hashchem::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hashchem");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hashchem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string sub(const std::string& name) {
    const fs::path p = dir_ / name;
    fs::create_directories(p);
    return p.string();
  }

  fs::path dir_;
};

const std::vector<std::string> kSmall{"--n_max", "200", "--iterations", "30", "--seed", "5"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

TEST_F(CliTest, ZeroIterationsWritesHeaderOnly) {
  const auto out = sub("a");
  const Result r = cli({"run", "--iterations", "0", "--seed", "1", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string text = slurp(fs::path(out) / "nonspatial_1_0.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(text.rfind("{\"k\":\"h\"", 0), 0u);
}

TEST_F(CliTest, RunIsByteDeterministic) {
  const auto a = sub("a");
  const auto b = sub("b");
  ASSERT_EQ(cli(with({"run", "--out", a}, kSmall)).code, kExitOk);
  ASSERT_EQ(cli(with({"run", "--out", b}, kSmall)).code, kExitOk);
  const std::string la = slurp(fs::path(a) / "nonspatial_5_0.jsonl");
  EXPECT_FALSE(la.empty());
  EXPECT_EQ(la, slurp(fs::path(b) / "nonspatial_5_0.jsonl"));
}

TEST_F(CliTest, BatchOfOneEqualsRun) {
  const auto a = sub("a");
  const auto b = sub("b");
  ASSERT_EQ(cli(with({"run", "--out", a}, kSmall)).code, kExitOk);
  ASSERT_EQ(cli(with({"batch", "--runs", "1", "--out", b}, kSmall)).code, kExitOk);
  EXPECT_EQ(slurp(fs::path(a) / "nonspatial_5_0.jsonl"), slurp(fs::path(b) / "nonspatial_5_0.jsonl"));
}

TEST_F(CliTest, BatchOutputIndependentOfJobs) {
  const auto a = sub("a");
  const auto b = sub("b");
  ASSERT_EQ(cli(with({"batch", "--runs", "5", "--jobs", "1", "--gzip", "--out", a}, kSmall)).code, kExitOk);
  ASSERT_EQ(cli(with({"batch", "--runs", "5", "--jobs", "4", "--gzip", "--out", b}, kSmall)).code, kExitOk);
  for (int i = 0; i < 5; ++i) {
    const std::string name = "nonspatial_5_" + std::to_string(i) + ".jsonl.gz";
    EXPECT_EQ(slurp(fs::path(a) / name), slurp(fs::path(b) / name)) << name;
  }
}

TEST_F(CliTest, SpatialRunWritesLog) {
  const auto a = sub("a");
  const Result r = cli({"run", "--model", "spatial", "--init_count", "200", "--iterations", "5", "--seed", "2",
                        "--out", a});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(fs::path(a) / "spatial_2_0.jsonl"));
}

TEST_F(CliTest, AnalyzeWritesFiguresAndFits) {
  const auto logs = sub("logs");
  const auto out = sub("out");
  ASSERT_EQ(cli({"batch", "--runs", "2", "--n_max", "200", "--iterations", "120", "--out", logs}).code, kExitOk);
  const Result r = cli({"analyze", "--logs", logs + "/*.jsonl", "--fit-range", "20:120", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* name : {"fig2_max_fitness.csv", "fig2_mean_fitness.csv", "fig3_replicated_individuals.csv",
                           "fig4_max_size.csv", "fig4_mean_size.csv", "fig6_unique_individual_types.csv",
                           "fig6_unique_multiset_types.csv", "population.csv", "fit_report.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / name)) << name;
  }
  const FigureTable t = read_csv(fs::path(out) / "fig4_mean_size.csv");
  ASSERT_EQ(t.columns.size(), 3u);
  EXPECT_EQ(t.columns.back(), "mean");
  EXPECT_EQ(t.t.size(), 120u);
}

TEST_F(CliTest, AnalyzeEmptyGlobIsUsageError) {
  EXPECT_EQ(cli({"analyze", "--logs", dir_.string() + "/nothing*.jsonl", "--out", sub("o")}).code, kExitInvalid);
}

TEST_F(CliTest, AnalyzeCorruptLogFails) {
  const auto logs = sub("logs");
  std::ofstream(fs::path(logs) / "x.jsonl") << "garbage\n";
  const Result r = cli({"analyze", "--logs", logs + "/*.jsonl", "--out", sub("o")});
  EXPECT_NE(r.code, kExitOk);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, PlotIsDeterministicAndRejectsBadCsv) {
  const fs::path csv = dir_ / "fig2_max_fitness.csv";
  std::ofstream(csv) << "t,run0,mean\n1,0.5,0.5\n2,,0.75\n10,1.25,1.25\n";
  const fs::path a = dir_ / "a.svg";
  const fs::path b = dir_ / "b.svg";
  ASSERT_EQ(cli({"plot", "--csv", csv.string(), "--out", a.string()}).code, kExitOk);
  ASSERT_EQ(cli({"plot", "--csv", csv.string(), "--out", b.string()}).code, kExitOk);
  const std::string svg = slurp(a);
  EXPECT_EQ(svg, slurp(b));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("log scale"), std::string::npos);

  const fs::path bad = dir_ / "bad.csv";
  std::ofstream(bad) << "t,run0\n1,2,3\n";
  EXPECT_EQ(cli({"plot", "--csv", bad.string(), "--out", (dir_ / "c.svg").string()}).code, kExitInvalid);
}

TEST_F(CliTest, InvalidConfigIsUsageError) {
  const Result r = cli({"run", "--mutation_rate", "2", "--out", sub("a")});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("mutation_rate"), std::string::npos);
  EXPECT_EQ(cli({"run", "--no-such-flag"}).code, kExitInvalid);
  EXPECT_EQ(cli({"run", "--model", "lattice", "--out", sub("b")}).code, kExitInvalid);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  const fs::path blocker = dir_ / "file";
  std::ofstream(blocker) << "x";
  EXPECT_EQ(cli({"run", "--iterations", "1", "--out", (blocker / "sub").string()}).code, kExitIo);
}

TEST(FigureCsv, RoundTrip) {
  const std::vector<std::string> names{"r0", "r1"};
  const std::vector<Series> runs{{1.0, 2.5}, {std::nullopt, 0.125}};
  const MeanSeries mean = cross_run_mean(runs);
  const FigureTable t = make_figure_table(names, runs, mean);
  const std::string text = format_csv(t);
  EXPECT_EQ(text, "t,r0,r1,mean\n1,1,,1\n2,2.5,0.125,1.3125\n");
  const FigureTable back = parse_csv(text);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.t, t.t);
  EXPECT_EQ(back.values, t.values);
}

TEST(Bench, ReportsBothModels) {
  BenchOptions o;
  o.runs = 2;
  o.config.iterations = 5;
  o.config.n_max = 200;
  o.config.init_count = 100;
  const BenchReport r = run_bench(o);
  ASSERT_EQ(r.models.size(), 2u);
  for (const auto& m : r.models) {
    EXPECT_EQ(m.attempted, 2u);
    EXPECT_EQ(m.seconds.size() + m.extinct, m.attempted);
  }
}

}  // namespace
}  // namespace hashchem::cli
