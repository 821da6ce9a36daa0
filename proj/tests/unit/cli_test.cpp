#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "rcrank/dataset.hpp"
#include "synthetic.hpp"

namespace rcrank {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rcrank");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(RCRANK_TEST_TMPDIR) / "cli" /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::create_directories(dir_);
    write(testing::make_separable(20, 8, 5, 1), "train.svm");
    write(testing::make_separable(8, 8, 5, 2), "valid.svm");
  }

  void write(const Dataset& d, const std::string& name) {
    std::ofstream out(path(name));
    write_dataset(d, out);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome train_model(const std::string& model, const std::string& variant = "oblivious") {
    return run_cli({"train", "--train", path("train.svm"), "--valid", path("valid.svm"), "--model",
                    path(model), "--variant", variant, "--leaves", "8", "--lr", "0.15",
                    "--max-trees", "10", "--threads", "2"});
  }

  fs::path dir_;
};

TEST_F(Cli, TrainEvalPredict) {
  const Outcome t = train_model("model.txt");
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.err.find("iter=1 train_ndcg@10="), std::string::npos);
  EXPECT_NE(t.err.find(" valid_ndcg@10="), std::string::npos);

  const Outcome e = run_cli({"eval", "--model", path("model.txt"), "--data", path("valid.svm")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(std::regex_match(e.out, std::regex("[01]\\.\\d{6}\n"))) << e.out;

  const Outcome p = run_cli({"predict", "--model", path("model.txt"), "--data", path("valid.svm"),
                             "--output", path("scores.txt")});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(count_lines(path("scores.txt")), 64u);
}

TEST_F(Cli, EvalPerQueryFeedsSignificance) {
  ASSERT_EQ(train_model("a.txt", "oblivious").code, 0);
  ASSERT_EQ(train_model("b.txt", "standard").code, 0);
  for (const char* name : {"a", "b"}) {
    const std::string model = std::string(name) + ".txt";
    const std::string pq = std::string(name) + ".pq";
    ASSERT_EQ(run_cli({"eval", "--model", path(model), "--data", path("valid.svm"), "--per-query",
                       path(pq)})
                  .code,
              0);
    EXPECT_EQ(count_lines(path(pq)), 8u);
  }
  const Outcome s = run_cli({"significance", "--a", path("a.pq"), "--b", path("b.pq")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.out.rfind("p_value=", 0), 0u);
  EXPECT_NE(s.out.find("n=8"), std::string::npos);
  EXPECT_NE(s.out.find("test=two-tailed paired t-test"), std::string::npos);
}

TEST_F(Cli, NonPowerOfTwoObliviousLeavesIsAConfigError) {
  const Outcome o = run_cli({"train", "--train", path("train.svm"), "--model", path("m.txt"),
                             "--variant", "oblivious", "--leaves", "10", "--lr", "0.1"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("leaves must be a power of two for oblivious trees"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("m.txt")));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"fit"}).code, 1);
  EXPECT_EQ(run_cli({"eval", "--model", "x", "--data", "y", "--bogus"}).code, 1);
  EXPECT_EQ(run_cli({"train", "--train", path("train.svm"), "--model", path("m.txt")}).code, 1);
  EXPECT_EQ(run_cli({"train", "--train", path("train.svm"), "--model", path("m.txt"), "--variant",
                     "forest", "--leaves", "8", "--lr", "0.1"})
                .code,
            1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(Cli, RuntimeErrors) {
  const Outcome missing =
      run_cli({"eval", "--model", path("none.txt"), "--data", path("valid.svm")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_EQ(missing.err.rfind("error: ", 0), 0u);

  std::ofstream(path("bad.svm")) << "1 qid:1 1:0.5\n1 qid:1 1:oops\n";
  const Outcome bad = run_cli({"stats", "--data", path("bad.svm")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);
}

TEST_F(Cli, StatsSummary) {
  const Outcome o = run_cli({"stats", "--data", path("valid.svm")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, "queries=8 rows=64 mean=8.00 median=8 max=8 min=8 features=5\n");
}

TEST_F(Cli, CvWritesReportAndIsReproducible) {
  const std::vector<std::string> common{"cv",        "--data",  path("train.svm"), "--variant",
                                        "standard",  "--leaves", "4",              "--lr",
                                        "0.2",       "--max-trees", "5",           "--threads",
                                        "2"};
  auto first = common;
  first.insert(first.end(), {"--report", path("r1.csv")});
  auto second = common;
  second.insert(second.end(), {"--report", path("r2.csv")});
  const Outcome a = run_cli(first);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(run_cli(second).code, 0);
  EXPECT_EQ(count_lines(path("r1.csv")), 6u);
  std::ifstream r1(path("r1.csv")), r2(path("r2.csv"));
  std::stringstream s1, s2;
  s1 << r1.rdbuf();
  s2 << r2.rdbuf();
  EXPECT_EQ(s1.str(), s2.str());
}

TEST_F(Cli, GridReportsTable) {
  const Outcome o = run_cli({"grid", "--data", path("train.svm"), "--report", path("grid.csv"),
                             "--leaves", "4,8", "--lr", "0.11,0.15", "--max-trees", "3",
                             "--threads", "2"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(count_lines(path("grid.csv")), 1u + 2 * 2 * 2 * 5);
  EXPECT_NE(o.out.find("best oblivious"), std::string::npos);
  EXPECT_NE(o.out.find("best standard"), std::string::npos);

  const Outcome bad = run_cli({"grid", "--data", path("train.svm"), "--report", path("g.csv"),
                               "--leaves", "6"});
  EXPECT_EQ(bad.code, 1);
}

TEST_F(Cli, FeatureStatsWritesMappingAndReducedData) {
  ASSERT_EQ(train_model("m1.txt").code, 0);
  ASSERT_EQ(train_model("m2.txt", "standard").code, 0);
  const Outcome o = run_cli({"feature-stats", "--models", path("m1.txt"), path("m2.txt"), "--top",
                             "2", "--mapping", path("map.txt"), "--data", path("valid.svm"),
                             "--output", path("reduced.svm")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(count_lines(path("map.txt")), 2u);
  EXPECT_EQ(o.out.rfind("1 ", 0), 0u);  // the label-bearing feature ranks first
  const Dataset reduced = load_dataset(path("reduced.svm"), 2);
  EXPECT_EQ(reduced.row_count(), 64u);

  EXPECT_EQ(run_cli({"feature-stats", "--models", path("m1.txt"), "--top", "0", "--mapping",
                     path("map.txt")})
                .code,
            1);
}

}  // namespace
}  // namespace rcrank
