#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "edeen/cli.hpp"
#include "edeen/evaluation.hpp"
#include "edeen/model_io.hpp"

using namespace edeen;
using namespace edeen::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("edeen_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void synth(const std::string& name, std::size_t dim = 5, std::size_t normals = 200,
             std::size_t anomalies = 20) {
    const Result r = run({"synth", "-o", path(name), "--dim", std::to_string(dim), "--normals",
                          std::to_string(normals), "--anomalies", std::to_string(anomalies),
                          "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

}  // namespace

TEST(RunConfig, DefaultsRoundTripAndValidate) {
  const RunConfig c = RunConfig::from_json_text("{}");
  EXPECT_EQ(c.members, 3u);
  EXPECT_EQ(c.q, 0.2);
  EXPECT_EQ(c.candidates, (std::vector<std::size_t>{1, 3, 5, 7, 10, 15}));
  EXPECT_NO_THROW(c.validate());
  const RunConfig back = RunConfig::from_json_text(c.to_json_text());
  EXPECT_EQ(back.to_json_text(), c.to_json_text());
}

TEST(RunConfig, RejectsBadValues) {
  EXPECT_THROW(RunConfig::from_json_text("{\"trian\": {}}"), ConfigError);
  EXPECT_THROW(RunConfig::from_json_text("{\"members\": \"three\"}"), ConfigError);
  EXPECT_THROW(RunConfig::from_json_text("{"), ConfigError);
  EXPECT_THROW(RunConfig::from_json_text("{\"q\": 1.5}").validate(), ConfigError);
  EXPECT_THROW(RunConfig::from_json_text("{\"members\": 0}").validate(), ConfigError);
  EXPECT_THROW(RunConfig::from_json_text("{\"arch\": {\"encoder\": \"gru\"}}").validate(),
               ConfigError);
  EXPECT_THROW(RunConfig::from_json_text("{\"methods\": [\"X\"]}").validate(), ConfigError);
}

TEST(RunConfig, OutputRootFromEnvironment) {
  RunConfig c;
  ::setenv("EDEEN_OUTPUT_ROOT", "/tmp/edeen-root", 1);
  EXPECT_EQ(c.output_path(), fs::path("/tmp/edeen-root"));
  ::unsetenv("EDEEN_OUTPUT_ROOT");
  EXPECT_EQ(c.output_path(), fs::path("runs"));
  c.output_dir = "elsewhere";
  EXPECT_EQ(c.output_path(), fs::path("elsewhere"));
}

TEST_F(CliTest, TrainScoreEvalPipeline) {
  synth("data");
  Result r = run({"train", "-d", path("data/train.csv"), "-o", path("run"), "-E", "10", "-I", "2",
                   "--batch-size", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"model.json", "trace.csv", "config.json"})
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  const ModelFile model = load_model(dir_ / "run/model.json");
  EXPECT_EQ(model.model.size(), 2u);
  EXPECT_TRUE(model.scaling.has_value());
  EXPECT_EQ(RunConfig::load(dir_ / "run/config.json").members, 2u);
  const std::string trace = read_text(dir_ / "run/trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "epoch,mean_Lr,mean_Le,combined");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 11);

  r = run({"score", "-m", path("run/model.json"), "-d", path("data/test.csv"), "-o", path("run")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string scores = read_text(dir_ / "run/scores.csv");
  const auto test_rows = std::count(scores.begin(), scores.end(), '\n') - 1;
  const std::string test_csv = read_text(dir_ / "data/test.csv");
  EXPECT_EQ(test_rows, std::count(test_csv.begin(), test_csv.end(), '\n') - 1);

  r = run({"eval", "-s", path("run/scores.csv"), "-l", path("data/test.csv"), "-o", path("run"),
           "-q", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const EvalReport report = report_from_json(read_text(dir_ / "run/report.json"));
  EXPECT_EQ(report.threshold_used, 0.1);
  ASSERT_TRUE(report.auroc.has_value());
  EXPECT_GT(*report.auroc, 0.5);
  EXPECT_TRUE(fs::exists(dir_ / "run/report.csv"));
}

TEST_F(CliTest, ZeroEpochsWritesInitialModel) {
  synth("data");
  ASSERT_EQ(run({"train", "-d", path("data/train.csv"), "-o", path("run"), "-E", "0",
                 "--seed", "4"}).code,
            0);
  const ModelFile m = load_model(dir_ / "run/model.json");
  EXPECT_EQ(m.model, init_ensemble(m.model.spec(), 3, 4));
}

TEST_F(CliTest, TrainIsByteIdentical) {
  synth("data");
  for (const char* out : {"a", "b"})
    ASSERT_EQ(run({"train", "-d", path("data/train.csv"), "-o", path(out), "-E", "2"}).code, 0);
  EXPECT_EQ(read_text(dir_ / "a/model.json"), read_text(dir_ / "b/model.json"));
  EXPECT_EQ(read_text(dir_ / "a/trace.csv"), read_text(dir_ / "b/trace.csv"));
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  synth("data");
  write_text(dir_ / "cfg.json",
             "{\"data\": {\"train\": \"" + path("data/train.csv") +
                 "\"}, \"members\": 4, \"train\": {\"epochs\": 1}}");
  ASSERT_EQ(run({"train", "-c", path("cfg.json"), "-I", "2", "-o", path("run")}).code, 0);
  const RunConfig echoed = RunConfig::load(dir_ / "run/config.json");
  EXPECT_EQ(echoed.members, 2u);
  EXPECT_EQ(echoed.epochs, 1u);
}

TEST_F(CliTest, ExitCodes) {
  synth("data");
  synth("other", 3);
  ASSERT_EQ(run({"train", "-d", path("data/train.csv"), "-o", path("run"), "-E", "1"}).code, 0);
  Result r = run({"score", "-m", path("run/model.json"), "-d", path("other/test.csv"), "-o",
                  path("x")});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("d=5"), std::string::npos);
  EXPECT_NE(r.err.find("d=3"), std::string::npos);
  EXPECT_EQ(run({"train", "-d", path("missing.csv"), "-o", path("x")}).code, kExitIo);
  EXPECT_EQ(run({"train", "-d", path("data/train.csv"), "-o", path("x"), "--optimizer", "sgd",
                 "--lr", "1e300"}).code,
            kExitNumeric);
  EXPECT_EQ(run({"train", "--no-such-flag"}).code, kExitConfig);
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  write_text(dir_ / "broken.json", "{\"format\": \"edeen-model\"");
  EXPECT_EQ(run({"score", "-m", path("broken.json"), "-d", path("data/test.csv"), "-o",
                 path("x")}).code,
            kExitIo);
}

TEST_F(CliTest, EmptyScoreSetGivesHeaderOnly) {
  synth("data");
  ASSERT_EQ(run({"train", "-d", path("data/train.csv"), "-o", path("run"), "-E", "1"}).code, 0);
  const std::string header = read_text(dir_ / "data/test.csv");
  write_text(dir_ / "empty.csv", header.substr(0, header.find('\n') + 1));
  ASSERT_EQ(run({"score", "-m", path("run/model.json"), "-d", path("empty.csv"), "-o",
                 path("run")}).code,
            0);
  EXPECT_EQ(read_text(dir_ / "run/scores.csv"), "row_index,raw_score,normalized_score\n");
}

TEST_F(CliTest, SingleClassEvalWarns) {
  synth("data", 5, 100, 0);
  ASSERT_EQ(run({"train", "-d", path("data/train.csv"), "-o", path("run"), "-E", "1"}).code, 0);
  ASSERT_EQ(run({"score", "-m", path("run/model.json"), "-d", path("data/test.csv"), "-o",
                 path("run")}).code,
            0);
  const Result r = run({"eval", "-s", path("run/scores.csv"), "-l", path("data/test.csv"), "-o",
                        path("run")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_FALSE(report_from_json(read_text(dir_ / "run/report.json")).auroc.has_value());
}

TEST_F(CliTest, MetaBuildFitSelect) {
  synth("t1", 4, 120, 15);
  synth("t2", 6, 100, 12);
  Result r = run({"meta", "build", "--task", path("t1/data.csv"), "--task", path("t2/data.csv"),
                  "--candidates", "1,3,5,7,10,15", "-E", "1", "--iterations", "2", "-o",
                  path("m")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_text(dir_ / "m/meta.csv");
  EXPECT_LE(std::count(csv.begin(), csv.end(), '\n') - 1, 12);
  ASSERT_EQ(run({"meta", "fit", "-o", path("m")}).code, 0);
  const std::string model = read_text(dir_ / "m/meta_model.json");
  ASSERT_EQ(run({"meta", "fit", "-o", path("m")}).code, 0);
  EXPECT_EQ(read_text(dir_ / "m/meta_model.json"), model);

  r = run({"meta", "select", "-o", path("m"), "-d", path("t1/data.csv"), "--candidates", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("chosen I=7"), std::string::npos);
  EXPECT_NE(r.out.find("I=7 predicted_auroc="), std::string::npos);
  r = run({"meta", "select", "-o", path("m"), "-d", path("t1/data.csv")});
  ASSERT_EQ(r.code, 0);
  const std::string first = r.out;
  EXPECT_EQ(run({"meta", "select", "-o", path("m"), "-d", path("t1/data.csv")}).out, first);

  write_text(dir_ / "nocand.json", "{\"candidates\": []}");
  EXPECT_EQ(run({"meta", "select", "-c", path("nocand.json"), "-o", path("m"), "-d",
                 path("t1/data.csv")}).code,
            kExitConfig);
}

TEST_F(CliTest, BenchTablesAndArtifacts) {
  synth("data", 4, 150, 30);
  Result r = run({"bench", "-d", path("data/data.csv"), "--seeds", "1,2", "-E", "2",
                  "--methods", "EDE_en,EDE", "-o", path("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string table = read_text(dir_ / "b/table.csv");
  const auto en = table.find("\nEDE_en,2,");
  const auto single = table.find("\nEDE,2,");
  ASSERT_NE(en, std::string::npos);
  ASSERT_NE(single, std::string::npos);
  EXPECT_LT(en, single);
  EXPECT_TRUE(fs::exists(dir_ / "b/plot.csv"));
  for (const char* seed : {"seed_1", "seed_2"})
    for (const char* m : {"EDE", "EDE_en"})
      EXPECT_TRUE(fs::exists(dir_ / "b" / seed / m / "report.json"));

  r = run({"bench", "-d", path("data/data.csv"), "--seeds", "5", "-E", "1", "-o", path("one")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string one = read_text(dir_ / "one/table.csv");
  EXPECT_NE(one.find(",,"), std::string::npos);
  EXPECT_EQ(one.back(), '\n');
  EXPECT_EQ(one[one.size() - 2], ',');
}

TEST_F(CliTest, BenchNamesFailingSeed) {
  synth("data", 4, 150, 30);
  const Result r = run({"bench", "-d", path("data/data.csv"), "--seeds", "1,2", "--optimizer",
                        "sgd", "--lr", "1e300", "-o", path("b")});
  EXPECT_EQ(r.code, kExitNumeric);
  EXPECT_NE(r.err.find("seed 1 failed"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "b/table.csv"));
}
