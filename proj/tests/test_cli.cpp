#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "montage/corpus.hpp"
#include "montage/eval.hpp"
#include "montage/prompts.hpp"
#include "scripted_run.hpp"
#include "temp_dir.hpp"

using namespace montage;
using namespace montage::testing;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    for (const char* name : {"ALIGN_BACKEND", "ALIGN_MODEL", "ALIGN_SEED", "ALIGN_JOBS"}) ::unsetenv(name);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  const ScriptedRun& scripted() {
    if (!scripted_) scripted_ = prepare_scripted_run(dir_.path(), 10, 5, 1234);
    return *scripted_;
  }

  Outcome build(const std::string& out, const std::string& jobs = "1") {
    return run_cli({"build-dataset", "--seeds", scripted().seeds.string(), "--out", path(out),
                    "--backend", "scripted:" + scripted().build_fixture.string(), "--seed", "1234",
                    "--jobs", jobs});
  }

  TempDir dir_;
  std::optional<ScriptedRun> scripted_;
};

}  // namespace

TEST_F(CliTest, BuildDatasetFromScriptedBackend) {
  const Outcome r = build("data.jsonl");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_instances(path("data.jsonl")).size(), 10u);
  EXPECT_EQ(read_text_file(path("data.failures.jsonl")), "");
  EXPECT_NE(r.out.find("instances: 10"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("failures: 0"), std::string::npos);
  EXPECT_NE(r.out.find("events per instance"), std::string::npos);
}

TEST_F(CliTest, BuildDatasetIsByteIdentical) {
  ASSERT_EQ(build("a.jsonl").code, 0);
  ASSERT_EQ(build("b.jsonl", "4").code, 0);
  EXPECT_EQ(read_text_file(path("a.jsonl")), read_text_file(path("b.jsonl")));
  EXPECT_EQ(read_text_file(path("a.failures.jsonl")), read_text_file(path("b.failures.jsonl")));
}

TEST_F(CliTest, WrongSeedMissesTheFixture) {
  const Outcome r = run_cli({"build-dataset", "--seeds", scripted().seeds.string(), "--out",
                             path("x.jsonl"), "--backend",
                             "scripted:" + scripted().build_fixture.string(), "--seed", "99"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(read_instances(path("x.jsonl")).empty());
  EXPECT_NE(r.out.find("NoScriptedResponse: 10"), std::string::npos) << r.out;
}

TEST_F(CliTest, FourEventSeedIsRecordedFailure) {
  write_text_file(path("one.jsonl"),
                  "{\"id\":\"s4\",\"source\":\"src\",\"summary\":\"four events\",\"origin\":\"x\"}\n");
  ScriptedBackend b;
  b.add(prompts::decompose_events().render({{"Paragraph", "four events"}}), "- a\n- b\n- c\n- d");
  RecordingBackend rec(b);
  ask(rec, prompts::decompose_events().render({{"Paragraph", "four events"}}));
  rec.write_fixture(path("fx.jsonl"));
  const Outcome r = run_cli({"build-dataset", "--seeds", path("one.jsonl"), "--out", path("o.jsonl"),
                             "--backend", "scripted:" + path("fx.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(read_instances(path("o.jsonl")).empty());
  const std::string failures = read_text_file(path("o.failures.jsonl"));
  EXPECT_NE(failures.find("\"seed_id\":\"s4\""), std::string::npos);
  EXPECT_NE(failures.find("TooFewEvents: 4"), std::string::npos);
  EXPECT_NE(failures.find("\"stage\":\"decompose\""), std::string::npos);
}

TEST_F(CliTest, ScoreAllCorrect) {
  ASSERT_EQ(build("data.jsonl").code, 0);
  const auto inst = read_instances(path("data.jsonl"))[0];
  write_text_file(path("src.txt"), inst.source);
  write_text_file(path("tgt.txt"), inst.correct);
  const std::string backend = "scripted:" + scripted().eval_fixture.string();
  const Outcome r = run_cli({"score", "--source", path("src.txt"), "--target", path("tgt.txt"),
                             "--backend", backend});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("{\n  \"score\": 1.0,", 0), 0u) << r.out;
  EXPECT_EQ(r.out.find("\"audit\""), std::string::npos);

  const Outcome verbose = run_cli({"score", "--source", path("src.txt"), "--target", path("tgt.txt"),
                                   "--backend", backend, "--verbose"});
  ASSERT_EQ(verbose.code, 0);
  EXPECT_NE(verbose.out.find("\"sort:source\""), std::string::npos);
  EXPECT_EQ(verbose.out.find("\"sort:target\""), std::string::npos);

  const Outcome two = run_cli({"score", "--source", path("src.txt"), "--target", path("tgt.txt"),
                               "--backend", backend, "--verbose", "--two-call-sorter"});
  ASSERT_EQ(two.code, 0) << two.err;
  EXPECT_NE(two.out.find("\"sort:target\""), std::string::npos);
}

TEST_F(CliTest, ScoreEmptyTargetIsUsageError) {
  write_text_file(path("src.txt"), "something");
  write_text_file(path("tgt.txt"), "  \n");
  const Outcome r = run_cli({"score", "--source", path("src.txt"), "--target", path("tgt.txt"),
                             "--backend", "scripted:" + path("none.jsonl")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("empty"), std::string::npos);
}

TEST_F(CliTest, ScoreMissingResponseIsRuntimeFailureWithStage) {
  write_text_file(path("src.txt"), "something");
  write_text_file(path("tgt.txt"), "else");
  write_text_file(path("empty.jsonl"), "");
  const Outcome r = run_cli({"score", "--source", path("src.txt"), "--target", path("tgt.txt"),
                             "--backend", "scripted:" + path("empty.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("[decompose] NoScriptedResponse"), std::string::npos) << r.err;
}

TEST_F(CliTest, EvaluateOracleConstantAndDoveScore) {
  ASSERT_EQ(build("data.jsonl").code, 0);
  const Outcome oracle = run_cli({"evaluate", "--dataset", path("data.jsonl"), "--evaluator",
                                  "oracle", "--out", path("oracle.json")});
  ASSERT_EQ(oracle.code, 0) << oracle.err;
  EXPECT_EQ(read_report(path("oracle.json")).average_auc, 1.0);
  EXPECT_EQ(read_scores(path("oracle.scores.jsonl")).size(), 50u);

  const Outcome constant = run_cli({"evaluate", "--dataset", path("data.jsonl"), "--evaluator",
                                    "constant", "--out", path("constant.json")});
  ASSERT_EQ(constant.code, 0);
  EXPECT_EQ(read_report(path("constant.json")).average_auc, 0.5);

  const Outcome dove = run_cli({"evaluate", "--dataset", path("data.jsonl"), "--evaluator",
                                "dovescore", "--out", path("dove.json"), "--include-paraphrases",
                                "--backend", "scripted:" + scripted().eval_fixture.string(),
                                "--jobs", "3"});
  ASSERT_EQ(dove.code, 0) << dove.err;
  const EvaluationReport report = read_report(path("dove.json"));
  EXPECT_EQ(report.evaluator_name, "dovescore");
  EXPECT_TRUE(report.include_paraphrases);
  EXPECT_EQ(report.per_difficulty_auc[Difficulty::easy], 1.0);
  EXPECT_TRUE(report.exclusions.empty());

  const Outcome coarse = run_cli({"evaluate", "--dataset", path("data.jsonl"), "--evaluator",
                                  "coarse-llm", "--out", path("coarse.json"), "--backend",
                                  "scripted:" + scripted().eval_fixture.string()});
  ASSERT_EQ(coarse.code, 0) << coarse.err;
  EXPECT_EQ(read_report(path("coarse.json")).average_auc, 0.5);
}

TEST_F(CliTest, EvaluateUnknownEvaluator) {
  ASSERT_EQ(build("data.jsonl").code, 0);
  const Outcome r = run_cli({"evaluate", "--dataset", path("data.jsonl"), "--evaluator", "rouge",
                             "--out", path("r.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("dovescore, coarse-llm, oracle, constant"), std::string::npos) << r.err;
}

TEST_F(CliTest, EvaluateNeedsBackendForModelEvaluators) {
  ASSERT_EQ(build("data.jsonl").code, 0);
  const Outcome r = run_cli({"evaluate", "--dataset", path("data.jsonl"), "--evaluator",
                             "dovescore", "--out", path("r.json")});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, EvaluateMissingDatasetIsRuntimeFailure) {
  const Outcome r = run_cli({"evaluate", "--dataset", path("nope.jsonl"), "--evaluator", "oracle",
                             "--out", path("r.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("IoFailure"), std::string::npos) << r.err;
}

TEST_F(CliTest, ReportReaggregatesScores) {
  ASSERT_EQ(build("data.jsonl").code, 0);
  ASSERT_EQ(run_cli({"evaluate", "--dataset", path("data.jsonl"), "--evaluator", "dovescore",
                     "--out", path("dove.json"), "--backend",
                     "scripted:" + scripted().eval_fixture.string(), "--seed", "7"})
                .code,
            0);
  const Outcome r = run_cli({"report", "--scores", path("dove.scores.jsonl"), "--name", "dovescore",
                             "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_text_file(path("dove.json")));
}

TEST_F(CliTest, ConfigPrecedence) {
  ASSERT_EQ(build("data.jsonl").code, 0);
  ASSERT_EQ(run_cli({"evaluate", "--dataset", path("data.jsonl"), "--evaluator", "oracle", "--out",
                     path("o.json")})
                .code,
            0);
  write_text_file(path("cfg.json"), "{\"seed\": 11, \"jobs\": 2}");
  auto seed_of = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"--config", path("cfg.json"), "report", "--scores",
                                  path("o.scores.jsonl")};
    args.insert(args.end(), extra.begin(), extra.end());
    const Outcome r = run_cli(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return parse_report(r.out).master_seed;
  };
  EXPECT_EQ(seed_of({}), 11u);
  ::setenv("ALIGN_SEED", "22", 1);
  EXPECT_EQ(seed_of({}), 22u);
  EXPECT_EQ(seed_of({"--seed", "33"}), 33u);
  ::unsetenv("ALIGN_SEED");

  write_text_file(path("secret.json"), "{\"api_key\": \"sk-nope\"}");
  EXPECT_EQ(run_cli({"--config", path("secret.json"), "report", "--scores", path("o.scores.jsonl")}).code,
            2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"build-dataset", "--seeds", "x"}).code, 2);
  EXPECT_EQ(run_cli({"report", "--scores", "x", "--seed", "-4"}).code, 2);
  EXPECT_EQ(run_cli({"report", "--scores", "x", "--seed", "12abc"}).code, 2);
  EXPECT_EQ(run_cli({"build-dataset", "--seeds", "s", "--out", "o", "--backend", "ftp://x"}).code, 2);
  const Outcome help = run_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("build-dataset"), std::string::npos);
}

TEST_F(CliTest, BinaryEndToEnd) {
  const std::string cmd = std::string(MONTAGE_CLI_PATH) + " build-dataset --seeds " +
                          scripted().seeds.string() + " --out " + path("bin.jsonl") +
                          " --backend scripted:" + scripted().build_fixture.string() +
                          " --seed 1234 > " + path("stdout.txt");
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  ASSERT_EQ(build("lib.jsonl").code, 0);
  EXPECT_EQ(read_text_file(path("bin.jsonl")), read_text_file(path("lib.jsonl")));
}
