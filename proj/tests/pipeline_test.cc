#include "crossfire/pipeline.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "crossfire/corpus.h"
#include "crossfire/error.h"
#include "crossfire/synthetic.h"
#include "test_util.h"

namespace crossfire {
namespace {

namespace fs = std::filesystem;

fs::path WriteAccountExample(const std::string& name) {
  const fs::path root = testing::ScratchDir(name);
  GeneratedCorpus g;
  g.plan = AccountExamplePlan();
  g.truth = ComputeTruth(g.plan);
  g.corpus = Realize(g.plan);
  WriteGenerated(g, root);
  WriteFile(root / kKillsFile, AccountExampleKillsJsonl());
  WriteFile(root / kInventoryFile, AccountExampleInventoryJson());
  return root;
}

// Relative path -> bytes for every file under `dir`.
std::map<std::string, std::string> ReadTree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = ReadFile(e.path());
  }
  return out;
}

RunConfig ConfigFor(const fs::path& corpus, const fs::path& out, int jobs = 0) {
  RunConfig c;
  c.corpus = corpus;
  c.out = out;
  c.repeats = 10;
  c.seed = 3;
  c.jobs = jobs;
  return c;
}

TEST(PipelineTest, AccountExampleEndToEnd) {
  const fs::path root = WriteAccountExample("pipeline-account");
  Pipeline p(ConfigFor(root, root / "out"));
  p.Run();
  EXPECT_EQ(p.partial_failures(), 0);
  EXPECT_EQ(ParseRecordsJsonl(ReadFile(root / "out" / "records.jsonl")),
            ComputeTruth(AccountExamplePlan()).records);

  const std::string md = ReadFile(root / "out" / "report.md");
  EXPECT_NE(md.find("3/3 (100%)"), std::string::npos) << md;
  EXPECT_NE(md.find("assert var1.f2 equals"), std::string::npos) << md;

  // Test-greedy settles on Test1 alone in every run.
  const SelectionReport sel = p.Select();
  bool saw_test_greedy = false;
  for (const AggregatedSelection& a : sel.strategies) {
    if (a.strategy != Strategy::kTestGreedy) continue;
    saw_test_greedy = true;
    EXPECT_EQ(a.mean_tests, Rational::Integer(1));
  }
  EXPECT_TRUE(saw_test_greedy);

  // The f2 suggestion kills m1 and m2 together.
  const std::string jsonl = ReadFile(root / "out" / "suggestions.jsonl");
  EXPECT_NE(jsonl.find(R"("mutant_id":"m1","node_id":"var1.f2")"), std::string::npos)
      << jsonl;

  EXPECT_EQ(ReadFile(root / "out" / "capability-grid.csv"),
            "test_id,test_kills,n_assertions,a0,a1\n"
            "Test1,2,2,0,2\n"
            "Test2,2,1,1,\n");
}

TEST(PipelineTest, SecondRunHitsCache) {
  const fs::path root = WriteAccountExample("pipeline-cache");
  Pipeline(ConfigFor(root, root / "out")).Run();
  const auto first = ReadTree(root / "out");

  Pipeline again(ConfigFor(root, root / "out"));
  again.Run();
  EXPECT_EQ(again.cache_hits(),
            (std::vector<std::string>{"baseline", "diff", "matrix", "select"}));
  EXPECT_EQ(ReadTree(root / "out"), first);

  RunConfig reseeded = ConfigFor(root, root / "out");
  reseeded.seed = 4;
  Pipeline third(reseeded);
  third.Run();
  EXPECT_EQ(third.cache_hits(), (std::vector<std::string>{"baseline", "diff", "matrix"}));
}

TEST(PipelineTest, ArtifactsIdenticalAcrossJobCounts) {
  ScenarioSpec spec;
  spec.seed = 17;
  spec.n_tests = 5;
  spec.n_mutants = 30;
  spec.n_runs = 4;
  const fs::path root = testing::ScratchDir("pipeline-jobs");
  WriteGenerated(GenerateCorpus(spec), root);
  Pipeline(ConfigFor(root, root / "serial", 1)).Run();
  Pipeline(ConfigFor(root, root / "parallel", 0)).Run();
  Pipeline(ConfigFor(root, root / "parallel4", 4)).Run();
  const auto serial = ReadTree(root / "serial");
  EXPECT_EQ(ReadTree(root / "parallel"), serial);
  EXPECT_EQ(ReadTree(root / "parallel4"), serial);
}

TEST(PipelineTest, ValidateCorpus) {
  const fs::path root = WriteAccountExample("pipeline-validate");
  EXPECT_TRUE(ValidateCorpus(root).empty());

  WriteFile(OriginalSnapshotPath(root, 0, "Test1"), "{\"test_id\": ]");
  fs::remove(MutantSnapshotPath(root, "m2", "Test2"));
  const std::vector<Violation> v = ValidateCorpus(root);
  EXPECT_GE(v.size(), 2u);

  EXPECT_THROW(ValidateCorpus(testing::ScratchDir("pipeline-empty")), IoError);
}

TEST(PipelineTest, RejectedKillsFailTheReport) {
  const fs::path root = WriteAccountExample("pipeline-badkills");
  WriteFile(root / kKillsFile,
            AccountExampleKillsJsonl() +
                R"({"assertion_id":{"line":14,"ordinal":1,"test_id":"Test1"},)"
                R"("failure_kind":"assertion","mutant_id":"m1","test_id":"Test1"})" "\n");
  Pipeline p(ConfigFor(root, root / "out"));
  EXPECT_THROW(p.Report(), ValidationError);
}

TEST(PipelineTest, ConfigErrors) {
  RunConfig c;
  c.corpus = "x";
  c.repeats = 0;
  EXPECT_THROW(Pipeline{c}, ConfigError);
}

}  // namespace
}  // namespace crossfire
