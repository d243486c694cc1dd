#include "crossfire/synthetic.h"

#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "crossfire/candidate_matrix.h"
#include "crossfire/error.h"
#include "crossfire/kernels.h"
#include "test_util.h"

namespace crossfire {
namespace {

using testing::MakeMutant;

HeapSlot Prim(const std::string& type, const std::string& value, bool nondet = false) {
  HeapSlot s;
  s.type_name = type;
  s.value = value;
  s.nondeterministic = nondet;
  return s;
}

HeapSlot Ref(int target) {
  HeapSlot s;
  s.kind = HeapSlot::Kind::kRef;
  s.target = target;
  return s;
}

// One test: var { items -> [x, cell], seed (nondeterministic) },
// cell { v }.
ScenarioPlan ListPlan() {
  ScenarioPlan plan;
  plan.manifest.tests = {"T"};
  plan.manifest.n_runs = 3;
  plan.manifest.mutants = {MakeMutant("m1", MutantStatus::kSurvived, {"T"}),
                           MakeMutant("m2", MutantStatus::kKilled, {"T"})};
  TestHeap heap;
  heap.test_id = "T";
  HeapObject root;
  root.type_name = "Box";
  root.slots = {{EdgeLabel::Field("items"), Ref(1)},
                {EdgeLabel::Field("seed"), Prim("long", "0", true)}};
  HeapObject list;
  list.collection = true;
  list.type_name = "ArrayList";
  list.slots = {{EdgeLabel::Index(0), Prim("int", "1")}, {EdgeLabel::Index(1), Ref(2)}};
  HeapObject cell;
  cell.type_name = "Cell";
  cell.slots = {{EdgeLabel::Field("v"), Prim("int", "5")}};
  heap.objects = {root, list, cell};
  heap.variables = {{testing::Local("var"), 0}};
  plan.heaps = {heap};
  return plan;
}

Planting Plant(int object, const EdgeLabel& label, PlantingKind kind,
               const std::string& value = "") {
  Planting p;
  p.mutant_id = "m1";
  p.test_id = "T";
  p.object = object;
  p.label = label;
  p.kind = kind;
  p.value = value;
  return p;
}

TEST(CheckPlanTest, PlantingBelowCollectionSizeChangeIsInfeasible) {
  ScenarioPlan plan = ListPlan();
  plan.plantings = {Plant(0, EdgeLabel::Field("items"), PlantingKind::kCollectionSize),
                    Plant(2, EdgeLabel::Field("v"), PlantingKind::kValue, "6")};
  try {
    CheckPlan(plan);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("infeasible plan"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("halting would hide it"), std::string::npos);
  }
}

TEST(CheckPlanTest, NondeterministicSiteNeedsMaskedFlag) {
  ScenarioPlan plan = ListPlan();
  plan.plantings = {Plant(0, EdgeLabel::Field("seed"), PlantingKind::kValue, "9")};
  EXPECT_THROW(CheckPlan(plan), ConfigError);
  plan.masked_infections = true;
  EXPECT_NO_THROW(CheckPlan(plan));
  const GroundTruth truth = ComputeTruth(plan);
  EXPECT_TRUE(truth.records.empty());
  EXPECT_EQ(truth.masked_plantings, 1);
}

TEST(CheckPlanTest, OtherInfeasibilities) {
  ScenarioPlan plan = ListPlan();
  plan.plantings = {Plant(2, EdgeLabel::Field("v"), PlantingKind::kValue, "6")};
  plan.plantings[0].mutant_id = "m2";
  EXPECT_THROW(CheckPlan(plan), ConfigError);  // killed mutant

  plan.plantings = {Plant(2, EdgeLabel::Field("v"), PlantingKind::kValue, "6"),
                    Plant(2, EdgeLabel::Field("v"), PlantingKind::kValue, "7")};
  EXPECT_THROW(CheckPlan(plan), ConfigError);  // slot planted twice

  plan.plantings = {Plant(2, EdgeLabel::Field("nope"), PlantingKind::kValue, "6")};
  EXPECT_THROW(CheckPlan(plan), ConfigError);  // no such slot

  plan.plantings = {Plant(2, EdgeLabel::Field("v"), PlantingKind::kValue, "5")};
  EXPECT_THROW(CheckPlan(plan), ConfigError);  // not a change

  plan.plantings = {Plant(2, EdgeLabel::Field("v"), PlantingKind::kValue, "6")};
  plan.heaps[0].test_id = "U";
  EXPECT_THROW(CheckPlan(plan), ConfigError);
}

TEST(CheckPlanTest, FeasibleStructuralPlanting) {
  ScenarioPlan plan = ListPlan();
  plan.plantings = {Plant(0, EdgeLabel::Field("items"), PlantingKind::kCollectionSize)};
  plan.plantings[0].size_delta = 1;
  ASSERT_NO_THROW(CheckPlan(plan));
  const GroundTruth truth = ComputeTruth(plan);
  ASSERT_EQ(truth.records.size(), 1u);
  EXPECT_EQ(truth.records[0].node_id, "var.items");
  EXPECT_EQ(truth.records[0].kind, DifferenceKind::kCollectionSize);
  EXPECT_EQ(truth.records[0].expected, "2");
  EXPECT_EQ(truth.records[0].observed, "3");
  // Dropping the trailing element would orphan the cell it references.
  plan.plantings[0].size_delta = -1;
  EXPECT_THROW(CheckPlan(plan), ConfigError);
}

TEST(ValidateSpecTest, RejectsBadSpecs) {
  EXPECT_NO_THROW(ValidateSpec(ScenarioSpec{}));
  ScenarioSpec s;
  s.n_tests = 0;
  EXPECT_THROW(ValidateSpec(s), ConfigError);
  s = {};
  s.infection_rate = 1.5;
  EXPECT_THROW(ValidateSpec(s), ConfigError);
  s = {};
  s.n_runs = 1;
  EXPECT_THROW(ValidateSpec(s), ConfigError);
  s = {};
  s.min_variables = 3;
  s.max_variables = 2;
  EXPECT_THROW(ValidateSpec(s), ConfigError);
  EXPECT_THROW(PlanScenario(s), ConfigError);
}

TEST(AccountExamplePlanTest, TruthHasTheExpectedStructure) {
  const ScenarioPlan plan = AccountExamplePlan();
  const GroundTruth truth = ComputeTruth(plan);
  EXPECT_EQ(truth.killable, (std::set<std::string>{"m1", "m2", "m3"}));
  std::set<std::string> m1_nodes;
  for (const InfectionRecord& r : truth.records) {
    if (r.mutant_id == "m1") m1_nodes.insert(r.node_id);
  }
  EXPECT_EQ(m1_nodes, (std::set<std::string>{"var1.f2", "var2.f4.f2"}));
  EXPECT_EQ(truth.records.size(), 8u);
  EXPECT_EQ(truth.masked_plantings, 0);
}

TEST(RealizeTest, OriginalRunsVaryOnlyAtNondeterministicSites) {
  const ScenarioPlan plan = AccountExamplePlan();
  const InMemoryCorpus corpus = Realize(plan);
  std::set<std::string> f6_values;
  for (int64_t r = 0; r < plan.manifest.n_runs; ++r) {
    const SnapshotPtr s = corpus.LoadOriginal(r, "Test1");
    EXPECT_TRUE(Validate(*s, plan.manifest).empty());
    const VariableGraph* g = s->FindVariable(testing::Local("var1"));
    ASSERT_NE(g, nullptr);
    f6_values.insert(*GraphView(*g).Find("var1.f6")->value);
    EXPECT_EQ(*GraphView(*g).Find("var1.f2")->value, "100");
  }
  EXPECT_GT(f6_values.size(), 1u);
  EXPECT_NO_THROW(corpus.LoadMutant("m3", "Test2"));
  EXPECT_THROW(corpus.LoadMutant("m4", "Test1"), IoError);
}

TEST(GenerateCorpusTest, SameSpecSameCorpus) {
  ScenarioSpec spec;
  spec.seed = 42;
  const GeneratedCorpus a = GenerateCorpus(spec);
  const GeneratedCorpus b = GenerateCorpus(spec);
  const auto sa = a.corpus.All();
  const auto sb = b.corpus.All();
  ASSERT_EQ(sa.size(), sb.size());
  for (size_t i = 0; i < sa.size(); ++i) EXPECT_EQ(Serialize(*sa[i]), Serialize(*sb[i]));
  EXPECT_EQ(SerializeTruth(a.truth), SerializeTruth(b.truth));
  EXPECT_EQ(ParseTruth(SerializeTruth(a.truth)).killable, a.truth.killable);
  spec.seed = 43;
  EXPECT_NE(SerializeTruth(GenerateCorpus(spec).truth), SerializeTruth(a.truth));
}

TEST(GenerateCorpusTest, ZeroInfectionsMeansNothingKillable) {
  ScenarioSpec spec;
  spec.infection_rate = 0.0;
  const GeneratedCorpus g = GenerateCorpus(spec);
  EXPECT_TRUE(g.plan.plantings.empty());
  const MaskBatch masks = BuildMasksSerial(g.corpus, {});
  const DiffBatch diff = DiffAllMutantsSerial(g.corpus, masks.mask);
  EXPECT_TRUE(diff.records.empty());
  EXPECT_TRUE(BuildMatrix(BuildCandidates(diff.records)).killable_mutants.empty());
}

// Soundness of the generator against the engine: the records the engine
// recovers from the realized snapshots are exactly the planted truth.
TEST(GenerateCorpusPropertyTest, EngineRecoversPlantedTruth) {
  int masked = 0;
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.n_runs = 4;
    spec.masked_infections = seed % 2 == 0;
    spec.nondeterminism_rate = 0.15;
    const GeneratedCorpus g = GenerateCorpus(spec);
    const MaskBatch masks = BuildMasksSerial(g.corpus, {});
    ASSERT_TRUE(masks.failures.empty());
    const DiffBatch diff = DiffAllMutantsSerial(g.corpus, masks.mask);
    ASSERT_TRUE(diff.failures.empty());
    EXPECT_EQ(diff.records, g.truth.records) << "seed " << seed;
    EXPECT_EQ(BuildMatrix(BuildCandidates(diff.records)).killable_mutants, g.truth.killable);
    masked += static_cast<int>(g.truth.masked_plantings);
  }
  EXPECT_GT(masked, 0);
}

TEST(WriteGeneratedTest, WritesCorpusAndTruth) {
  const std::filesystem::path dir = testing::ScratchDir("synthetic-write");
  GeneratedCorpus g;
  g.plan = AccountExamplePlan();
  g.truth = ComputeTruth(g.plan);
  g.corpus = Realize(g.plan);
  WriteGenerated(g, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  EXPECT_EQ(ParseTruth(ReadFile(dir / "truth.json")).records, g.truth.records);
  const DirectoryCorpus disk(dir);
  EXPECT_EQ(*disk.LoadMutant("m1", "Test1"), *g.corpus.LoadMutant("m1", "Test1"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace crossfire
