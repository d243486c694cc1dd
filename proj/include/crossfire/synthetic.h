#ifndef CROSSFIRE_SYNTHETIC_H_
#define CROSSFIRE_SYNTHETIC_H_

// Ground-truth corpora for testing the pipeline.
//
// A scenario is a small heap model per test (objects, collections and
// primitive slots, with aliasing between variables and diamonds inside
// them), a set of nondeterministic sites, and per-mutant plantings that edit
// the heap. Realizing a plan yields N original runs plus one run per
// (surviving mutant, covering test). The expected infection records are
// computed from the heap model itself, not by running the pipeline.

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "crossfire/corpus.h"
#include "crossfire/graph.h"
#include "crossfire/infection_diff.h"
#include "crossfire/snapshot.h"

namespace crossfire {

struct HeapSlot {
  enum class Kind { kPrimitive, kNull, kRef };
  Kind kind = Kind::kPrimitive;
  std::string type_name;  // primitives and nulls; refs take the target's
  std::string value;      // kPrimitive
  int target = -1;        // kRef: index into TestHeap::objects
  bool nondeterministic = false;  // kPrimitive only: varies across runs
};

struct HeapObject {
  bool collection = false;
  std::string type_name;
  // Field labels for objects; indices 0..n-1 for collections.
  std::vector<std::pair<EdgeLabel, HeapSlot>> slots;
  // Collections only: extra trailing primitive elements vary across runs.
  bool size_varies = false;

  const HeapSlot* FindSlot(const EdgeLabel& label) const;
  HeapSlot* FindSlot(const EdgeLabel& label);
};

struct HeapVariable {
  RootVariable variable;
  int object = 0;
};

struct TestHeap {
  std::string test_id;
  std::vector<HeapObject> objects;
  std::vector<HeapVariable> variables;
};

enum class PlantingKind { kValue, kNullness, kCollectionSize, kType };

// A mutant's edit to one slot of one test's heap.
struct Planting {
  std::string mutant_id;
  std::string test_id;
  int object = 0;
  EdgeLabel label;
  PlantingKind kind = PlantingKind::kValue;
  // kValue: the polluted primitive value. kType: the new type name.
  std::string value;
  // kCollectionSize: +1 appends a primitive, -1 drops the last element.
  int size_delta = 1;
};

struct ScenarioPlan {
  uint64_t seed = 0;  // drives nondeterministic values only
  MutantManifest manifest;
  std::vector<TestHeap> heaps;  // one per manifest test, same order
  std::vector<Planting> plantings;
  // Plantings on nondeterministic sites are allowed (and expected to vanish).
  bool masked_infections = false;
};

struct ScenarioSpec {
  uint64_t seed = 1;
  int n_tests = 4;
  int min_variables = 1;
  int max_variables = 4;
  int max_depth = 4;       // root = 1
  int max_fanout = 4;
  int max_collection = 4;
  int n_mutants = 20;
  double surviving_fraction = 0.6;
  double infection_rate = 0.7;  // share of surviving mutants with plantings
  int max_plantings = 3;        // per infected mutant
  int max_covering_tests = 3;
  double nondeterminism_rate = 0.1;
  double alias_rate = 0.15;     // variable bound to another's root object
  double subalias_rate = 0.2;   // variable holding a field into another's tree
  double diamond_rate = 0.1;    // extra in-tree references
  double structural_rate = 0.3; // plantings that are nullness/size/type
  // Distinct planting sites per test; 0 means unlimited. Small pools force
  // mutants to share locations.
  int site_pool = 0;
  bool masked_infections = false;
  int64_t n_runs = 10;
};

// Throws ConfigError naming the first violated constraint.
void ValidateSpec(const ScenarioSpec& spec);

// Throws ConfigError if a planting is not applicable to its slot, lies below
// another nullness/size/type planting of the same mutant and test, or sits on
// a nondeterministic site while masked_infections is off; or if a
// nullness/size/type planting's subtree is shared with the rest of the heap.
void CheckPlan(const ScenarioPlan& plan);

struct GroundTruth {
  std::vector<InfectionRecord> records;  // RecordLess order
  std::set<std::string> killable;
  int64_t masked_plantings = 0;  // plantings that produce no record anywhere
};

GroundTruth ComputeTruth(const ScenarioPlan& plan);

// Original runs 0..n_runs-1 and one run per (surviving mutant, covering test).
InMemoryCorpus Realize(const ScenarioPlan& plan);

ScenarioPlan PlanScenario(const ScenarioSpec& spec);

struct GeneratedCorpus {
  ScenarioPlan plan;
  InMemoryCorpus corpus;
  GroundTruth truth;
};

GeneratedCorpus GenerateCorpus(const ScenarioSpec& spec);

// Two tests; Test1 has var1 {f2, f3, f6} and var2 {f4 -> var1's object, f5},
// Test2 has var3 {f7, f8}. f6 is a hash-code style nondeterministic leaf.
// Surviving m1 and m2 infect f2, m3 infects f3; m2 and m3 also infect f8.
// m4..m7 are killed.
ScenarioPlan AccountExamplePlan();

// Kill attribution for AccountExamplePlan's killed mutants: Test1's assertion on
// var2.f5 kills m4 and m5, Test2 kills m6 by assertion and m7 by a crash.
std::string AccountExampleKillsJsonl();
// Two assertions in Test1 (one of them never kills) and one in Test2.
std::string AccountExampleInventoryJson();

std::string SerializeTruth(const GroundTruth& truth);
GroundTruth ParseTruth(std::string_view bytes);

// Writes the corpus and truth.json under `root`.
void WriteGenerated(const GeneratedCorpus& generated, const std::filesystem::path& root);

}  // namespace crossfire

#endif  // CROSSFIRE_SYNTHETIC_H_
