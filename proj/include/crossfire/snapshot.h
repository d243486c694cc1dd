#ifndef CROSSFIRE_SNAPSHOT_H_
#define CROSSFIRE_SNAPSHOT_H_

// End-of-test memory snapshots, the mutant manifest, and their canonical
// JSON encoding.
//
// Canonical JSON: object keys sorted by code point, no insignificant
// whitespace, primitives carried as strings. Two snapshots are equal iff
// their serializations are byte-identical.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crossfire/graph.h"

namespace crossfire {

inline constexpr std::string_view kOriginalVersion = "original";

enum class TestOutcome { kPass, kFail };

struct TestRunSnapshot {
  std::string program_version;  // "original" or a mutant id
  int64_t run_index = 0;
  std::string test_id;
  std::vector<VariableGraph> variables;
  // Optional on disk; omitted when kPass. Used to reject flaky tests.
  TestOutcome outcome = TestOutcome::kPass;

  bool is_original() const { return program_version == kOriginalVersion; }
  const VariableGraph* FindVariable(const RootVariable& v) const;

  bool operator==(const TestRunSnapshot&) const = default;
};

enum class MutantStatus { kKilled, kSurvived };

struct MutantEntry {
  std::string mutant_id;
  std::string location;
  std::string mutation_operator;
  MutantStatus status = MutantStatus::kSurvived;
  std::vector<std::string> covering_tests;

  bool operator==(const MutantEntry&) const = default;
};

struct MutantManifest {
  std::vector<MutantEntry> mutants;
  std::vector<std::string> tests;
  int64_t n_runs = 10;

  const MutantEntry* FindMutant(std::string_view id) const;
  bool HasTest(std::string_view id) const;
  std::vector<std::string> SurvivingMutants() const;

  bool operator==(const MutantManifest&) const = default;
};

// Sorts variables by RootVariable so a snapshot has one canonical layout.
void SortVariables(TestRunSnapshot* snapshot);

std::string Serialize(const TestRunSnapshot& snapshot);
// Throws ParseError (byte offset) on bad JSON and ValidationError (field
// path) on schema violations, including a collection whose size differs
// from its number of index edges.
TestRunSnapshot ParseSnapshot(std::string_view bytes);

std::string SerializeManifest(const MutantManifest& manifest);
MutantManifest ParseManifest(std::string_view bytes);

// Serialization of one variable graph on its own, as embedded in snapshots.
std::string SerializeGraph(const VariableGraph& graph);

struct Violation {
  std::string where;    // e.g. "variables[1].edges" or "test_id"
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Checks every data-model invariant plus manifest membership of test_id and
// program_version. Violations are data; this never throws.
std::vector<Violation> Validate(const TestRunSnapshot& snapshot,
                                const MutantManifest& manifest);
std::vector<Violation> ValidateManifest(const MutantManifest& manifest);

}  // namespace crossfire

#endif  // CROSSFIRE_SNAPSHOT_H_
