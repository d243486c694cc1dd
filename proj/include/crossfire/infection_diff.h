#ifndef CROSSFIRE_INFECTION_DIFF_H_
#define CROSSFIRE_INFECTION_DIFF_H_

// Halting BFS comparison of original vs. mutant variable graphs.
//
// The first difference found along a path is recorded and nothing below it
// is compared. Nondeterministic locations and their subtrees are skipped.

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossfire/corpus.h"
#include "crossfire/determinism.h"
#include "crossfire/graph.h"
#include "crossfire/snapshot.h"

namespace crossfire {

enum class DifferenceKind {
  kValue,
  kNullness,
  kType,
  kCollectionSize,
  kMissingStructure,
};

std::string_view DifferenceKindName(DifferenceKind kind);
std::optional<DifferenceKind> ParseDifferenceKind(std::string_view name);

// Rendering of absent locations in `observed`.
inline constexpr std::string_view kAbsent = "<absent>";

// One difference inside one variable graph, before it is attributed to a
// mutant and test.
struct GraphDifference {
  std::string node_id;
  int depth = 1;
  DifferenceKind kind = DifferenceKind::kValue;
  std::string expected;
  std::string observed;
  // Same node kind, only the dynamic type name changed. Still kType.
  bool type_only = false;

  bool operator==(const GraphDifference&) const = default;
};

struct InfectionRecord {
  std::string mutant_id;
  std::string test_id;
  RootVariable variable;
  std::string node_id;
  int depth = 1;
  DifferenceKind kind = DifferenceKind::kValue;
  std::string expected;
  std::string observed;
  bool type_only = false;

  bool operator==(const InfectionRecord&) const = default;
};

// (mutant_id, test_id, variable, node_id) order.
bool RecordLess(const InfectionRecord& a, const InfectionRecord& b);
void SortRecords(std::vector<InfectionRecord>* records);

// Compares two canonical graphs of the same root variable.
// Throws InputError when the variables differ or a graph is not canonical.
std::vector<GraphDifference> DiffGraphs(const VariableGraph& original,
                                        const VariableGraph& mutant,
                                        const VariableMask& mask);

using GraphDiffer = std::function<std::vector<GraphDifference>(
    const VariableGraph&, const VariableGraph&, const VariableMask&)>;

// Per-variable diff of one mutant test run against the reference original
// run (run 0). Variables whose (original hash, mutant hash, mask digest)
// triple was already compared in this run are not compared again; the
// earlier result is replayed under the alias's root. Variables never seen in
// an original run are skipped and described in `notices`.
std::vector<InfectionRecord> DiffTestRun(
    const TestRunSnapshot& reference, const TestRunSnapshot& mutant_run,
    const DeterminismMask& mask, std::vector<std::string>* notices = nullptr,
    const GraphDiffer& differ = DiffGraphs);

struct DiffFailure {
  std::string mutant_id;
  std::string test_id;
  std::string message;

  bool operator==(const DiffFailure&) const = default;
};

struct MutantDiff {
  std::vector<InfectionRecord> records;
  std::vector<DiffFailure> failures;
  std::vector<std::string> notices;
};

// Reference runs by test id; DiffMutant never loads originals itself.
using ReferenceRuns = std::map<std::string, SnapshotPtr>;

// Diffs every covering test of a surviving mutant. A test whose snapshot is
// missing or unreadable becomes a DiffFailure; the others still run.
// Throws InputError if the mutant is not marked survived.
MutantDiff DiffMutant(const MutantEntry& mutant, const CorpusReader& corpus,
                      const ReferenceRuns& references, const DeterminismMask& mask);

// Canonical JSON, one record per line, in RecordLess order.
std::string SerializeRecordsJsonl(const std::vector<InfectionRecord>& records);
std::vector<InfectionRecord> ParseRecordsJsonl(std::string_view text);

}  // namespace crossfire

#endif  // CROSSFIRE_INFECTION_DIFF_H_
