#ifndef CROSSFIRE_CANDIDATE_MATRIX_H_
#define CROSSFIRE_CANDIDATE_MATRIX_H_

// Assertion candidates and the candidate -> killed-mutants matrix.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossfire/infection_diff.h"
#include "crossfire/rational.h"
#include "crossfire/snapshot.h"

namespace crossfire {

enum class AssertionKind {
  kValueEquality,    // from value differences
  kNullCheck,        // from nullness differences
  kTypeCheck,        // from type / aliasing differences
  kSizeCheck,        // from collection-size differences
  kStructureCheck,   // from missing-structure differences
};

std::string_view AssertionKindName(AssertionKind kind);
std::optional<AssertionKind> ParseAssertionKind(std::string_view name);
AssertionKind AssertionKindFor(DifferenceKind kind);

struct AssertionCandidate {
  std::string candidate_id;
  std::string test_id;
  RootVariable variable;
  std::string node_id;
  int depth = 1;
  AssertionKind kind = AssertionKind::kValueEquality;
  std::string expected;
  // Killed mutant -> its polluted value at this node. Keys are the kill set.
  std::map<std::string, std::string> observed_by_mutant;

  std::vector<std::string> Kills() const;
  bool Kills(const std::string& mutant_id) const {
    return observed_by_mutant.contains(mutant_id);
  }

  bool operator==(const AssertionCandidate&) const = default;
};

using VariableKey = std::pair<std::string, RootVariable>;  // (test_id, variable)

struct CandidateMatrix {
  // Sorted by (test_id, variable, node_id, kind, expected).
  std::vector<AssertionCandidate> candidates;
  // Index lists into `candidates`, ascending.
  std::map<VariableKey, std::vector<size_t>> by_variable;
  std::map<std::string, std::vector<size_t>> by_test;
  std::set<std::string> killable_mutants;

  bool operator==(const CandidateMatrix&) const = default;
};

// Stable id: "c" + 16 hex digits of FNV-1a over the grouping key.
std::string CandidateId(const std::string& test_id, const RootVariable& variable,
                        const std::string& node_id, AssertionKind kind,
                        const std::string& expected);

// Groups records by (test, variable, node, assertion kind, expected). Mutants
// with different polluted values at one location share a candidate, since an
// equality assertion on the expected value fails for any deviation.
// Throws DataIntegrityError if one (test, variable, node, kind) carries two
// expected values: that cannot happen for a deterministic location.
std::vector<AssertionCandidate> BuildCandidates(
    const std::vector<InfectionRecord>& records);

CandidateMatrix BuildMatrix(std::vector<AssertionCandidate> candidates);

struct KillableStats {
  int64_t killable = 0;
  int64_t surviving = 0;
  Rational killable_ratio;  // killable / surviving; 0 when nothing survived

  // Per killable mutant: distinct candidates, (test, variable) pairs,
  // variables ignoring the test, and tests that can kill it.
  bool averages_defined = false;
  Rational avg_assertions;
  Rational avg_variables;
  Rational avg_variables_global;
  Rational avg_tests;

  // Over the whole matrix.
  int64_t total_assertions = 0;
  int64_t total_variables = 0;
  int64_t total_variables_global = 0;
  int64_t total_tests = 0;
  // Mean candidate access-path depth.
  Rational avg_depth;

  bool operator==(const KillableStats&) const = default;
};

KillableStats ComputeKillableStats(const CandidateMatrix& matrix,
                                   const MutantManifest& manifest);

std::string SerializeMatrix(const CandidateMatrix& matrix);
CandidateMatrix ParseMatrix(std::string_view bytes);
std::string SerializeStats(const KillableStats& stats);

}  // namespace crossfire

#endif  // CROSSFIRE_CANDIDATE_MATRIX_H_
