#ifndef CROSSFIRE_DETERMINISM_H_
#define CROSSFIRE_DETERMINISM_H_

// Classifies every observed node location as deterministic (identical in all
// N unmutated runs) or nondeterministic. Only deterministic locations can
// carry an assertion's expected value.

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crossfire/snapshot.h"

namespace crossfire {

struct VariableMask {
  std::set<std::string> deterministic;
  std::set<std::string> nondeterministic;
  // Digest of both sets with root-relative ids. Equal digests mean two
  // aliased variables mask the same relative locations.
  uint64_t relative_digest = 0;

  bool operator==(const VariableMask&) const = default;
};

using MaskKey = std::pair<std::string, RootVariable>;  // (test_id, variable)

struct DeterminismMask {
  std::map<MaskKey, VariableMask> entries;
  int64_t n_runs_observed = 0;

  // Throws LookupError when (test_id, variable) was never built.
  const VariableMask& Slice(const std::string& test_id,
                            const RootVariable& variable) const;
  const VariableMask* FindSlice(const std::string& test_id,
                                const RootVariable& variable) const;

  // Adds another test's entries. Both masks must agree on n_runs_observed.
  void Merge(DeterminismMask other);

  bool operator==(const DeterminismMask&) const = default;
};

struct MaskOptions {
  // Nodes whose type_name is listed here, with their subtrees, are treated
  // as nondeterministic (never asserted), e.g. thread or logger state.
  std::set<std::string> excluded_types;
};

// Builds the mask for one test from its N >= 2 original runs.
//
// A node is deterministic iff it is present in every run with identical kind,
// type, value, size and ref target. Value-only disagreement marks just that
// node. Structural disagreement (absent in some run, kind/type/size mismatch)
// marks the node and every path-descendant. Variables missing from some run
// are nondeterministic throughout.
//
// Throws ConfigError for N < 2 and InputError for mixed test ids, non-original
// snapshots, or a pass/fail disagreement between runs (flaky test).
DeterminismMask BuildMask(std::span<const TestRunSnapshot> runs,
                          const MaskOptions& options = {});

// False for nondeterministic or never-observed ids. Throws LookupError for
// an unknown (test, variable).
bool IsDeterministic(const DeterminismMask& mask, const std::string& test_id,
                     const RootVariable& variable, const std::string& node_id);

std::string SerializeMask(const DeterminismMask& mask);
DeterminismMask ParseMask(std::string_view bytes);

}  // namespace crossfire

#endif  // CROSSFIRE_DETERMINISM_H_
