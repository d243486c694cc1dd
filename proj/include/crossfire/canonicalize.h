#ifndef CROSSFIRE_CANONICALIZE_H_
#define CROSSFIRE_CANONICALIZE_H_

#include <cstdint>
#include <string>

#include "crossfire/graph.h"

namespace crossfire {

inline constexpr int kDefaultDepthCap = 64;

struct CanonicalizeOptions {
  // Nodes deeper than this (root = depth 1) become kTruncated markers.
  int depth_cap = kDefaultDepthCap;
};

// Relabels a raw graph (arbitrary node ids) with access-path ids assigned by
// BFS from the root. Children are expanded in EdgeLabel order. The first BFS
// arrival at a shared object or collection owns it; later arrivals become
// kBackReference nodes pointing at the owner. Primitive and null nodes are
// values, not identities: every arrival gets its own copy.
//
// Throws MalformedGraphError on unknown or unreachable nodes, duplicate
// labels under one parent, children under a leaf kind, empty field names,
// negative indices, or a collection size that disagrees with its index edges.
// The result is a fixed point: Canonicalize(Canonicalize(g)) == Canonicalize(g).
VariableGraph Canonicalize(const VariableGraph& raw,
                           const CanonicalizeOptions& options = {});

// Root-independent canonical serialization: the graph's JSON with the root
// segment of every id replaced by "$". Aliased variables over the same object
// produce the same string.
std::string StructureSerialization(const VariableGraph& graph);

// FNV-1a 64 over StructureSerialization.
uint64_t StructuralHash(const VariableGraph& graph);

}  // namespace crossfire

#endif  // CROSSFIRE_CANONICALIZE_H_
