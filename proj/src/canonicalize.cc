#include "crossfire/canonicalize.h"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "crossfire/error.h"
#include "crossfire/hash.h"
#include "json_codec.h"

namespace crossfire {

namespace {

bool IsLeafKind(NodeKind kind) {
  return kind == NodeKind::kPrimitive || kind == NodeKind::kNull ||
         kind == NodeKind::kBackReference || kind == NodeKind::kTruncated;
}

// Objects and collections have identity; everything else is copied per
// arrival.
bool HasIdentity(NodeKind kind) {
  return kind == NodeKind::kObject || kind == NodeKind::kCollection;
}

struct RawIndex {
  std::unordered_map<std::string_view, const GraphNode*> nodes;
  std::unordered_map<std::string_view, std::vector<const GraphEdge*>> children;
};

RawIndex IndexRaw(const VariableGraph& raw) {
  RawIndex index;
  for (const GraphNode& n : raw.nodes) {
    if (!index.nodes.emplace(n.id, &n).second) {
      throw MalformedGraphError("duplicate node id '" + n.id + "'");
    }
  }
  for (const GraphEdge& e : raw.edges) {
    const auto parent = index.nodes.find(e.parent);
    if (parent == index.nodes.end()) {
      throw MalformedGraphError("edge from unknown node '" + e.parent + "'");
    }
    if (!index.nodes.contains(e.child)) {
      throw MalformedGraphError("edge to unknown node '" + e.child + "'");
    }
    if (IsLeafKind(parent->second->kind)) {
      throw MalformedGraphError("node '" + e.parent + "' of kind " +
                                std::string(NodeKindName(parent->second->kind)) +
                                " cannot have children");
    }
    if (e.label.is_field() && e.label.field().empty()) {
      throw MalformedGraphError("empty field name under '" + e.parent + "'");
    }
    if (e.label.is_index() && e.label.index() < 0) {
      throw MalformedGraphError("negative index under '" + e.parent + "'");
    }
    index.children[e.parent].push_back(&e);
  }
  for (auto& [parent, edges] : index.children) {
    std::sort(edges.begin(), edges.end(),
              [](const GraphEdge* a, const GraphEdge* b) {
                return a->label < b->label;
              });
    for (size_t i = 1; i < edges.size(); ++i) {
      if (edges[i - 1]->label == edges[i]->label) {
        throw MalformedGraphError("duplicate edge label under '" +
                                  std::string(parent) + "'");
      }
    }
  }
  return index;
}

void CheckConnected(const VariableGraph& raw, const RawIndex& index) {
  std::unordered_set<std::string_view> seen{raw.root};
  std::vector<std::string_view> stack{raw.root};
  while (!stack.empty()) {
    const std::string_view id = stack.back();
    stack.pop_back();
    const auto it = index.children.find(id);
    if (it == index.children.end()) continue;
    for (const GraphEdge* e : it->second) {
      if (seen.insert(e->child).second) stack.push_back(e->child);
    }
  }
  for (const GraphNode& n : raw.nodes) {
    if (!seen.contains(n.id)) {
      throw MalformedGraphError("node '" + n.id + "' is not reachable from root '" +
                                raw.root + "'");
    }
  }
}

}  // namespace

VariableGraph Canonicalize(const VariableGraph& raw,
                           const CanonicalizeOptions& options) {
  if (options.depth_cap < 1) throw ConfigError("depth cap must be >= 1");
  const RawIndex index = IndexRaw(raw);
  if (!index.nodes.contains(raw.root)) {
    throw MalformedGraphError("root '" + raw.root + "' is not a node");
  }
  CheckConnected(raw, index);

  VariableGraph out;
  out.variable = raw.variable;
  out.root = EscapePathSegment(raw.variable.name);
  out.nodes.reserve(raw.nodes.size());

  // Raw id -> canonical id of the owning (first-arrival) node.
  std::unordered_map<std::string_view, std::string> owner;

  struct Pending {
    std::string_view raw_id;
    std::string path;
    int depth;
  };
  std::deque<Pending> queue;
  queue.push_back({raw.root, out.root, 1});

  while (!queue.empty()) {
    Pending item = std::move(queue.front());
    queue.pop_front();
    const GraphNode& src = *index.nodes.at(item.raw_id);

    GraphNode node;
    node.id = item.path;
    node.type_name = src.type_name;

    if (HasIdentity(src.kind)) {
      const auto it = owner.find(item.raw_id);
      if (it != owner.end()) {
        node.kind = NodeKind::kBackReference;
        node.ref_target = it->second;
        out.nodes.push_back(std::move(node));
        continue;
      }
      owner.emplace(item.raw_id, item.path);
    }

    if (item.depth > options.depth_cap) {
      node.kind = NodeKind::kTruncated;
      out.nodes.push_back(std::move(node));
      continue;
    }

    node.kind = src.kind;
    switch (src.kind) {
      case NodeKind::kPrimitive:
        node.value = src.value.value_or("");
        break;
      case NodeKind::kBackReference: {
        // Already-canonical input: the target must have been visited.
        if (!src.ref_target) {
          throw MalformedGraphError("back-reference '" + src.id +
                                    "' has no target");
        }
        const auto target = owner.find(*src.ref_target);
        if (target == owner.end()) {
          throw MalformedGraphError("back-reference '" + src.id +
                                    "' targets an unvisited node");
        }
        node.ref_target = target->second;
        break;
      }
      default:
        break;
    }

    const auto kids = index.children.find(item.raw_id);
    if (src.kind == NodeKind::kCollection) {
      int64_t index_edges = 0;
      if (kids != index.children.end()) {
        for (const GraphEdge* e : kids->second) index_edges += e->label.is_index();
      }
      if (src.size && *src.size != index_edges) {
        throw MalformedGraphError("collection '" + src.id + "' has size " +
                                  std::to_string(*src.size) + " but " +
                                  std::to_string(index_edges) + " index edges");
      }
      node.size = index_edges;
    }
    out.nodes.push_back(std::move(node));

    if (kids == index.children.end()) continue;
    for (const GraphEdge* e : kids->second) {
      std::string child_path = ChildPath(item.path, e->label);
      out.edges.push_back({item.path, e->label, child_path});
      queue.push_back({e->child, std::move(child_path), item.depth + 1});
    }
  }

  out.structure_hash = StructuralHash(out);
  return out;
}

std::string StructureSerialization(const VariableGraph& graph) {
  return internal::Dump(internal::GraphToJson(graph, "$"));
}

uint64_t StructuralHash(const VariableGraph& graph) {
  return Fnv1a64(StructureSerialization(graph));
}

}  // namespace crossfire
