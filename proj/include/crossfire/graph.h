#ifndef CROSSFIRE_GRAPH_H_
#define CROSSFIRE_GRAPH_H_

// Object-graph data model shared by every stage of the engine.
//
// A VariableGraph is the heap reachable from one root variable at the end of
// a test. After canonicalization every node is named by its access path from
// the root ("var2.f4.f3", "list[2].name"), so the same logical location gets
// the same id in the original program's runs and in every mutant's runs.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace crossfire {

enum class NodeKind {
  kObject,
  kCollection,
  kPrimitive,
  kNull,
  kBackReference,
  // Placeholder for a node beyond the depth cap. Keeps its type_name.
  kTruncated,
};

std::string_view NodeKindName(NodeKind kind);
std::optional<NodeKind> ParseNodeKind(std::string_view name);

enum class VariableKind {
  kLocal,
  kTestClassField,
  kMethodReturn,
  kInstantiatedObject,
  kStaticField,
};

std::string_view VariableKindName(VariableKind kind);
std::optional<VariableKind> ParseVariableKind(std::string_view name);

struct RootVariable {
  std::string name;
  VariableKind kind = VariableKind::kLocal;
  // Disambiguates repeated method returns bound under one name.
  int64_t ordinal = 0;

  auto operator<=>(const RootVariable&) const = default;
  bool operator==(const RootVariable&) const = default;
};

// "name" for ordinal 0 locals, otherwise "name#ordinal(kind)". Used in logs
// and rendered reports only; never parsed back.
std::string DescribeVariable(const RootVariable& v);

// A field name or a collection index.
class EdgeLabel {
 public:
  EdgeLabel() : label_(std::string()) {}
  static EdgeLabel Field(std::string name) { return EdgeLabel(std::move(name)); }
  static EdgeLabel Index(int64_t index) { return EdgeLabel(index); }

  bool is_field() const { return std::holds_alternative<std::string>(label_); }
  bool is_index() const { return std::holds_alternative<int64_t>(label_); }
  const std::string& field() const { return std::get<std::string>(label_); }
  int64_t index() const { return std::get<int64_t>(label_); }

  // Canonical child order: fields by byte order, then indices ascending.
  std::strong_ordering operator<=>(const EdgeLabel& o) const;
  bool operator==(const EdgeLabel& o) const = default;

 private:
  explicit EdgeLabel(std::string f) : label_(std::move(f)) {}
  explicit EdgeLabel(int64_t i) : label_(i) {}
  std::variant<std::string, int64_t> label_;
};

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::kObject;
  std::string type_name;
  std::optional<std::string> value;       // iff kPrimitive
  std::optional<std::string> ref_target;  // iff kBackReference
  std::optional<int64_t> size;            // iff kCollection

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string parent;
  EdgeLabel label;
  std::string child;

  bool operator==(const GraphEdge&) const = default;
};

struct VariableGraph {
  RootVariable variable;
  std::string root;
  // Canonical graphs list nodes in BFS order and edges grouped by parent in
  // that same order.
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  uint64_t structure_hash = 0;

  bool operator==(const VariableGraph&) const = default;
};

// ---------------------------------------------------------------------------
// Access paths.
//
// A path id is the escaped root name followed by ".field" or "[index]"
// segments. Field names and the root name escape '\\', '.', '[' and ']'
// with a backslash.

std::string EscapePathSegment(std::string_view raw);
std::string ChildPath(std::string_view parent, const EdgeLabel& label);

struct ParsedPath {
  std::string root;  // unescaped
  std::vector<EdgeLabel> labels;
};
std::optional<ParsedPath> ParsePath(std::string_view id);

// Number of nodes on the path, root counted as 1. Requires a valid path id.
int PathDepth(std::string_view id);
// Id of the parent location, or nullopt for a root id.
std::optional<std::string> ParentPath(std::string_view id);
// True iff `descendant` lies strictly below `ancestor`.
bool IsStrictPathPrefix(std::string_view ancestor, std::string_view descendant);
// Replaces the leading root segment of `id` with `new_root` (already escaped).
std::string RerootPath(std::string_view id, std::string_view old_root,
                       std::string_view new_root);

// ---------------------------------------------------------------------------

// Read-only index over a VariableGraph: id lookup and ordered children.
// Holds a reference; the graph must outlive the view.
class GraphView {
 public:
  explicit GraphView(const VariableGraph& graph);

  const VariableGraph& graph() const { return *graph_; }
  const GraphNode* Find(std::string_view id) const;
  const GraphNode& root() const;
  // Outgoing edges of `id` in canonical label order.
  const std::vector<const GraphEdge*>& Children(std::string_view id) const;

 private:
  const VariableGraph* graph_;
  std::unordered_map<std::string_view, size_t> by_id_;
  std::unordered_map<std::string_view, std::vector<const GraphEdge*>> children_;
};

}  // namespace crossfire

#endif  // CROSSFIRE_GRAPH_H_
