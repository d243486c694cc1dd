#include "crossfire/graph.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <stdexcept>

namespace crossfire {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 6> kNodeKindNames{{
    {NodeKind::kObject, "object"},
    {NodeKind::kCollection, "collection"},
    {NodeKind::kPrimitive, "primitive"},
    {NodeKind::kNull, "null"},
    {NodeKind::kBackReference, "back-reference"},
    {NodeKind::kTruncated, "truncated"},
}};

constexpr std::array<std::pair<VariableKind, std::string_view>, 5>
    kVariableKindNames{{
        {VariableKind::kLocal, "local"},
        {VariableKind::kTestClassField, "test-class-field"},
        {VariableKind::kMethodReturn, "method-return"},
        {VariableKind::kInstantiatedObject, "instantiated-object"},
        {VariableKind::kStaticField, "static-field"},
    }};

bool NeedsEscape(char c) {
  return c == '\\' || c == '.' || c == '[' || c == ']';
}

// Reads one escaped name starting at `pos`, stopping before an unescaped '.'
// or '['. Returns false on a dangling escape or a stray ']'.
bool ReadName(std::string_view id, size_t& pos, std::string* out) {
  out->clear();
  while (pos < id.size()) {
    const char c = id[pos];
    if (c == '\\') {
      if (pos + 1 >= id.size()) return false;
      out->push_back(id[pos + 1]);
      pos += 2;
      continue;
    }
    if (c == '.' || c == '[') break;
    if (c == ']') return false;
    out->push_back(c);
    ++pos;
  }
  return true;
}

}  // namespace

std::string_view NodeKindName(NodeKind kind) {
  for (const auto& [k, name] : kNodeKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<NodeKind> ParseNodeKind(std::string_view name) {
  for (const auto& [k, n] : kNodeKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view VariableKindName(VariableKind kind) {
  for (const auto& [k, name] : kVariableKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<VariableKind> ParseVariableKind(std::string_view name) {
  for (const auto& [k, n] : kVariableKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string DescribeVariable(const RootVariable& v) {
  if (v.kind == VariableKind::kLocal && v.ordinal == 0) return v.name;
  return v.name + "#" + std::to_string(v.ordinal) + "(" +
         std::string(VariableKindName(v.kind)) + ")";
}

std::strong_ordering EdgeLabel::operator<=>(const EdgeLabel& o) const {
  if (is_field() != o.is_field()) {
    return is_field() ? std::strong_ordering::less
                      : std::strong_ordering::greater;
  }
  if (is_field()) {
    const int c = field().compare(o.field());
    return c < 0   ? std::strong_ordering::less
           : c > 0 ? std::strong_ordering::greater
                   : std::strong_ordering::equal;
  }
  return index() <=> o.index();
}

std::string EscapePathSegment(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (const char c : raw) {
    if (NeedsEscape(c)) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string ChildPath(std::string_view parent, const EdgeLabel& label) {
  std::string out(parent);
  if (label.is_field()) {
    out.push_back('.');
    out += EscapePathSegment(label.field());
  } else {
    out.push_back('[');
    out += std::to_string(label.index());
    out.push_back(']');
  }
  return out;
}

std::optional<ParsedPath> ParsePath(std::string_view id) {
  ParsedPath parsed;
  size_t pos = 0;
  if (!ReadName(id, pos, &parsed.root) || parsed.root.empty()) {
    return std::nullopt;
  }
  std::string name;
  while (pos < id.size()) {
    if (id[pos] == '.') {
      ++pos;
      if (!ReadName(id, pos, &name) || name.empty()) return std::nullopt;
      parsed.labels.push_back(EdgeLabel::Field(name));
    } else {  // '['
      const size_t close = id.find(']', pos);
      if (close == std::string_view::npos || close == pos + 1) {
        return std::nullopt;
      }
      int64_t index = 0;
      const char* first = id.data() + pos + 1;
      const char* last = id.data() + close;
      const auto [ptr, ec] = std::from_chars(first, last, index);
      if (ec != std::errc() || ptr != last || index < 0) return std::nullopt;
      // Reject leading zeros so every index has exactly one spelling.
      if (last - first > 1 && *first == '0') return std::nullopt;
      parsed.labels.push_back(EdgeLabel::Index(index));
      pos = close + 1;
    }
  }
  return parsed;
}

namespace {

// Offsets where each unescaped '.' or '[' segment starts.
std::vector<size_t> SegmentStarts(std::string_view id) {
  std::vector<size_t> starts;
  for (size_t i = 0; i < id.size(); ++i) {
    if (id[i] == '\\') {
      ++i;
      continue;
    }
    if (id[i] == '.' || id[i] == '[') starts.push_back(i);
  }
  return starts;
}

}  // namespace

int PathDepth(std::string_view id) {
  return static_cast<int>(SegmentStarts(id).size()) + 1;
}

std::optional<std::string> ParentPath(std::string_view id) {
  const std::vector<size_t> starts = SegmentStarts(id);
  if (starts.empty()) return std::nullopt;
  return std::string(id.substr(0, starts.back()));
}

bool IsStrictPathPrefix(std::string_view ancestor,
                        std::string_view descendant) {
  if (descendant.size() <= ancestor.size()) return false;
  if (descendant.substr(0, ancestor.size()) != ancestor) return false;
  const char next = descendant[ancestor.size()];
  if (next != '.' && next != '[') return false;
  // The boundary must be unescaped: count trailing backslashes of ancestor.
  size_t backslashes = 0;
  for (size_t i = ancestor.size(); i > 0 && ancestor[i - 1] == '\\'; --i) {
    ++backslashes;
  }
  return backslashes % 2 == 0;
}

std::string RerootPath(std::string_view id, std::string_view old_root,
                       std::string_view new_root) {
  if (id.substr(0, old_root.size()) != old_root) {
    throw std::invalid_argument("path does not start with the given root");
  }
  std::string out(new_root);
  out += id.substr(old_root.size());
  return out;
}

GraphView::GraphView(const VariableGraph& graph) : graph_(&graph) {
  by_id_.reserve(graph.nodes.size());
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    by_id_.emplace(graph.nodes[i].id, i);
  }
  for (const GraphEdge& e : graph.edges) {
    children_[e.parent].push_back(&e);
  }
  for (auto& [parent, edges] : children_) {
    std::sort(edges.begin(), edges.end(),
              [](const GraphEdge* a, const GraphEdge* b) {
                return a->label < b->label;
              });
  }
}

const GraphNode* GraphView::Find(std::string_view id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &graph_->nodes[it->second];
}

const GraphNode& GraphView::root() const {
  const GraphNode* node = Find(graph_->root);
  if (node == nullptr) throw std::logic_error("graph has no root node");
  return *node;
}

const std::vector<const GraphEdge*>& GraphView::Children(
    std::string_view id) const {
  static const std::vector<const GraphEdge*> kNone;
  const auto it = children_.find(id);
  return it == children_.end() ? kNone : it->second;
}

}  // namespace crossfire
