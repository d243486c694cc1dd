#include "json_codec.h"

#include "crossfire/error.h"
#include "crossfire/hash.h"

namespace crossfire::internal {

namespace {

std::string Rebase(const std::string& id, const std::string& root,
                   std::string_view alias) {
  if (alias.empty()) return id;
  return RerootPath(id, root, alias);
}

}  // namespace

Json VariableToJson(const RootVariable& v) {
  Json j = Json::object();
  j["name"] = v.name;
  j["kind"] = std::string(VariableKindName(v.kind));
  j["ordinal"] = v.ordinal;
  return j;
}

RootVariable VariableFromJson(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where, "expected an object");
  RootVariable v;
  v.name = RequireString(j, "name", where);
  if (v.name.empty()) throw ValidationError(where + ".name", "empty name");
  const std::string kind = RequireString(j, "kind", where);
  const auto parsed = ParseVariableKind(kind);
  if (!parsed) {
    throw ValidationError(where + ".kind", "unknown variable kind '" + kind + "'");
  }
  v.kind = *parsed;
  v.ordinal = RequireInt(j, "ordinal", where);
  return v;
}

Json GraphToJson(const VariableGraph& graph, std::string_view root_alias) {
  const std::string escaped_root = graph.root;
  Json nodes = Json::array();
  for (const GraphNode& n : graph.nodes) {
    Json jn = Json::object();
    jn["id"] = Rebase(n.id, escaped_root, root_alias);
    jn["kind"] = std::string(NodeKindName(n.kind));
    jn["type"] = n.type_name;
    if (n.value) jn["value"] = *n.value;
    if (n.ref_target) jn["ref"] = Rebase(*n.ref_target, escaped_root, root_alias);
    if (n.size) jn["size"] = *n.size;
    nodes.push_back(std::move(jn));
  }
  Json edges = Json::array();
  for (const GraphEdge& e : graph.edges) {
    Json je = Json::object();
    je["parent"] = Rebase(e.parent, escaped_root, root_alias);
    je["child"] = Rebase(e.child, escaped_root, root_alias);
    if (e.label.is_field()) {
      je["field"] = e.label.field();
    } else {
      je["index"] = e.label.index();
    }
    edges.push_back(std::move(je));
  }
  Json j = Json::object();
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  if (root_alias.empty()) {
    j["root"] = graph.root;
    j["variable"] = VariableToJson(graph.variable);
    j["structure_hash"] = HashToHex(graph.structure_hash);
  }
  return j;
}

VariableGraph GraphFromJson(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where, "expected an object");
  VariableGraph g;
  g.variable = VariableFromJson(Require(j, "variable", where), where + ".variable");
  g.root = RequireString(j, "root", where);
  const std::string hash = RequireString(j, "structure_hash", where);
  if (!HexToHash(hash, &g.structure_hash)) {
    throw ValidationError(where + ".structure_hash",
                          "expected 16 lower-case hex digits");
  }

  const Json& nodes = Require(j, "nodes", where);
  if (!nodes.is_array()) throw ValidationError(where + ".nodes", "expected an array");
  for (size_t i = 0; i < nodes.size(); ++i) {
    const std::string at = where + ".nodes[" + std::to_string(i) + "]";
    const Json& jn = nodes[i];
    if (!jn.is_object()) throw ValidationError(at, "expected an object");
    GraphNode n;
    n.id = RequireString(jn, "id", at);
    const std::string kind = RequireString(jn, "kind", at);
    const auto parsed = ParseNodeKind(kind);
    if (!parsed) throw ValidationError(at + ".kind", "unknown node kind '" + kind + "'");
    n.kind = *parsed;
    n.type_name = RequireString(jn, "type", at);
    if (jn.contains("value")) n.value = RequireString(jn, "value", at);
    if (jn.contains("ref")) n.ref_target = RequireString(jn, "ref", at);
    if (jn.contains("size")) n.size = RequireInt(jn, "size", at);
    g.nodes.push_back(std::move(n));
  }

  const Json& edges = Require(j, "edges", where);
  if (!edges.is_array()) throw ValidationError(where + ".edges", "expected an array");
  for (size_t i = 0; i < edges.size(); ++i) {
    const std::string at = where + ".edges[" + std::to_string(i) + "]";
    const Json& je = edges[i];
    if (!je.is_object()) throw ValidationError(at, "expected an object");
    GraphEdge e;
    e.parent = RequireString(je, "parent", at);
    e.child = RequireString(je, "child", at);
    const bool has_field = je.contains("field");
    const bool has_index = je.contains("index");
    if (has_field == has_index) {
      throw ValidationError(at, "exactly one of 'field' or 'index' required");
    }
    e.label = has_field ? EdgeLabel::Field(RequireString(je, "field", at))
                        : EdgeLabel::Index(RequireInt(je, "index", at));
    g.edges.push_back(std::move(e));
  }
  return g;
}

std::string Dump(const Json& j) {
  try {
    return j.dump();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("cannot encode JSON: ") + e.what());
  }
}

Json ParseJson(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann counts bytes from 1; report the 0-based offset of the culprit.
    throw ParseError(e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
}

const Json& Require(const Json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(where + "." + key, "missing required field");
  }
  return *it;
}

std::string RequireString(const Json& obj, const char* key,
                          const std::string& where) {
  const Json& v = Require(obj, key, where);
  if (!v.is_string()) throw ValidationError(where + "." + key, "expected a string");
  return v.get<std::string>();
}

int64_t RequireInt(const Json& obj, const char* key, const std::string& where) {
  const Json& v = Require(obj, key, where);
  if (!v.is_number_integer()) {
    throw ValidationError(where + "." + key, "expected an integer");
  }
  return v.get<int64_t>();
}

}  // namespace crossfire::internal
