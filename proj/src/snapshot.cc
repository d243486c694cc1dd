#include "crossfire/snapshot.h"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "crossfire/canonicalize.h"
#include "crossfire/error.h"
#include "json_codec.h"

namespace crossfire {

using internal::Json;

const VariableGraph* TestRunSnapshot::FindVariable(const RootVariable& v) const {
  for (const VariableGraph& g : variables) {
    if (g.variable == v) return &g;
  }
  return nullptr;
}

const MutantEntry* MutantManifest::FindMutant(std::string_view id) const {
  for (const MutantEntry& m : mutants) {
    if (m.mutant_id == id) return &m;
  }
  return nullptr;
}

bool MutantManifest::HasTest(std::string_view id) const {
  return std::find(tests.begin(), tests.end(), id) != tests.end();
}

std::vector<std::string> MutantManifest::SurvivingMutants() const {
  std::vector<std::string> ids;
  for (const MutantEntry& m : mutants) {
    if (m.status == MutantStatus::kSurvived) ids.push_back(m.mutant_id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void SortVariables(TestRunSnapshot* snapshot) {
  std::sort(snapshot->variables.begin(), snapshot->variables.end(),
            [](const VariableGraph& a, const VariableGraph& b) {
              return a.variable < b.variable;
            });
}

std::string SerializeGraph(const VariableGraph& graph) {
  return internal::Dump(internal::GraphToJson(graph));
}

std::string Serialize(const TestRunSnapshot& snapshot) {
  Json j = Json::object();
  j["program_version"] = snapshot.program_version;
  j["run_index"] = snapshot.run_index;
  j["test_id"] = snapshot.test_id;
  if (snapshot.outcome == TestOutcome::kFail) j["outcome"] = "fail";
  Json vars = Json::array();
  for (const VariableGraph& g : snapshot.variables) {
    vars.push_back(internal::GraphToJson(g));
  }
  j["variables"] = std::move(vars);
  return internal::Dump(j);
}

namespace {

// Hard structural checks that make a snapshot unusable downstream.
void CheckParsedGraph(const VariableGraph& g, const std::string& where) {
  std::unordered_map<std::string_view, size_t> by_id;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (!by_id.emplace(g.nodes[i].id, i).second) {
      throw ValidationError(where + ".nodes[" + std::to_string(i) + "].id",
                            "duplicate node id '" + g.nodes[i].id + "'");
    }
  }
  std::unordered_map<std::string_view, int64_t> index_edges;
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const GraphEdge& e = g.edges[i];
    const std::string at = where + ".edges[" + std::to_string(i) + "]";
    if (!by_id.contains(e.parent)) {
      throw ValidationError(at + ".parent", "unknown node '" + e.parent + "'");
    }
    if (!by_id.contains(e.child)) {
      throw ValidationError(at + ".child", "unknown node '" + e.child + "'");
    }
    if (e.label.is_index()) ++index_edges[e.parent];
  }
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const GraphNode& n = g.nodes[i];
    if (n.kind != NodeKind::kCollection) continue;
    const std::string at = where + ".nodes[" + std::to_string(i) + "].size";
    if (!n.size) throw ValidationError(at, "collection without size");
    const auto it = index_edges.find(n.id);
    const int64_t count = it == index_edges.end() ? 0 : it->second;
    if (*n.size != count) {
      throw ValidationError(at, "size " + std::to_string(*n.size) +
                                    " but " + std::to_string(count) +
                                    " index edges");
    }
  }
}

}  // namespace

TestRunSnapshot ParseSnapshot(std::string_view bytes) {
  const Json j = internal::ParseJson(bytes);
  if (!j.is_object()) throw ValidationError("$", "expected an object");
  TestRunSnapshot s;
  s.program_version = internal::RequireString(j, "program_version", "$");
  s.run_index = internal::RequireInt(j, "run_index", "$");
  s.test_id = internal::RequireString(j, "test_id", "$");
  if (j.contains("outcome")) {
    const std::string outcome = internal::RequireString(j, "outcome", "$");
    if (outcome == "fail") {
      s.outcome = TestOutcome::kFail;
    } else if (outcome != "pass") {
      throw ValidationError("$.outcome", "expected 'pass' or 'fail'");
    }
  }
  const Json& vars = internal::Require(j, "variables", "$");
  if (!vars.is_array()) throw ValidationError("$.variables", "expected an array");
  for (size_t i = 0; i < vars.size(); ++i) {
    const std::string where = "$.variables[" + std::to_string(i) + "]";
    VariableGraph g = internal::GraphFromJson(vars[i], where);
    CheckParsedGraph(g, where);
    s.variables.push_back(std::move(g));
  }
  return s;
}

namespace {

std::string_view StatusName(MutantStatus s) {
  return s == MutantStatus::kKilled ? "killed" : "survived";
}

std::vector<std::string> StringArray(const Json& obj, const char* key,
                                     const std::string& where) {
  const Json& arr = internal::Require(obj, key, where);
  if (!arr.is_array()) {
    throw ValidationError(where + "." + key, "expected an array");
  }
  std::vector<std::string> out;
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) {
      throw ValidationError(where + "." + key + "[" + std::to_string(i) + "]",
                            "expected a string");
    }
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

}  // namespace

std::string SerializeManifest(const MutantManifest& manifest) {
  Json mutants = Json::array();
  for (const MutantEntry& m : manifest.mutants) {
    Json jm = Json::object();
    jm["id"] = m.mutant_id;
    jm["location"] = m.location;
    jm["operator"] = m.mutation_operator;
    jm["status"] = std::string(StatusName(m.status));
    jm["covering_tests"] = m.covering_tests;
    mutants.push_back(std::move(jm));
  }
  Json j = Json::object();
  j["mutants"] = std::move(mutants);
  j["tests"] = manifest.tests;
  j["n_runs"] = manifest.n_runs;
  return internal::Dump(j);
}

MutantManifest ParseManifest(std::string_view bytes) {
  const Json j = internal::ParseJson(bytes);
  if (!j.is_object()) throw ValidationError("$", "expected an object");
  MutantManifest m;
  m.n_runs = internal::RequireInt(j, "n_runs", "$");
  m.tests = StringArray(j, "tests", "$");
  const Json& mutants = internal::Require(j, "mutants", "$");
  if (!mutants.is_array()) throw ValidationError("$.mutants", "expected an array");
  for (size_t i = 0; i < mutants.size(); ++i) {
    const std::string where = "$.mutants[" + std::to_string(i) + "]";
    const Json& jm = mutants[i];
    if (!jm.is_object()) throw ValidationError(where, "expected an object");
    MutantEntry e;
    e.mutant_id = internal::RequireString(jm, "id", where);
    e.location = internal::RequireString(jm, "location", where);
    e.mutation_operator = internal::RequireString(jm, "operator", where);
    const std::string status = internal::RequireString(jm, "status", where);
    if (status == "killed") {
      e.status = MutantStatus::kKilled;
    } else if (status == "survived") {
      e.status = MutantStatus::kSurvived;
    } else {
      throw ValidationError(where + ".status", "expected 'killed' or 'survived'");
    }
    e.covering_tests = StringArray(jm, "covering_tests", where);
    m.mutants.push_back(std::move(e));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Validation.

namespace {

bool IsSafeId(std::string_view id) {
  return !id.empty() && id != "." && id != ".." &&
         id.find('/') == std::string_view::npos &&
         id.find('\\') == std::string_view::npos &&
         id.find('\0') == std::string_view::npos;
}

void ValidateGraph(const VariableGraph& g, const std::string& where,
                   std::vector<Violation>* out) {
  const size_t before = out->size();
  auto add = [&](const std::string& suffix, std::string message) {
    out->push_back({where + suffix, std::move(message)});
  };

  std::unordered_map<std::string_view, size_t> order;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (!order.emplace(g.nodes[i].id, i).second) {
      add(".nodes", "duplicate node id '" + g.nodes[i].id + "'");
    }
  }
  if (g.root != EscapePathSegment(g.variable.name)) {
    add(".root", "root id must be the escaped variable name");
  }
  if (!order.contains(g.root)) add(".root", "root node missing");

  for (const GraphNode& n : g.nodes) {
    const std::string at = ".nodes[" + n.id + "]";
    const bool want_value = n.kind == NodeKind::kPrimitive;
    const bool want_ref = n.kind == NodeKind::kBackReference;
    const bool want_size = n.kind == NodeKind::kCollection;
    if (n.value.has_value() != want_value) {
      add(at, want_value ? "primitive without value" : "unexpected value");
    }
    if (n.ref_target.has_value() != want_ref) {
      add(at, want_ref ? "back-reference without target" : "unexpected ref");
    }
    if (n.size.has_value() != want_size) {
      add(at, want_size ? "collection without size" : "unexpected size");
    }
    if (n.size && *n.size < 0) add(at, "negative size");
    if (n.ref_target) {
      const auto target = order.find(*n.ref_target);
      const auto self = order.find(n.id);
      if (target == order.end()) {
        add(at, "back-reference to unknown node '" + *n.ref_target + "'");
      } else if (self != order.end() && target->second >= self->second) {
        add(at, "back-reference target not visited earlier in BFS order");
      } else if (g.nodes[target->second].kind == NodeKind::kBackReference) {
        add(at, "back-reference to another back-reference");
      }
    }
    if (!ParsePath(n.id)) add(at, "node id is not a valid access path");
  }

  std::map<std::string_view, std::vector<const GraphEdge*>> children;
  for (const GraphEdge& e : g.edges) {
    const auto parent = order.find(e.parent);
    if (parent == order.end() || !order.contains(e.child)) {
      add(".edges", "edge references unknown node");
      continue;
    }
    const NodeKind kind = g.nodes[parent->second].kind;
    if (kind != NodeKind::kObject && kind != NodeKind::kCollection) {
      add(".edges", "node '" + e.parent + "' of kind " +
                        std::string(NodeKindName(kind)) + " has children");
    }
    if (e.child != ChildPath(e.parent, e.label)) {
      add(".edges", "child id '" + e.child + "' is not the access path of its edge");
    }
    children[e.parent].push_back(&e);
  }
  for (auto& [parent, edges] : children) {
    bool fields = false, indices = false;
    std::vector<EdgeLabel> labels;
    for (const GraphEdge* e : edges) {
      fields |= e->label.is_field();
      indices |= e->label.is_index();
      labels.push_back(e->label);
    }
    if (fields && indices) {
      add(".edges", "parent '" + std::string(parent) +
                        "' mixes field and index labels");
    }
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
      add(".edges", "parent '" + std::string(parent) + "' repeats a label");
    }
    const GraphNode& p = g.nodes[order.at(parent)];
    if (p.kind == NodeKind::kCollection && !fields) {
      for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].index() != static_cast<int64_t>(i)) {
          add(".edges", "collection '" + std::string(parent) +
                            "' index labels are not contiguous from 0");
          break;
        }
      }
    }
  }

  // Canonical fixed point and hash, only once the cheaper checks are clean.
  if (out->size() != before) return;
  try {
    CanonicalizeOptions options;
    options.depth_cap = std::numeric_limits<int>::max();
    const VariableGraph canon = Canonicalize(g, options);
    if (canon.nodes != g.nodes || canon.edges != g.edges) {
      add("", "graph is not in canonical form");
    } else if (canon.structure_hash != g.structure_hash) {
      add(".structure_hash", "does not match the canonical serialization");
    }
  } catch (const Error& e) {
    add("", e.what());
  }
}

}  // namespace

std::vector<Violation> Validate(const TestRunSnapshot& snapshot,
                                const MutantManifest& manifest) {
  std::vector<Violation> out;
  if (!manifest.HasTest(snapshot.test_id)) {
    out.push_back({"test_id", "unknown test '" + snapshot.test_id + "'"});
  }
  if (snapshot.is_original()) {
    if (snapshot.run_index < 0 || snapshot.run_index >= manifest.n_runs) {
      out.push_back({"run_index", "original run index " +
                                      std::to_string(snapshot.run_index) +
                                      " outside [0, " +
                                      std::to_string(manifest.n_runs) + ")"});
    }
  } else {
    if (manifest.FindMutant(snapshot.program_version) == nullptr) {
      out.push_back({"program_version",
                     "unknown program version '" + snapshot.program_version + "'"});
    }
    if (snapshot.run_index != 0) {
      out.push_back({"run_index", "mutant runs must use run index 0"});
    }
  }
  std::vector<RootVariable> roots;
  for (size_t i = 0; i < snapshot.variables.size(); ++i) {
    const VariableGraph& g = snapshot.variables[i];
    roots.push_back(g.variable);
    ValidateGraph(g, "variables[" + std::to_string(i) + "]", &out);
  }
  std::sort(roots.begin(), roots.end());
  for (size_t i = 1; i < roots.size(); ++i) {
    if (roots[i] == roots[i - 1]) {
      out.push_back({"variables", "duplicate root variable '" +
                                      DescribeVariable(roots[i]) + "'"});
    }
  }
  return out;
}

std::vector<Violation> ValidateManifest(const MutantManifest& manifest) {
  std::vector<Violation> out;
  if (manifest.n_runs < 2) out.push_back({"n_runs", "must be at least 2"});
  std::unordered_set<std::string_view> tests;
  for (const std::string& t : manifest.tests) {
    if (!IsSafeId(t)) out.push_back({"tests", "test id '" + t + "' is not file-safe"});
    if (!tests.insert(t).second) out.push_back({"tests", "duplicate test '" + t + "'"});
  }
  std::unordered_set<std::string_view> ids;
  for (const MutantEntry& m : manifest.mutants) {
    const std::string at = "mutants[" + m.mutant_id + "]";
    if (!IsSafeId(m.mutant_id) || m.mutant_id == kOriginalVersion) {
      out.push_back({at, "mutant id is not file-safe or is reserved"});
    }
    if (!ids.insert(m.mutant_id).second) out.push_back({at, "duplicate mutant id"});
    for (const std::string& t : m.covering_tests) {
      if (!tests.contains(t)) {
        out.push_back({at + ".covering_tests", "unknown test '" + t + "'"});
      }
    }
  }
  return out;
}

}  // namespace crossfire
