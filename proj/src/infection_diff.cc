#include "crossfire/infection_diff.h"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <tuple>

#include "crossfire/error.h"
#include "crossfire/hash.h"
#include "json_codec.h"

namespace crossfire {

using internal::Json;

namespace {

constexpr std::array<std::pair<DifferenceKind, std::string_view>, 5> kKindNames{{
    {DifferenceKind::kValue, "value"},
    {DifferenceKind::kNullness, "nullness"},
    {DifferenceKind::kType, "type"},
    {DifferenceKind::kCollectionSize, "collection-size"},
    {DifferenceKind::kMissingStructure, "missing-structure"},
}};

std::string Describe(const GraphNode& n) {
  switch (n.kind) {
    case NodeKind::kPrimitive:
      return n.value.value_or("");
    case NodeKind::kNull:
      return "null";
    case NodeKind::kObject:
      return "<" + n.type_name + ">";
    case NodeKind::kCollection:
      return "<" + n.type_name + ">[" + std::to_string(n.size.value_or(0)) + "]";
    case NodeKind::kBackReference:
      return "->" + n.ref_target.value_or("");
    case NodeKind::kTruncated:
      return "<" + n.type_name + ">...";
  }
  return "";
}

std::string NullnessOf(const GraphNode& n) {
  return n.kind == NodeKind::kNull ? "null" : "non-null";
}

// Kind, type name and (for back-references) target. Every type record at a
// node carries the same expected string, whatever the mutant did.
std::string TypeDescriptor(const GraphNode& n) {
  std::string out = std::string(NodeKindName(n.kind)) + ":" + n.type_name;
  if (n.ref_target) out += "->" + *n.ref_target;
  return out;
}

std::optional<GraphDifference> CompareNode(const GraphNode& o,
                                           const GraphNode& m) {
  GraphDifference d;
  if (o.kind != m.kind &&
      (o.kind == NodeKind::kNull || m.kind == NodeKind::kNull)) {
    d.kind = DifferenceKind::kNullness;
    d.expected = NullnessOf(o);
    d.observed = NullnessOf(m);
    return d;
  }
  // Kind changes include aliasing changes (back-reference vs. owned node).
  if (o.kind != m.kind || o.type_name != m.type_name ||
      (o.kind == NodeKind::kBackReference && o.ref_target != m.ref_target)) {
    d.kind = DifferenceKind::kType;
    d.expected = TypeDescriptor(o);
    d.observed = TypeDescriptor(m);
    d.type_only = o.kind == m.kind && o.type_name != m.type_name &&
                  o.ref_target == m.ref_target;
    return d;
  }
  if (o.kind == NodeKind::kPrimitive && o.value != m.value) {
    d.kind = DifferenceKind::kValue;
    d.expected = o.value.value_or("");
    d.observed = m.value.value_or("");
    return d;
  }
  if (o.kind == NodeKind::kCollection && o.size != m.size) {
    d.kind = DifferenceKind::kCollectionSize;
    d.expected = std::to_string(o.size.value_or(0));
    d.observed = std::to_string(m.size.value_or(0));
    return d;
  }
  return std::nullopt;
}

std::string LabelSet(const std::vector<const GraphEdge*>& edges) {
  std::string out = "{";
  for (size_t i = 0; i < edges.size(); ++i) {
    if (i > 0) out += ",";
    out += edges[i]->label.is_field() ? edges[i]->label.field()
                                      : std::to_string(edges[i]->label.index());
  }
  return out + "}";
}

// Node description plus, for objects, its field labels. The expected value
// of every missing-structure record at a node.
std::string StructureDescriptor(const GraphView& view, const GraphNode& n) {
  std::string out = Describe(n);
  if (n.kind == NodeKind::kObject) out += LabelSet(view.Children(n.id));
  return out;
}

// Back-reference descriptions embed an absolute id; move it between roots.
std::string RerootDescription(const std::string& text, std::string_view from,
                              std::string_view to) {
  const size_t arrow = text.rfind("->");
  if (arrow == std::string::npos) return text;
  const std::string_view target = std::string_view(text).substr(arrow + 2);
  if (target != from && !IsStrictPathPrefix(from, target)) return text;
  return text.substr(0, arrow + 2) + RerootPath(target, from, to);
}

void RequireCanonicalRoot(const VariableGraph& g, const char* which) {
  if (g.nodes.empty() || g.root != EscapePathSegment(g.variable.name) ||
      g.nodes.front().id != g.root) {
    throw InputError(std::string(which) + " graph for '" +
                     DescribeVariable(g.variable) + "' is not canonicalized");
  }
}

}  // namespace

std::string_view DifferenceKindName(DifferenceKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<DifferenceKind> ParseDifferenceKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool RecordLess(const InfectionRecord& a, const InfectionRecord& b) {
  return std::tie(a.mutant_id, a.test_id, a.variable, a.node_id, a.kind,
                  a.expected, a.observed) <
         std::tie(b.mutant_id, b.test_id, b.variable, b.node_id, b.kind,
                  b.expected, b.observed);
}

void SortRecords(std::vector<InfectionRecord>* records) {
  std::sort(records->begin(), records->end(), RecordLess);
}

std::vector<GraphDifference> DiffGraphs(const VariableGraph& original,
                                        const VariableGraph& mutant,
                                        const VariableMask& mask) {
  if (original.variable != mutant.variable) {
    throw InputError("cannot diff '" + DescribeVariable(original.variable) +
                     "' against '" + DescribeVariable(mutant.variable) + "'");
  }
  RequireCanonicalRoot(original, "original");
  RequireCanonicalRoot(mutant, "mutant");

  const GraphView orig(original);
  const GraphView mut(mutant);
  std::vector<GraphDifference> out;
  auto emit = [&](const std::string& id, GraphDifference d) {
    d.node_id = id;
    d.depth = PathDepth(id);
    out.push_back(std::move(d));
  };

  std::deque<std::string_view> queue{original.root};
  while (!queue.empty()) {
    const std::string_view id_view = queue.front();
    queue.pop_front();
    const std::string id(id_view);
    // Nondeterministic or never-observed: skip the whole subtree.
    if (!mask.deterministic.contains(id)) continue;

    const GraphNode* o = orig.Find(id);
    const GraphNode* m = mut.Find(id);
    if (o == nullptr) continue;  // mask built from other runs than this one
    if (m == nullptr) {
      GraphDifference d;
      d.kind = DifferenceKind::kMissingStructure;
      d.expected = StructureDescriptor(orig, *o);
      d.observed = std::string(kAbsent);
      emit(id, std::move(d));
      continue;
    }
    if (auto d = CompareNode(*o, *m)) {
      emit(id, std::move(*d));
      continue;
    }

    const auto& orig_children = orig.Children(id);
    if (o->kind == NodeKind::kObject) {
      // Mutant-only fields that no original run ever had surface here, at
      // the nearest location the original can assert.
      const auto& mut_children = mut.Children(id);
      const bool mutant_only = std::any_of(
          mut_children.begin(), mut_children.end(), [&](const GraphEdge* e) {
            return orig.Find(e->child) == nullptr &&
                   !mask.deterministic.contains(e->child) &&
                   !mask.nondeterministic.contains(e->child);
          });
      if (mutant_only) {
        GraphDifference d;
        d.kind = DifferenceKind::kMissingStructure;
        d.expected = StructureDescriptor(orig, *o);
        d.observed = StructureDescriptor(mut, *m);
        emit(id, std::move(d));
        continue;
      }
    }
    for (const GraphEdge* e : orig_children) queue.push_back(e->child);
  }
  return out;
}

std::vector<InfectionRecord> DiffTestRun(const TestRunSnapshot& reference,
                                         const TestRunSnapshot& mutant_run,
                                         const DeterminismMask& mask,
                                         std::vector<std::string>* notices,
                                         const GraphDiffer& differ) {
  if (reference.test_id != mutant_run.test_id) {
    throw InputError("reference run is for '" + reference.test_id +
                     "' but mutant run is for '" + mutant_run.test_id + "'");
  }
  const std::string& test_id = reference.test_id;
  std::vector<InfectionRecord> out;

  auto attribute = [&](const RootVariable& v, const GraphDifference& d,
                       const std::string& node_id) {
    InfectionRecord r;
    r.mutant_id = mutant_run.program_version;
    r.test_id = test_id;
    r.variable = v;
    r.node_id = node_id;
    r.depth = d.depth;
    r.kind = d.kind;
    r.expected = d.expected;
    r.observed = d.observed;
    r.type_only = d.type_only;
    out.push_back(std::move(r));
  };

  // (original hash, mutant hash, mask digest) -> differences with "$" root.
  std::map<std::tuple<uint64_t, uint64_t, uint64_t>, std::vector<GraphDifference>>
      seen;

  for (const VariableGraph& mg : mutant_run.variables) {
    const VariableMask* slice = mask.FindSlice(test_id, mg.variable);
    if (slice == nullptr) {
      if (notices != nullptr) {
        notices->push_back("mutant " + mutant_run.program_version + ", test " +
                           test_id + ": variable '" +
                           DescribeVariable(mg.variable) +
                           "' never appears in an original run; skipped");
      }
      continue;
    }
    const VariableGraph* og = reference.FindVariable(mg.variable);
    // Present in the mask but not in run 0: absent in some original run, so
    // the whole variable is nondeterministic.
    if (og == nullptr) continue;

    const auto key = std::make_tuple(og->structure_hash, mg.structure_hash,
                                     slice->relative_digest);
    auto it = seen.find(key);
    if (it == seen.end()) {
      std::vector<GraphDifference> diffs = differ(*og, mg, *slice);
      for (GraphDifference& d : diffs) {
        d.node_id = RerootPath(d.node_id, og->root, "$");
        d.expected = RerootDescription(d.expected, og->root, "$");
        d.observed = RerootDescription(d.observed, og->root, "$");
      }
      it = seen.emplace(key, std::move(diffs)).first;
    }
    for (GraphDifference d : it->second) {
      d.expected = RerootDescription(d.expected, "$", og->root);
      d.observed = RerootDescription(d.observed, "$", og->root);
      attribute(mg.variable, d, RerootPath(d.node_id, "$", og->root));
    }
  }

  for (const VariableGraph& og : reference.variables) {
    if (mutant_run.FindVariable(og.variable) != nullptr) continue;
    const VariableMask* slice = mask.FindSlice(test_id, og.variable);
    if (slice == nullptr || !slice->deterministic.contains(og.root)) continue;
    GraphDifference d;
    d.kind = DifferenceKind::kMissingStructure;
    d.depth = 1;
    d.expected = StructureDescriptor(GraphView(og), og.nodes.front());
    d.observed = std::string(kAbsent);
    attribute(og.variable, d, og.root);
  }

  SortRecords(&out);
  return out;
}

MutantDiff DiffMutant(const MutantEntry& mutant, const CorpusReader& corpus,
                      const ReferenceRuns& references,
                      const DeterminismMask& mask) {
  if (mutant.status != MutantStatus::kSurvived) {
    throw InputError("mutant '" + mutant.mutant_id + "' is not a surviving mutant");
  }
  MutantDiff result;
  std::vector<std::string> tests = mutant.covering_tests;
  std::sort(tests.begin(), tests.end());
  tests.erase(std::unique(tests.begin(), tests.end()), tests.end());
  for (const std::string& test_id : tests) {
    try {
      const auto ref = references.find(test_id);
      if (ref == references.end() || ref->second == nullptr) {
        throw IoError("no reference run for test '" + test_id + "'");
      }
      const SnapshotPtr run = corpus.LoadMutant(mutant.mutant_id, test_id);
      if (run->program_version != mutant.mutant_id || run->test_id != test_id) {
        throw InputError("snapshot for mutant '" + mutant.mutant_id +
                         "', test '" + test_id + "' is labeled '" +
                         run->program_version + "', '" + run->test_id + "'");
      }
      std::vector<InfectionRecord> records =
          DiffTestRun(*ref->second, *run, mask, &result.notices);
      result.records.insert(result.records.end(),
                            std::make_move_iterator(records.begin()),
                            std::make_move_iterator(records.end()));
    } catch (const Error& e) {
      result.failures.push_back({mutant.mutant_id, test_id, e.what()});
    }
  }
  SortRecords(&result.records);
  return result;
}

std::string SerializeRecordsJsonl(const std::vector<InfectionRecord>& records) {
  std::vector<InfectionRecord> sorted = records;
  SortRecords(&sorted);
  std::string out;
  for (const InfectionRecord& r : sorted) {
    Json j = Json::object();
    j["mutant_id"] = r.mutant_id;
    j["test_id"] = r.test_id;
    j["variable"] = internal::VariableToJson(r.variable);
    j["node_id"] = r.node_id;
    j["depth"] = r.depth;
    j["difference_kind"] = std::string(DifferenceKindName(r.kind));
    j["expected"] = r.expected;
    j["observed"] = r.observed;
    j["type_only"] = r.type_only;
    out += internal::Dump(j);
    out += '\n';
  }
  return out;
}

std::vector<InfectionRecord> ParseRecordsJsonl(std::string_view text) {
  std::vector<InfectionRecord> out;
  size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    const size_t line_start = start;
    start = end + 1;
    if (line.empty()) continue;
    Json j;
    try {
      j = internal::ParseJson(line);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(),
                       line_start + e.offset());
    }
    const std::string where = "line " + std::to_string(line_no);
    InfectionRecord r;
    r.mutant_id = internal::RequireString(j, "mutant_id", where);
    r.test_id = internal::RequireString(j, "test_id", where);
    r.variable = internal::VariableFromJson(internal::Require(j, "variable", where),
                                            where + ".variable");
    r.node_id = internal::RequireString(j, "node_id", where);
    r.depth = static_cast<int>(internal::RequireInt(j, "depth", where));
    const std::string kind = internal::RequireString(j, "difference_kind", where);
    const auto parsed = ParseDifferenceKind(kind);
    if (!parsed) {
      throw ValidationError(where + ".difference_kind", "unknown kind '" + kind + "'");
    }
    r.kind = *parsed;
    r.expected = internal::RequireString(j, "expected", where);
    r.observed = internal::RequireString(j, "observed", where);
    const Json& type_only = internal::Require(j, "type_only", where);
    if (!type_only.is_boolean()) {
      throw ValidationError(where + ".type_only", "expected a boolean");
    }
    r.type_only = type_only.get<bool>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace crossfire
