#include "crossfire/determinism.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "crossfire/error.h"
#include "crossfire/hash.h"
#include "json_codec.h"

namespace crossfire {

using internal::Json;

const VariableMask& DeterminismMask::Slice(const std::string& test_id,
                                           const RootVariable& variable) const {
  const VariableMask* slice = FindSlice(test_id, variable);
  if (slice == nullptr) {
    throw LookupError("no determinism mask for test '" + test_id +
                      "', variable '" + DescribeVariable(variable) + "'");
  }
  return *slice;
}

const VariableMask* DeterminismMask::FindSlice(
    const std::string& test_id, const RootVariable& variable) const {
  const auto it = entries.find(MaskKey(test_id, variable));
  return it == entries.end() ? nullptr : &it->second;
}

void DeterminismMask::Merge(DeterminismMask other) {
  if (entries.empty() && n_runs_observed == 0) {
    n_runs_observed = other.n_runs_observed;
  } else if (other.n_runs_observed != n_runs_observed) {
    throw ConfigError("cannot merge masks built from different run counts");
  }
  for (auto& [key, slice] : other.entries) {
    entries.insert_or_assign(key, std::move(slice));
  }
}

namespace {

uint64_t RelativeDigest(const VariableMask& mask, const std::string& root) {
  uint64_t h = kFnvOffsetBasis;
  for (const auto& [tag, ids] :
       {std::pair{"D", &mask.deterministic}, std::pair{"N", &mask.nondeterministic}}) {
    for (const std::string& id : *ids) {
      h = Fnv1a64(tag, h);
      h = Fnv1a64(RerootPath(id, root, "$"), h);
      h = Fnv1a64("\n", h);
    }
  }
  return h;
}

bool SameShape(const GraphNode& a, const GraphNode& b) {
  return a.kind == b.kind && a.type_name == b.type_name && a.size == b.size;
}

VariableMask MaskVariable(const std::vector<const VariableGraph*>& graphs,
                          const MaskOptions& options) {
  VariableMask mask;
  const bool present_everywhere =
      std::none_of(graphs.begin(), graphs.end(),
                   [](const VariableGraph* g) { return g == nullptr; });

  std::vector<std::unordered_map<std::string_view, const GraphNode*>> by_run;
  std::set<std::string> all_ids;
  for (const VariableGraph* g : graphs) {
    auto& index = by_run.emplace_back();
    if (g == nullptr) continue;
    for (const GraphNode& n : g->nodes) {
      index.emplace(n.id, &n);
      all_ids.insert(n.id);
    }
  }
  if (!present_everywhere) {
    mask.nondeterministic = std::move(all_ids);
    return mask;
  }

  // Shallowest first, so a parent is classified before its children.
  std::vector<std::pair<int, const std::string*>> ordered;
  ordered.reserve(all_ids.size());
  for (const std::string& id : all_ids) ordered.emplace_back(PathDepth(id), &id);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::unordered_set<std::string_view> structural;
  for (const auto& [depth, id_ptr] : ordered) {
    const std::string& id = *id_ptr;
    bool is_structural = false;
    bool is_value = false;
    const std::optional<std::string> parent = ParentPath(id);
    if (parent && structural.contains(*parent)) is_structural = true;

    const GraphNode* first = nullptr;
    for (const auto& index : by_run) {
      if (is_structural) break;
      const auto it = index.find(id);
      if (it == index.end()) {
        is_structural = true;
        break;
      }
      const GraphNode* n = it->second;
      if (options.excluded_types.contains(n->type_name)) {
        is_structural = true;
        break;
      }
      if (first == nullptr) {
        first = n;
        continue;
      }
      if (!SameShape(*first, *n)) {
        is_structural = true;
      } else if (first->value != n->value || first->ref_target != n->ref_target) {
        is_value = true;
      }
    }

    if (is_structural) {
      structural.insert(id);
      mask.nondeterministic.insert(id);
    } else if (is_value) {
      mask.nondeterministic.insert(id);
    } else {
      mask.deterministic.insert(id);
    }
  }
  return mask;
}

}  // namespace

DeterminismMask BuildMask(std::span<const TestRunSnapshot> runs,
                          const MaskOptions& options) {
  if (runs.size() < 2) {
    throw ConfigError("determinism mask needs at least 2 original runs, got " +
                      std::to_string(runs.size()));
  }
  const std::string& test_id = runs.front().test_id;
  for (const TestRunSnapshot& run : runs) {
    if (run.test_id != test_id) {
      throw InputError("mask runs mix tests '" + test_id + "' and '" +
                       run.test_id + "'");
    }
    if (!run.is_original()) {
      throw InputError("mask run for '" + test_id + "' comes from '" +
                       run.program_version + "', not the original program");
    }
    if (run.outcome != runs.front().outcome) {
      throw InputError("test '" + test_id +
                       "' is flaky: pass/fail differs across original runs");
    }
  }

  std::set<RootVariable> variables;
  for (const TestRunSnapshot& run : runs) {
    for (const VariableGraph& g : run.variables) variables.insert(g.variable);
  }

  DeterminismMask mask;
  mask.n_runs_observed = static_cast<int64_t>(runs.size());
  for (const RootVariable& v : variables) {
    std::vector<const VariableGraph*> graphs;
    graphs.reserve(runs.size());
    for (const TestRunSnapshot& run : runs) graphs.push_back(run.FindVariable(v));
    VariableMask slice = MaskVariable(graphs, options);
    slice.relative_digest = RelativeDigest(slice, EscapePathSegment(v.name));
    mask.entries.emplace(MaskKey(test_id, v), std::move(slice));
  }
  return mask;
}

bool IsDeterministic(const DeterminismMask& mask, const std::string& test_id,
                     const RootVariable& variable, const std::string& node_id) {
  return mask.Slice(test_id, variable).deterministic.contains(node_id);
}

std::string SerializeMask(const DeterminismMask& mask) {
  Json entries = Json::array();
  for (const auto& [key, slice] : mask.entries) {
    Json e = Json::object();
    e["test_id"] = key.first;
    e["variable"] = internal::VariableToJson(key.second);
    e["deterministic"] = slice.deterministic;
    e["nondeterministic"] = slice.nondeterministic;
    e["relative_digest"] = HashToHex(slice.relative_digest);
    entries.push_back(std::move(e));
  }
  Json j = Json::object();
  j["entries"] = std::move(entries);
  j["n_runs_observed"] = mask.n_runs_observed;
  return internal::Dump(j);
}

DeterminismMask ParseMask(std::string_view bytes) {
  const Json j = internal::ParseJson(bytes);
  if (!j.is_object()) throw ValidationError("$", "expected an object");
  DeterminismMask mask;
  mask.n_runs_observed = internal::RequireInt(j, "n_runs_observed", "$");
  const Json& entries = internal::Require(j, "entries", "$");
  if (!entries.is_array()) throw ValidationError("$.entries", "expected an array");
  for (size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "$.entries[" + std::to_string(i) + "]";
    const Json& e = entries[i];
    if (!e.is_object()) throw ValidationError(where, "expected an object");
    MaskKey key(internal::RequireString(e, "test_id", where),
                internal::VariableFromJson(internal::Require(e, "variable", where),
                                           where + ".variable"));
    VariableMask slice;
    for (const auto* field : {"deterministic", "nondeterministic"}) {
      const Json& ids = internal::Require(e, field, where);
      if (!ids.is_array()) {
        throw ValidationError(where + "." + field, "expected an array");
      }
      auto& target = std::string_view(field) == "deterministic"
                         ? slice.deterministic
                         : slice.nondeterministic;
      for (const Json& id : ids) {
        if (!id.is_string()) {
          throw ValidationError(where + "." + field, "expected strings");
        }
        target.insert(id.get<std::string>());
      }
    }
    if (!HexToHash(internal::RequireString(e, "relative_digest", where),
                   &slice.relative_digest)) {
      throw ValidationError(where + ".relative_digest", "expected 16 hex digits");
    }
    mask.entries.emplace(std::move(key), std::move(slice));
  }
  return mask;
}

}  // namespace crossfire
