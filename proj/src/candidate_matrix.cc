#include "crossfire/candidate_matrix.h"

#include <algorithm>
#include <array>
#include <tuple>

#include "crossfire/error.h"
#include "crossfire/hash.h"
#include "json_codec.h"

namespace crossfire {

using internal::Json;

namespace {

constexpr std::array<std::pair<AssertionKind, std::string_view>, 5> kKindNames{{
    {AssertionKind::kValueEquality, "value-equality"},
    {AssertionKind::kNullCheck, "null-check"},
    {AssertionKind::kTypeCheck, "type-check"},
    {AssertionKind::kSizeCheck, "size-check"},
    {AssertionKind::kStructureCheck, "structure-check"},
}};

using GroupKey = std::tuple<std::string, RootVariable, std::string, AssertionKind,
                            std::string>;

}  // namespace

std::string_view AssertionKindName(AssertionKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<AssertionKind> ParseAssertionKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

AssertionKind AssertionKindFor(DifferenceKind kind) {
  switch (kind) {
    case DifferenceKind::kValue:
      return AssertionKind::kValueEquality;
    case DifferenceKind::kNullness:
      return AssertionKind::kNullCheck;
    case DifferenceKind::kType:
      return AssertionKind::kTypeCheck;
    case DifferenceKind::kCollectionSize:
      return AssertionKind::kSizeCheck;
    case DifferenceKind::kMissingStructure:
      return AssertionKind::kStructureCheck;
  }
  return AssertionKind::kValueEquality;
}

std::vector<std::string> AssertionCandidate::Kills() const {
  std::vector<std::string> out;
  out.reserve(observed_by_mutant.size());
  for (const auto& [mutant, observed] : observed_by_mutant) out.push_back(mutant);
  return out;
}

std::string CandidateId(const std::string& test_id, const RootVariable& variable,
                        const std::string& node_id, AssertionKind kind,
                        const std::string& expected) {
  // Unit separators keep field boundaries unambiguous.
  std::string key;
  key += test_id;
  key += '\x1f';
  key += variable.name;
  key += '\x1f';
  key += VariableKindName(variable.kind);
  key += '\x1f';
  key += std::to_string(variable.ordinal);
  key += '\x1f';
  key += node_id;
  key += '\x1f';
  key += AssertionKindName(kind);
  key += '\x1f';
  key += expected;
  return "c" + HashToHex(Fnv1a64(key));
}

std::vector<AssertionCandidate> BuildCandidates(
    const std::vector<InfectionRecord>& records) {
  std::map<GroupKey, AssertionCandidate> groups;
  // (test, variable, node, kind) -> expected, to catch contradictions.
  std::map<std::tuple<std::string, RootVariable, std::string, AssertionKind>,
           const std::string*>
      expected_at;

  for (const InfectionRecord& r : records) {
    const AssertionKind kind = AssertionKindFor(r.kind);
    const auto [it, inserted] = expected_at.emplace(
        std::make_tuple(r.test_id, r.variable, r.node_id, kind), &r.expected);
    if (!inserted && *it->second != r.expected) {
      throw DataIntegrityError(
          "location " + r.node_id + " in test '" + r.test_id +
          "' has two expected values ('" + *it->second + "' and '" + r.expected +
          "'); a deterministic location cannot");
    }
    GroupKey key(r.test_id, r.variable, r.node_id, kind, r.expected);
    auto [git, fresh] = groups.try_emplace(std::move(key));
    AssertionCandidate& c = git->second;
    if (fresh) {
      c.test_id = r.test_id;
      c.variable = r.variable;
      c.node_id = r.node_id;
      c.depth = r.depth;
      c.kind = kind;
      c.expected = r.expected;
      c.candidate_id = CandidateId(r.test_id, r.variable, r.node_id, kind, r.expected);
    }
    // A mutant can only reach one location once per (test, variable); keep
    // the smallest observed value if a caller passes duplicates.
    auto [oit, added] = c.observed_by_mutant.emplace(r.mutant_id, r.observed);
    if (!added && r.observed < oit->second) oit->second = r.observed;
  }

  std::vector<AssertionCandidate> out;
  out.reserve(groups.size());
  for (auto& [key, c] : groups) out.push_back(std::move(c));
  return out;
}

CandidateMatrix BuildMatrix(std::vector<AssertionCandidate> candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const AssertionCandidate& a, const AssertionCandidate& b) {
              return std::tie(a.test_id, a.variable, a.node_id, a.kind, a.expected) <
                     std::tie(b.test_id, b.variable, b.node_id, b.kind, b.expected);
            });
  CandidateMatrix m;
  m.candidates = std::move(candidates);
  for (size_t i = 0; i < m.candidates.size(); ++i) {
    const AssertionCandidate& c = m.candidates[i];
    m.by_variable[VariableKey(c.test_id, c.variable)].push_back(i);
    m.by_test[c.test_id].push_back(i);
    for (const auto& [mutant, observed] : c.observed_by_mutant) {
      m.killable_mutants.insert(mutant);
    }
  }
  return m;
}

KillableStats ComputeKillableStats(const CandidateMatrix& matrix,
                                   const MutantManifest& manifest) {
  KillableStats s;
  s.killable = static_cast<int64_t>(matrix.killable_mutants.size());
  s.surviving = static_cast<int64_t>(manifest.SurvivingMutants().size());
  s.killable_ratio = s.surviving > 0 ? Rational(s.killable, s.surviving) : Rational();

  struct Ways {
    int64_t assertions = 0;
    std::set<VariableKey> variables;
    std::set<RootVariable> variables_global;
    std::set<std::string> tests;
  };
  std::map<std::string, Ways> per_mutant;
  std::set<VariableKey> variables;
  std::set<RootVariable> variables_global;
  std::set<std::string> tests;
  int64_t depth_sum = 0;

  for (const AssertionCandidate& c : matrix.candidates) {
    depth_sum += c.depth;
    variables.emplace(c.test_id, c.variable);
    variables_global.insert(c.variable);
    tests.insert(c.test_id);
    for (const auto& [mutant, observed] : c.observed_by_mutant) {
      Ways& w = per_mutant[mutant];
      ++w.assertions;
      w.variables.emplace(c.test_id, c.variable);
      w.variables_global.insert(c.variable);
      w.tests.insert(c.test_id);
    }
  }

  s.total_assertions = static_cast<int64_t>(matrix.candidates.size());
  s.total_variables = static_cast<int64_t>(variables.size());
  s.total_variables_global = static_cast<int64_t>(variables_global.size());
  s.total_tests = static_cast<int64_t>(tests.size());
  if (!matrix.candidates.empty()) s.avg_depth = Rational(depth_sum, s.total_assertions);

  if (!per_mutant.empty()) {
    s.averages_defined = true;
    int64_t a = 0, v = 0, vg = 0, t = 0;
    for (const auto& [mutant, w] : per_mutant) {
      a += w.assertions;
      v += static_cast<int64_t>(w.variables.size());
      vg += static_cast<int64_t>(w.variables_global.size());
      t += static_cast<int64_t>(w.tests.size());
    }
    const int64_t n = static_cast<int64_t>(per_mutant.size());
    s.avg_assertions = Rational(a, n);
    s.avg_variables = Rational(v, n);
    s.avg_variables_global = Rational(vg, n);
    s.avg_tests = Rational(t, n);
  }
  return s;
}

std::string SerializeMatrix(const CandidateMatrix& matrix) {
  Json candidates = Json::array();
  for (const AssertionCandidate& c : matrix.candidates) {
    Json kills = Json::array();
    for (const auto& [mutant, observed] : c.observed_by_mutant) {
      kills.push_back(Json{{"mutant_id", mutant}, {"observed", observed}});
    }
    Json j = Json::object();
    j["id"] = c.candidate_id;
    j["test_id"] = c.test_id;
    j["variable"] = internal::VariableToJson(c.variable);
    j["node_id"] = c.node_id;
    j["depth"] = c.depth;
    j["assertion_kind"] = std::string(AssertionKindName(c.kind));
    j["expected"] = c.expected;
    j["kills"] = std::move(kills);
    candidates.push_back(std::move(j));
  }
  Json by_variable = Json::array();
  for (const auto& [key, idx] : matrix.by_variable) {
    Json ids = Json::array();
    for (const size_t i : idx) ids.push_back(matrix.candidates[i].candidate_id);
    by_variable.push_back(Json{{"test_id", key.first},
                               {"variable", internal::VariableToJson(key.second)},
                               {"candidates", std::move(ids)}});
  }
  Json by_test = Json::object();
  for (const auto& [test, idx] : matrix.by_test) {
    Json ids = Json::array();
    for (const size_t i : idx) ids.push_back(matrix.candidates[i].candidate_id);
    by_test[test] = std::move(ids);
  }
  Json j = Json::object();
  j["candidates"] = std::move(candidates);
  j["by_variable"] = std::move(by_variable);
  j["by_test"] = std::move(by_test);
  j["killable_mutants"] = matrix.killable_mutants;
  return internal::Dump(j);
}

CandidateMatrix ParseMatrix(std::string_view bytes) {
  const Json j = internal::ParseJson(bytes);
  if (!j.is_object()) throw ValidationError("$", "expected an object");
  const Json& list = internal::Require(j, "candidates", "$");
  if (!list.is_array()) throw ValidationError("$.candidates", "expected an array");
  std::vector<AssertionCandidate> candidates;
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string where = "$.candidates[" + std::to_string(i) + "]";
    const Json& jc = list[i];
    AssertionCandidate c;
    c.candidate_id = internal::RequireString(jc, "id", where);
    c.test_id = internal::RequireString(jc, "test_id", where);
    c.variable = internal::VariableFromJson(internal::Require(jc, "variable", where),
                                            where + ".variable");
    c.node_id = internal::RequireString(jc, "node_id", where);
    c.depth = static_cast<int>(internal::RequireInt(jc, "depth", where));
    const std::string kind = internal::RequireString(jc, "assertion_kind", where);
    const auto parsed = ParseAssertionKind(kind);
    if (!parsed) throw ValidationError(where + ".assertion_kind", "unknown kind");
    c.kind = *parsed;
    c.expected = internal::RequireString(jc, "expected", where);
    const Json& kills = internal::Require(jc, "kills", where);
    if (!kills.is_array() || kills.empty()) {
      throw ValidationError(where + ".kills", "expected a non-empty array");
    }
    for (const Json& k : kills) {
      c.observed_by_mutant.emplace(internal::RequireString(k, "mutant_id", where),
                                   internal::RequireString(k, "observed", where));
    }
    candidates.push_back(std::move(c));
  }
  return BuildMatrix(std::move(candidates));
}

std::string SerializeStats(const KillableStats& s) {
  Json j = Json::object();
  j["killable"] = s.killable;
  j["surviving"] = s.surviving;
  j["killable_ratio"] = s.killable_ratio.ToString();
  j["averages_defined"] = s.averages_defined;
  j["avg_assertions"] = s.avg_assertions.ToString();
  j["avg_variables"] = s.avg_variables.ToString();
  j["avg_variables_global"] = s.avg_variables_global.ToString();
  j["avg_tests"] = s.avg_tests.ToString();
  j["total_assertions"] = s.total_assertions;
  j["total_variables"] = s.total_variables;
  j["total_variables_global"] = s.total_variables_global;
  j["total_tests"] = s.total_tests;
  j["avg_depth"] = s.avg_depth.ToString();
  return internal::Dump(j);
}

}  // namespace crossfire
