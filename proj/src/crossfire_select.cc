#include "crossfire/crossfire_select.h"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>

#include "crossfire/error.h"
#include "json_codec.h"

namespace crossfire {

using internal::Json;

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 3> kStrategyNames{{
    {Strategy::kAssertionGreedy, "assertion-greedy"},
    {Strategy::kVariableGreedy, "variable-greedy"},
    {Strategy::kTestGreedy, "test-greedy"},
}};

// Dense view of a matrix: mutants and candidates as integers.
struct DenseMatrix {
  std::vector<std::string> mutants;                 // sorted
  std::vector<std::vector<uint32_t>> kills;         // per candidate
  std::vector<std::vector<size_t>> groups;          // per strategy unit
};

DenseMatrix Densify(const CandidateMatrix& matrix, Strategy strategy) {
  DenseMatrix d;
  d.mutants.assign(matrix.killable_mutants.begin(), matrix.killable_mutants.end());
  std::unordered_map<std::string_view, uint32_t> index;
  for (uint32_t i = 0; i < d.mutants.size(); ++i) index.emplace(d.mutants[i], i);
  d.kills.reserve(matrix.candidates.size());
  for (const AssertionCandidate& c : matrix.candidates) {
    auto& k = d.kills.emplace_back();
    for (const auto& [mutant, observed] : c.observed_by_mutant) {
      k.push_back(index.at(mutant));
    }
  }
  switch (strategy) {
    case Strategy::kAssertionGreedy:
      break;
    case Strategy::kVariableGreedy:
      for (const auto& [key, idx] : matrix.by_variable) d.groups.push_back(idx);
      break;
    case Strategy::kTestGreedy:
      for (const auto& [key, idx] : matrix.by_test) d.groups.push_back(idx);
      break;
  }
  return d;
}

class TieBreaker {
 public:
  TieBreaker(uint64_t seed, TieBreak mode) : rng_(seed), mode_(mode) {}

  // Picks one of `n` tied options.
  size_t Pick(size_t n) {
    if (n <= 1 || mode_ == TieBreak::kLexicographic) return 0;
    // Rejection sampling keeps the choice uniform and the same on every
    // standard library (mt19937_64's output sequence is fully specified).
    const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                           std::numeric_limits<uint64_t>::max() % n;
    uint64_t r;
    do {
      r = rng_();
    } while (r >= limit);
    return static_cast<size_t>(r % n);
  }

 private:
  std::mt19937_64 rng_;
  TieBreak mode_;
};

size_t Gain(const std::vector<uint32_t>& kills, const std::vector<char>& covered) {
  size_t g = 0;
  for (const uint32_t m : kills) g += !covered[m];
  return g;
}

// Greedy over `pool` (candidate indices). Stops when no candidate in the
// pool adds coverage. Appends to `steps`.
void GreedyCandidates(const DenseMatrix& d,
                      const std::vector<size_t>& pool, TieBreaker& ties,
                      std::vector<char>& covered, size_t& n_covered,
                      std::vector<SelectionStep>& steps) {
  std::vector<size_t> best;
  while (n_covered < d.mutants.size()) {
    size_t best_gain = 0;
    best.clear();
    for (const size_t c : pool) {
      const size_t g = Gain(d.kills[c], covered);
      if (g == 0 || g < best_gain) continue;
      if (g > best_gain) {
        best_gain = g;
        best.clear();
      }
      best.push_back(c);
    }
    if (best_gain == 0) return;
    const size_t chosen = best[ties.Pick(best.size())];
    SelectionStep step;
    step.candidate = chosen;
    for (const uint32_t m : d.kills[chosen]) {
      if (covered[m]) continue;
      covered[m] = 1;
      ++n_covered;
      step.newly_covered.push_back(d.mutants[m]);
    }
    steps.push_back(std::move(step));
  }
}

void Finish(const CandidateMatrix& matrix, Selection& s) {
  std::set<VariableKey> variables;
  std::set<std::string_view> tests;
  for (const SelectionStep& step : s.steps) {
    const AssertionCandidate& c = matrix.candidates[step.candidate];
    variables.emplace(c.test_id, c.variable);
    tests.insert(c.test_id);
    s.covered.insert(step.newly_covered.begin(), step.newly_covered.end());
  }
  s.n_assertions = static_cast<int64_t>(s.steps.size());
  s.n_variables = static_cast<int64_t>(variables.size());
  s.n_tests = static_cast<int64_t>(tests.size());
  const int64_t primary = s.PrimaryCount();
  s.crossfire_factor = primary > 0
                           ? Rational(static_cast<int64_t>(s.covered.size()), primary)
                           : Rational();
}

Selection GroupGreedy(const CandidateMatrix& matrix, Strategy strategy,
                      uint64_t seed, TieBreak tie_break) {
  const DenseMatrix d = Densify(matrix, strategy);
  TieBreaker ties(seed, tie_break);
  Selection s;
  s.strategy = strategy;
  s.tie_break = tie_break;
  s.seed = seed;
  std::vector<char> covered(d.mutants.size(), 0);
  size_t n_covered = 0;

  // Per group, the union of its candidates' kills.
  std::vector<std::vector<uint32_t>> reach;
  reach.reserve(d.groups.size());
  for (const auto& group : d.groups) {
    std::vector<uint32_t> u;
    for (const size_t c : group) u.insert(u.end(), d.kills[c].begin(), d.kills[c].end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    reach.push_back(std::move(u));
  }

  std::vector<size_t> best;
  while (n_covered < d.mutants.size()) {
    size_t best_gain = 0;
    best.clear();
    for (size_t g = 0; g < reach.size(); ++g) {
      const size_t gain = Gain(reach[g], covered);
      if (gain == 0 || gain < best_gain) continue;
      if (gain > best_gain) {
        best_gain = gain;
        best.clear();
      }
      best.push_back(g);
    }
    if (best_gain == 0) break;  // unreachable for a well-formed matrix
    const size_t group = best[ties.Pick(best.size())];
    GreedyCandidates(d, d.groups[group], ties, covered, n_covered, s.steps);
  }
  Finish(matrix, s);
  return s;
}

}  // namespace

std::string_view StrategyName(Strategy s) {
  for (const auto& [k, name] : kStrategyNames) {
    if (k == s) return name;
  }
  return "?";
}

std::optional<Strategy> ParseStrategy(std::string_view name) {
  for (const auto& [k, n] : kStrategyNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view TieBreakName(TieBreak t) {
  return t == TieBreak::kRandom ? "random" : "lexicographic";
}

std::optional<TieBreak> ParseTieBreak(std::string_view name) {
  if (name == "random") return TieBreak::kRandom;
  if (name == "lexicographic") return TieBreak::kLexicographic;
  return std::nullopt;
}

CandidateMatrix ShortestDepthFilter(const CandidateMatrix& matrix) {
  std::map<std::string, int> min_depth;
  for (const AssertionCandidate& c : matrix.candidates) {
    for (const auto& [mutant, observed] : c.observed_by_mutant) {
      auto [it, inserted] = min_depth.emplace(mutant, c.depth);
      if (!inserted) it->second = std::min(it->second, c.depth);
    }
  }
  std::vector<AssertionCandidate> kept;
  for (const AssertionCandidate& c : matrix.candidates) {
    AssertionCandidate restricted = c;
    std::erase_if(restricted.observed_by_mutant, [&](const auto& entry) {
      return min_depth.at(entry.first) != c.depth;
    });
    if (!restricted.observed_by_mutant.empty()) kept.push_back(std::move(restricted));
  }
  return BuildMatrix(std::move(kept));
}

int64_t Selection::PrimaryCount() const {
  switch (strategy) {
    case Strategy::kAssertionGreedy:
      return n_assertions;
    case Strategy::kVariableGreedy:
      return n_variables;
    case Strategy::kTestGreedy:
      return n_tests;
  }
  return n_assertions;
}

Selection SelectAssertionGreedy(const CandidateMatrix& matrix, uint64_t seed,
                                TieBreak tie_break) {
  const DenseMatrix d = Densify(matrix, Strategy::kAssertionGreedy);
  TieBreaker ties(seed, tie_break);
  Selection s;
  s.strategy = Strategy::kAssertionGreedy;
  s.tie_break = tie_break;
  s.seed = seed;
  std::vector<size_t> pool(matrix.candidates.size());
  for (size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  std::vector<char> covered(d.mutants.size(), 0);
  size_t n_covered = 0;
  GreedyCandidates(d, pool, ties, covered, n_covered, s.steps);
  Finish(matrix, s);
  return s;
}

Selection SelectVariableGreedy(const CandidateMatrix& matrix, uint64_t seed,
                               TieBreak tie_break) {
  return GroupGreedy(matrix, Strategy::kVariableGreedy, seed, tie_break);
}

Selection SelectTestGreedy(const CandidateMatrix& matrix, uint64_t seed,
                           TieBreak tie_break) {
  return GroupGreedy(matrix, Strategy::kTestGreedy, seed, tie_break);
}

Selection Select(const CandidateMatrix& matrix, Strategy strategy, uint64_t seed,
                 TieBreak tie_break) {
  switch (strategy) {
    case Strategy::kAssertionGreedy:
      return SelectAssertionGreedy(matrix, seed, tie_break);
    case Strategy::kVariableGreedy:
      return SelectVariableGreedy(matrix, seed, tie_break);
    case Strategy::kTestGreedy:
      return SelectTestGreedy(matrix, seed, tie_break);
  }
  return SelectAssertionGreedy(matrix, seed, tie_break);
}

Rational AggregatedSelection::MeanPrimaryCount() const {
  switch (strategy) {
    case Strategy::kAssertionGreedy:
      return mean_assertions;
    case Strategy::kVariableGreedy:
      return mean_variables;
    case Strategy::kTestGreedy:
      return mean_tests;
  }
  return mean_assertions;
}

AggregatedSelection Aggregate(std::vector<Selection> runs) {
  if (runs.empty()) throw ConfigError("cannot aggregate zero selection runs");
  AggregatedSelection agg;
  agg.strategy = runs.front().strategy;
  const int64_t r = static_cast<int64_t>(runs.size());
  int64_t a = 0, v = 0, t = 0;
  double factor_sum = 0.0;
  for (const Selection& s : runs) {
    if (s.strategy != agg.strategy) {
      throw ConfigError("cannot aggregate selections of different strategies");
    }
    agg.seeds.push_back(s.seed);
    a += s.n_assertions;
    v += s.n_variables;
    t += s.n_tests;
    factor_sum += s.crossfire_factor.ToDouble();
  }
  agg.covered = static_cast<int64_t>(runs.front().covered.size());
  agg.mean_assertions = Rational(a, r);
  agg.mean_variables = Rational(v, r);
  agg.mean_tests = Rational(t, r);
  agg.mean_crossfire_factor = factor_sum / static_cast<double>(r);
  const Rational primary = agg.MeanPrimaryCount();
  agg.pooled_crossfire_factor =
      primary.num() > 0 ? Rational::Integer(agg.covered) / primary : Rational();
  agg.runs = std::move(runs);
  return agg;
}

AggregatedSelection RunRepeatedSerial(const CandidateMatrix& matrix,
                                      Strategy strategy, int64_t repeats,
                                      uint64_t base_seed, TieBreak tie_break) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  std::vector<Selection> runs;
  runs.reserve(static_cast<size_t>(repeats));
  for (int64_t i = 0; i < repeats; ++i) {
    runs.push_back(Select(matrix, strategy, base_seed + static_cast<uint64_t>(i),
                          tie_break));
  }
  return Aggregate(std::move(runs));
}

std::string SerializeSelections(const CandidateMatrix& matrix,
                                const SelectionReport& report) {
  Json strategies = Json::array();
  for (const AggregatedSelection& agg : report.strategies) {
    Json runs = Json::array();
    for (const Selection& s : agg.runs) {
      Json chosen = Json::array();
      for (const SelectionStep& step : s.steps) {
        const AssertionCandidate& c = matrix.candidates[step.candidate];
        chosen.push_back(Json{{"candidate_id", c.candidate_id},
                              {"test_id", c.test_id},
                              {"variable", internal::VariableToJson(c.variable)},
                              {"node_id", c.node_id},
                              {"depth", c.depth},
                              {"newly_covered", step.newly_covered}});
      }
      runs.push_back(Json{{"seed", s.seed},
                          {"tie_break", std::string(TieBreakName(s.tie_break))},
                          {"chosen", std::move(chosen)},
                          {"n_assertions", s.n_assertions},
                          {"n_variables", s.n_variables},
                          {"n_tests", s.n_tests},
                          {"covered", s.covered.size()},
                          {"crossfire_factor", s.crossfire_factor.ToString()}});
    }
    strategies.push_back(
        Json{{"strategy", std::string(StrategyName(agg.strategy))},
             {"repeats", agg.repeats()},
             {"covered", agg.covered},
             {"mean_assertions", agg.mean_assertions.ToString()},
             {"mean_variables", agg.mean_variables.ToString()},
             {"mean_tests", agg.mean_tests.ToString()},
             {"mean_crossfire_factor", agg.mean_crossfire_factor},
             {"pooled_crossfire_factor", agg.pooled_crossfire_factor.ToString()},
             {"runs", std::move(runs)}});
  }
  Json j = Json::object();
  j["depth_filter"] = report.depth_filter;
  j["strategies"] = std::move(strategies);
  return internal::Dump(j);
}

SelectionReport ParseSelections(const CandidateMatrix& matrix, std::string_view bytes) {
  const Json j = internal::ParseJson(bytes);
  if (!j.is_object()) throw ValidationError("$", "expected an object");
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < matrix.candidates.size(); ++i) {
    index.emplace(matrix.candidates[i].candidate_id, i);
  }
  auto strings = [](const Json& arr, const std::string& where) {
    if (!arr.is_array()) throw ValidationError(where, "expected an array");
    std::vector<std::string> out;
    for (const Json& e : arr) {
      if (!e.is_string()) throw ValidationError(where, "expected strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  };

  SelectionReport report;
  const Json& filter = internal::Require(j, "depth_filter", "$");
  if (!filter.is_boolean()) throw ValidationError("$.depth_filter", "expected a boolean");
  report.depth_filter = filter.get<bool>();
  const Json& strategies = internal::Require(j, "strategies", "$");
  if (!strategies.is_array()) throw ValidationError("$.strategies", "expected an array");
  for (size_t si = 0; si < strategies.size(); ++si) {
    const std::string where = "$.strategies[" + std::to_string(si) + "]";
    const Json& js = strategies[si];
    const std::string name = internal::RequireString(js, "strategy", where);
    const auto strategy = ParseStrategy(name);
    if (!strategy) throw ValidationError(where + ".strategy", "unknown strategy");
    const Json& runs = internal::Require(js, "runs", where);
    if (!runs.is_array() || runs.empty()) {
      throw ValidationError(where + ".runs", "expected a non-empty array");
    }
    std::vector<Selection> parsed;
    for (size_t ri = 0; ri < runs.size(); ++ri) {
      const std::string rw = where + ".runs[" + std::to_string(ri) + "]";
      const Json& jr = runs[ri];
      Selection s;
      s.strategy = *strategy;
      const Json& seed = internal::Require(jr, "seed", rw);
      if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
        throw ValidationError(rw + ".seed", "expected an integer");
      }
      s.seed = seed.get<uint64_t>();
      const auto tie = ParseTieBreak(internal::RequireString(jr, "tie_break", rw));
      if (!tie) throw ValidationError(rw + ".tie_break", "unknown tie-break mode");
      s.tie_break = *tie;
      const Json& chosen = internal::Require(jr, "chosen", rw);
      if (!chosen.is_array()) throw ValidationError(rw + ".chosen", "expected an array");
      for (const Json& jc : chosen) {
        const std::string id = internal::RequireString(jc, "candidate_id", rw);
        const auto it = index.find(id);
        if (it == index.end()) {
          throw ValidationError(rw + ".chosen", "candidate '" + id + "' is not in the matrix");
        }
        SelectionStep step;
        step.candidate = it->second;
        step.newly_covered =
            strings(internal::Require(jc, "newly_covered", rw), rw + ".newly_covered");
        s.steps.push_back(std::move(step));
      }
      Finish(matrix, s);
      parsed.push_back(std::move(s));
    }
    report.strategies.push_back(Aggregate(std::move(parsed)));
  }
  return report;
}

}  // namespace crossfire
