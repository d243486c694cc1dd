#include "crossfire/crossfire_select.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "crossfire/error.h"
#include "test_util.h"

namespace crossfire {
namespace {

using testing::CandidateSpec;
using testing::RecordsFor;

CandidateMatrix MatrixOf(const std::vector<CandidateSpec>& specs) {
  return BuildMatrix(BuildCandidates(RecordsFor(specs)));
}

std::vector<std::string> ChosenNodes(const CandidateMatrix& m, const Selection& s) {
  std::vector<std::string> out;
  for (const SelectionStep& step : s.steps) out.push_back(m.candidates[step.candidate].node_id);
  std::sort(out.begin(), out.end());
  return out;
}

// The account example's candidate structure: Test1 var1 f2 {m1,m2}, f3 {m3};
// Test1 var2 f4.f3 {m3}; Test2 var3 f8 {m2,m3}.
CandidateMatrix AccountExampleMatrix() {
  return MatrixOf({{"Test1", "var1", "var1.f2", {"m1", "m2"}},
                   {"Test1", "var1", "var1.f3", {"m3"}},
                   {"Test1", "var2", "var2.f4.f3", {"m3"}},
                   {"Test2", "var3", "var3.f8", {"m2", "m3"}}});
}

TEST(AssertionGreedyTest, ThreeCandidateExample) {
  const CandidateMatrix m =
      MatrixOf({{"T", "v", "v.a1", {"m1", "m2"}},
                {"T", "v", "v.a2", {"m2"}},
                {"T", "v", "v.a3", {"m3"}}});
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Selection s = SelectAssertionGreedy(m, seed);
    EXPECT_EQ(ChosenNodes(m, s), (std::vector<std::string>{"v.a1", "v.a3"}));
    EXPECT_EQ(s.n_assertions, 2);
    EXPECT_EQ(s.crossfire_factor, Rational(3, 2));
    EXPECT_EQ(s.crossfire_factor.ToFixed(1), "1.5");
  }
}

TEST(AssertionGreedyTest, DisjointSingletons) {
  std::vector<CandidateSpec> specs;
  for (int i = 0; i < 7; ++i) {
    specs.push_back({"T", "v", "v.x" + std::to_string(i), {"m" + std::to_string(i)}});
  }
  const Selection s = SelectAssertionGreedy(MatrixOf(specs), 3);
  EXPECT_EQ(s.n_assertions, 7);
  EXPECT_EQ(s.crossfire_factor, Rational::Integer(1));
}

TEST(AssertionGreedyTest, ThirtySixMutantsTwentySevenAssertions) {
  // Nine pairs and eighteen singletons: greedy must take all 27.
  std::vector<CandidateSpec> specs;
  int next = 0;
  auto mutant = [&] { return "m" + std::to_string(next++); };
  for (int i = 0; i < 9; ++i) {
    specs.push_back({"T", "v", "v.p" + std::to_string(i), {mutant(), mutant()}});
  }
  for (int i = 0; i < 18; ++i) specs.push_back({"T", "v", "v.s" + std::to_string(i), {mutant()}});
  const Selection s = SelectAssertionGreedy(MatrixOf(specs), 0);
  EXPECT_EQ(s.covered.size(), 36u);
  EXPECT_EQ(s.n_assertions, 27);
  EXPECT_EQ(s.crossfire_factor, Rational(36, 27));
  EXPECT_EQ(s.crossfire_factor.ToFixed(1), "1.3");
}

TEST(AssertionGreedyTest, EmptyMatrix) {
  const Selection s = SelectAssertionGreedy(BuildMatrix({}), 1);
  EXPECT_TRUE(s.steps.empty());
  EXPECT_EQ(s.crossfire_factor, Rational());
}

TEST(VariableGreedyTest, OneVariableCoversEverything) {
  const CandidateMatrix m = MatrixOf({{"T", "a", "a.x", {"m1", "m2"}},
                                      {"T", "a", "a.y", {"m3"}},
                                      {"T", "b", "b.x", {"m1"}}});
  const Selection s = SelectVariableGreedy(m, 5);
  EXPECT_EQ(s.n_variables, 1);
  EXPECT_EQ(s.n_assertions, 2);
  EXPECT_EQ(s.crossfire_factor, Rational::Integer(3));
}

TEST(VariableGreedyTest, TwoDisjointHalves) {
  const CandidateMatrix m = MatrixOf({{"T", "a", "a.x", {"m1", "m2"}},
                                      {"T", "b", "b.x", {"m3", "m4"}}});
  for (uint64_t seed = 0; seed < 30; ++seed) {
    EXPECT_EQ(SelectVariableGreedy(m, seed).n_variables, 2);
  }
}

TEST(TestGreedyTest, AccountExampleImprovesTestOneOnly) {
  const CandidateMatrix m = AccountExampleMatrix();
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Selection s = SelectTestGreedy(m, seed);
    EXPECT_EQ(s.n_tests, 1);
    for (const SelectionStep& step : s.steps) {
      EXPECT_EQ(m.candidates[step.candidate].test_id, "Test1");
    }
    EXPECT_EQ(s.covered, (std::set<std::string>{"m1", "m2", "m3"}));
    EXPECT_EQ(s.crossfire_factor, Rational::Integer(3));
  }
}

TEST(TestGreedyTest, DisjointPerTestCoverage) {
  const CandidateMatrix m = MatrixOf({{"T1", "a", "a.x", {"m1"}},
                                      {"T2", "a", "a.x", {"m2"}},
                                      {"T3", "a", "a.x", {"m3"}}});
  EXPECT_EQ(SelectTestGreedy(m, 0).n_tests, 3);
}

TEST(ShortestDepthFilterTest, AccountExampleDropsDeeperAlias) {
  const CandidateMatrix m = AccountExampleMatrix();
  const CandidateMatrix f = ShortestDepthFilter(m);
  std::vector<std::string> nodes;
  for (const AssertionCandidate& c : f.candidates) nodes.push_back(c.node_id);
  EXPECT_EQ(nodes, (std::vector<std::string>{"var1.f2", "var1.f3", "var3.f8"}));
  EXPECT_EQ(f.killable_mutants, m.killable_mutants);
}

TEST(ShortestDepthFilterTest, RestrictsKillSetsPerMutant) {
  // m1 is reachable at depth 2 elsewhere, m2 only at depth 3.
  const CandidateMatrix m = MatrixOf({{"T", "v", "v.a.b", {"m1", "m2"}},
                                      {"T", "v", "v.c", {"m1"}}});
  const CandidateMatrix f = ShortestDepthFilter(m);
  ASSERT_EQ(f.candidates.size(), 2u);
  EXPECT_EQ(f.candidates[0].node_id, "v.a.b");
  EXPECT_EQ(f.candidates[0].Kills(), std::vector<std::string>{"m2"});
}

TEST(ShortestDepthFilterTest, UniformDepthRemovesNothing) {
  const CandidateMatrix m = MatrixOf({{"T", "v", "v.a", {"m1", "m2"}}, {"T", "w", "w.b", {"m1"}}});
  EXPECT_EQ(ShortestDepthFilter(m), m);
}

TEST(RunRepeatedTest, TieFreeMatrixHasNoVariance) {
  const CandidateMatrix m =
      MatrixOf({{"T", "v", "v.a", {"m1", "m2", "m3"}},
                {"T", "v", "v.b", {"m4", "m5"}},
                {"T", "v", "v.c", {"m6"}}});
  const AggregatedSelection agg = RunRepeatedSerial(m, Strategy::kAssertionGreedy, 20, 100);
  EXPECT_EQ(agg.repeats(), 20);
  EXPECT_EQ(agg.seeds.front(), 100u);
  EXPECT_EQ(agg.seeds.back(), 119u);
  for (const Selection& s : agg.runs) EXPECT_EQ(s.steps, agg.runs.front().steps);
  EXPECT_EQ(agg.mean_assertions, Rational::Integer(3));
  EXPECT_EQ(agg.pooled_crossfire_factor, Rational::Integer(2));
  EXPECT_DOUBLE_EQ(agg.mean_crossfire_factor, 2.0);
}

TEST(AggregateTest, PooledVersusMeanFactor) {
  Selection a, b;
  a.strategy = b.strategy = Strategy::kAssertionGreedy;
  a.covered = b.covered = {"m1", "m2", "m3", "m4"};
  a.n_assertions = 2;
  a.crossfire_factor = Rational(4, 2);
  b.n_assertions = 4;
  b.crossfire_factor = Rational(4, 4);
  const AggregatedSelection agg = Aggregate({a, b});
  EXPECT_EQ(agg.mean_assertions, Rational::Integer(3));
  EXPECT_EQ(agg.pooled_crossfire_factor, Rational(4, 3));
  EXPECT_DOUBLE_EQ(agg.mean_crossfire_factor, 1.5);
  EXPECT_THROW(Aggregate({}), ConfigError);
  b.strategy = Strategy::kTestGreedy;
  EXPECT_THROW(Aggregate({a, b}), ConfigError);
}

TEST(TieBreakTest, SameSeedSameSelection) {
  std::vector<CandidateSpec> specs;
  for (int i = 0; i < 10; ++i) specs.push_back({"T", "v", "v.x" + std::to_string(i), {"m1"}});
  const CandidateMatrix m = MatrixOf(specs);
  std::set<size_t> first_picks;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(SelectAssertionGreedy(m, seed), SelectAssertionGreedy(m, seed));
    first_picks.insert(SelectAssertionGreedy(m, seed).steps[0].candidate);
    EXPECT_EQ(SelectAssertionGreedy(m, seed, TieBreak::kLexicographic).steps[0].candidate, 0u);
  }
  EXPECT_GT(first_picks.size(), 5u);
}

TEST(TieBreakTest, RandomTiesAreRoughlyUniform) {
  std::vector<CandidateSpec> specs;
  for (int i = 0; i < 4; ++i) specs.push_back({"T", "v", "v.x" + std::to_string(i), {"m1"}});
  const CandidateMatrix m = MatrixOf(specs);
  std::map<size_t, int> counts;
  for (uint64_t seed = 0; seed < 4000; ++seed) {
    ++counts[SelectAssertionGreedy(m, seed).steps[0].candidate];
  }
  ASSERT_EQ(counts.size(), 4u);
  // Binomial(4000, 1/4): sd ~ 27, so +-150 is more than five sd.
  for (const auto& [c, n] : counts) EXPECT_NEAR(n, 1000, 150) << c;
}

TEST(ParseTest, NamesRoundTrip) {
  for (Strategy s : kAllStrategies) EXPECT_EQ(ParseStrategy(StrategyName(s)), s);
  EXPECT_EQ(ParseTieBreak("lexicographic"), TieBreak::kLexicographic);
  EXPECT_FALSE(ParseStrategy("greedy"));
}

TEST(SelectionsJsonTest, RoundTrip) {
  const CandidateMatrix m = AccountExampleMatrix();
  SelectionReport report;
  report.depth_filter = false;
  for (Strategy s : kAllStrategies) {
    report.strategies.push_back(RunRepeatedSerial(m, s, 5, 7));
  }
  const std::string bytes = SerializeSelections(m, report);
  const SelectionReport back = ParseSelections(m, bytes);
  EXPECT_EQ(SerializeSelections(m, back), bytes);
  ASSERT_EQ(back.strategies.size(), 3u);
  EXPECT_EQ(back.strategies[2].runs, report.strategies[2].runs);
  EXPECT_FALSE(back.depth_filter);
  EXPECT_THROW(ParseSelections(BuildMatrix({}), bytes), ValidationError);
}

// Lexicographic greedy restated over plain sets: groups in key order,
// first maximal gain wins.
int OracleLexicographicCount(const CandidateMatrix& m, Strategy strategy) {
  std::vector<std::vector<size_t>> groups;
  if (strategy == Strategy::kAssertionGreedy) {
    std::vector<size_t> all(m.candidates.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    groups.push_back(all);
  } else if (strategy == Strategy::kVariableGreedy) {
    for (const auto& [k, idx] : m.by_variable) groups.push_back(idx);
  } else {
    for (const auto& [k, idx] : m.by_test) groups.push_back(idx);
  }
  std::set<std::string> covered;
  auto gain = [&](size_t c) {
    int g = 0;
    for (const std::string& k : m.candidates[c].Kills()) g += !covered.contains(k);
    return g;
  };
  auto group_gain = [&](const std::vector<size_t>& g) {
    std::set<std::string> u;
    for (size_t c : g) {
      for (const std::string& k : m.candidates[c].Kills()) {
        if (!covered.contains(k)) u.insert(k);
      }
    }
    return static_cast<int>(u.size());
  };
  int groups_chosen = 0, candidates_chosen = 0;
  while (covered.size() < m.killable_mutants.size()) {
    size_t best_group = 0;
    int best = 0;
    for (size_t g = 0; g < groups.size(); ++g) {
      if (group_gain(groups[g]) > best) {
        best = group_gain(groups[g]);
        best_group = g;
      }
    }
    ++groups_chosen;
    while (group_gain(groups[best_group]) > 0) {
      size_t best_c = 0;
      int best_g = 0;
      for (size_t c : groups[best_group]) {
        if (gain(c) > best_g) {
          best_g = gain(c);
          best_c = c;
        }
      }
      for (const std::string& k : m.candidates[best_c].Kills()) covered.insert(k);
      ++candidates_chosen;
    }
  }
  return strategy == Strategy::kAssertionGreedy ? candidates_chosen : groups_chosen;
}

TEST(SelectPropertyTest, GreedyInvariantsOnRandomMatrices) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const CandidateMatrix m = MatrixOf(testing::RandomSpecs(rng, 15, 30, 5, 3));
    for (Strategy strategy : kAllStrategies) {
      const Selection lex = Select(m, strategy, 0, TieBreak::kLexicographic);
      EXPECT_EQ(lex.PrimaryCount(), OracleLexicographicCount(m, strategy));
      for (uint64_t seed = 0; seed < 3; ++seed) {
        const Selection s = Select(m, strategy, seed + 1000 * trial);
        EXPECT_EQ(s.covered, m.killable_mutants);
        std::set<std::string> seen;
        for (const SelectionStep& step : s.steps) {
          ASSERT_FALSE(step.newly_covered.empty());
          for (const std::string& k : step.newly_covered) {
            EXPECT_TRUE(seen.insert(k).second);
            EXPECT_TRUE(m.candidates[step.candidate].Kills(k));
          }
        }
        EXPECT_EQ(s.crossfire_factor,
                  Rational(static_cast<int64_t>(s.covered.size()), s.PrimaryCount()));
        if (strategy == Strategy::kAssertionGreedy) {
          // Each step's gain is the best available at that point.
          std::set<std::string> covered;
          for (const SelectionStep& step : s.steps) {
            size_t best = 0;
            for (const AssertionCandidate& c : m.candidates) {
              size_t g = 0;
              for (const std::string& k : c.Kills()) g += !covered.contains(k);
              best = std::max(best, g);
            }
            EXPECT_EQ(step.newly_covered.size(), best);
            covered.insert(step.newly_covered.begin(), step.newly_covered.end());
          }
        }
      }
    }
  }
}

TEST(ShortestDepthFilterTest, CandidateMeanDepthCanRise) {
  // Dropping a shallow-but-not-shortest candidate raises the mean: the
  // mean-depth reduction is an empirical effect, not an invariant.
  const CandidateMatrix m = MatrixOf({{"T", "v", "v", {"m1"}},
                                      {"T", "w", "w.a", {"m1"}},
                                      {"T", "x", "x.a.b.c.d", {"m2"}}});
  const CandidateMatrix f = ShortestDepthFilter(m);
  EXPECT_EQ(f.candidates.size(), 2u);
  EXPECT_EQ(ComputeKillableStats(m, {}).avg_depth, Rational(8, 3));
  EXPECT_EQ(ComputeKillableStats(f, {}).avg_depth, Rational(3, 1));
}

TEST(ShortestDepthFilterPropertyTest, MinimumDepthPreserved) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const CandidateMatrix m = MatrixOf(testing::RandomSpecs(rng, 12, 25, 3, 3));
    const CandidateMatrix f = ShortestDepthFilter(m);
    auto min_depths = [](const CandidateMatrix& x) {
      std::map<std::string, int> out;
      for (const AssertionCandidate& c : x.candidates) {
        for (const std::string& k : c.Kills()) {
          auto [it, fresh] = out.emplace(k, c.depth);
          if (!fresh) it->second = std::min(it->second, c.depth);
        }
      }
      return out;
    };
    const auto before = min_depths(m);
    EXPECT_EQ(min_depths(f), before);
    EXPECT_EQ(f.killable_mutants, m.killable_mutants);
    for (const AssertionCandidate& c : f.candidates) {
      for (const std::string& k : c.Kills()) EXPECT_EQ(c.depth, before.at(k));
    }
    // Per mutant, the mean depth of its killing candidates cannot rise.
    auto per_mutant_mean = [](const CandidateMatrix& x, const std::string& k) {
      int64_t sum = 0, n = 0;
      for (const AssertionCandidate& c : x.candidates) {
        if (!c.Kills(k)) continue;
        sum += c.depth;
        ++n;
      }
      return Rational(sum, n);
    };
    for (const auto& [k, d] : before) {
      EXPECT_LE(per_mutant_mean(f, k), per_mutant_mean(m, k));
    }
  }
}

}  // namespace
}  // namespace crossfire
