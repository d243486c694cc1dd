#ifndef CROSSFIRE_CROSSFIRE_SELECT_H_
#define CROSSFIRE_CROSSFIRE_SELECT_H_

// Shortest-access-path filtering and the three greedy crossfire strategies.
//
//   assertion-greedy: repeatedly take the candidate killing the most
//                     not-yet-killed mutants.
//   variable-greedy:  repeatedly take the (test, variable) group killing the
//                     most, then greedily pick assertions inside it until the
//                     group adds nothing.
//   test-greedy:      the same with whole tests as groups.
//
// Ties are broken uniformly at random under an explicit seed, or by candidate
// order in lexicographic mode. Nothing that adds zero coverage is ever picked.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crossfire/candidate_matrix.h"
#include "crossfire/rational.h"

namespace crossfire {

enum class Strategy { kAssertionGreedy, kVariableGreedy, kTestGreedy };
enum class TieBreak { kRandom, kLexicographic };

inline constexpr Strategy kAllStrategies[] = {
    Strategy::kAssertionGreedy, Strategy::kVariableGreedy, Strategy::kTestGreedy};

std::string_view StrategyName(Strategy s);
std::optional<Strategy> ParseStrategy(std::string_view name);
std::string_view TieBreakName(TieBreak t);
std::optional<TieBreak> ParseTieBreak(std::string_view name);

// Keeps, for every killable mutant, only the candidates at that mutant's
// minimum access depth, and restricts each surviving candidate's kill set
// to the mutants for which it is at minimum depth. killable_mutants is
// unchanged.
CandidateMatrix ShortestDepthFilter(const CandidateMatrix& matrix);

struct SelectionStep {
  size_t candidate = 0;  // index into the matrix's candidates
  std::vector<std::string> newly_covered;

  bool operator==(const SelectionStep&) const = default;
};

struct Selection {
  Strategy strategy = Strategy::kAssertionGreedy;
  TieBreak tie_break = TieBreak::kRandom;
  uint64_t seed = 0;
  std::vector<SelectionStep> steps;
  std::set<std::string> covered;
  int64_t n_assertions = 0;
  int64_t n_variables = 0;  // distinct (test, variable) pairs
  int64_t n_tests = 0;
  // |covered| divided by the strategy's own unit count.
  Rational crossfire_factor;

  int64_t PrimaryCount() const;
  bool operator==(const Selection&) const = default;
};

Selection SelectAssertionGreedy(const CandidateMatrix& matrix, uint64_t seed,
                                TieBreak tie_break = TieBreak::kRandom);
Selection SelectVariableGreedy(const CandidateMatrix& matrix, uint64_t seed,
                               TieBreak tie_break = TieBreak::kRandom);
Selection SelectTestGreedy(const CandidateMatrix& matrix, uint64_t seed,
                           TieBreak tie_break = TieBreak::kRandom);
Selection Select(const CandidateMatrix& matrix, Strategy strategy, uint64_t seed,
                 TieBreak tie_break = TieBreak::kRandom);

struct AggregatedSelection {
  Strategy strategy = Strategy::kAssertionGreedy;
  std::vector<uint64_t> seeds;
  int64_t covered = 0;
  // Arithmetic means over the runs, kept exact.
  Rational mean_assertions;
  Rational mean_variables;
  Rational mean_tests;
  // Mean of the per-run factors. Denominators differ between runs, so an
  // exact sum could overflow; this one is a double.
  double mean_crossfire_factor = 0.0;
  // covered / mean primary count: rendered as "27.0 (1.3)".
  Rational pooled_crossfire_factor;
  std::vector<Selection> runs;

  int64_t repeats() const { return static_cast<int64_t>(runs.size()); }
  Rational MeanPrimaryCount() const;
};

// Requires at least one run, all of the same strategy.
AggregatedSelection Aggregate(std::vector<Selection> runs);

// R selections with seeds base_seed .. base_seed + R - 1, one after another.
// See RunRepeated in kernels.h for the parallel version.
AggregatedSelection RunRepeatedSerial(const CandidateMatrix& matrix,
                                      Strategy strategy, int64_t repeats,
                                      uint64_t base_seed,
                                      TieBreak tie_break = TieBreak::kRandom);

struct SelectionReport {
  bool depth_filter = true;
  std::vector<AggregatedSelection> strategies;
};

std::string SerializeSelections(const CandidateMatrix& matrix,
                                const SelectionReport& report);
// Inverse of SerializeSelections against the same matrix. Throws
// ValidationError when a chosen candidate id is not in `matrix`.
SelectionReport ParseSelections(const CandidateMatrix& matrix, std::string_view bytes);

}  // namespace crossfire

#endif  // CROSSFIRE_CROSSFIRE_SELECT_H_
