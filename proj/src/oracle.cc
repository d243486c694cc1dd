#include "crossfire/oracle.h"

#include <algorithm>
#include <map>
#include <set>

#include "crossfire/error.h"

namespace crossfire {

CoverDimension DimensionOf(Strategy strategy) {
  switch (strategy) {
    case Strategy::kAssertionGreedy:
      return CoverDimension::kAssertion;
    case Strategy::kVariableGreedy:
      return CoverDimension::kVariable;
    case Strategy::kTestGreedy:
      return CoverDimension::kTest;
  }
  return CoverDimension::kAssertion;
}

std::vector<std::vector<std::string>> CoverGroups(const CandidateMatrix& matrix,
                                                  CoverDimension dimension) {
  auto unite = [&](const std::vector<size_t>& idx) {
    std::set<std::string> u;
    for (const size_t i : idx) {
      for (const auto& [m, observed] : matrix.candidates[i].observed_by_mutant) {
        u.insert(m);
      }
    }
    return std::vector<std::string>(u.begin(), u.end());
  };
  std::vector<std::vector<std::string>> groups;
  switch (dimension) {
    case CoverDimension::kAssertion:
      for (const AssertionCandidate& c : matrix.candidates) groups.push_back(c.Kills());
      break;
    case CoverDimension::kVariable:
      for (const auto& [key, idx] : matrix.by_variable) groups.push_back(unite(idx));
      break;
    case CoverDimension::kTest:
      for (const auto& [key, idx] : matrix.by_test) groups.push_back(unite(idx));
      break;
  }
  return groups;
}

int ExactMinCover(const CandidateMatrix& matrix, CoverDimension dimension) {
  const auto groups = CoverGroups(matrix, dimension);
  const size_t n_mutants = matrix.killable_mutants.size();
  if (groups.size() > static_cast<size_t>(kOracleMaxGroups) ||
      n_mutants > static_cast<size_t>(kOracleMaxMutants)) {
    throw SizeError("oracle instance has " + std::to_string(groups.size()) +
                    " groups and " + std::to_string(n_mutants) +
                    " killable mutants; limits are " +
                    std::to_string(kOracleMaxGroups) + " and " +
                    std::to_string(kOracleMaxMutants));
  }
  if (n_mutants == 0) return 0;

  std::map<std::string, int> bit;
  for (const std::string& m : matrix.killable_mutants) {
    bit.emplace(m, static_cast<int>(bit.size()));
  }
  std::vector<uint32_t> masks;
  for (const auto& g : groups) {
    uint32_t mask = 0;
    for (const std::string& m : g) mask |= 1u << bit.at(m);
    masks.push_back(mask);
  }
  const uint32_t full = (1u << n_mutants) - 1;

  // Breadth-first over coverage states: level d holds every state reachable
  // with d groups, so the first level containing `full` is the optimum.
  std::vector<char> seen(full + 1, 0);
  std::vector<uint32_t> level{0};
  seen[0] = 1;
  for (int depth = 1; !level.empty(); ++depth) {
    std::vector<uint32_t> next;
    for (const uint32_t state : level) {
      for (const uint32_t m : masks) {
        const uint32_t s = state | m;
        if (s == full) return depth;
        if (!seen[s]) {
          seen[s] = 1;
          next.push_back(s);
        }
      }
    }
    level = std::move(next);
  }
  throw DataIntegrityError("killable mutants are not covered by any group");
}

Rational HarmonicBound(const CandidateMatrix& matrix, CoverDimension dimension) {
  size_t k = 0;
  for (const auto& g : CoverGroups(matrix, dimension)) k = std::max(k, g.size());
  Rational h;
  for (size_t i = 1; i <= k; ++i) h = h + Rational(1, static_cast<int64_t>(i));
  return h;
}

}  // namespace crossfire
