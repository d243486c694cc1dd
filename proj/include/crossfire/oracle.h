#ifndef CROSSFIRE_ORACLE_H_
#define CROSSFIRE_ORACLE_H_

// Exhaustive minimum set cover over a candidate matrix, for checking the
// greedy strategies on small instances.

#include <cstdint>
#include <vector>

#include "crossfire/candidate_matrix.h"
#include "crossfire/crossfire_select.h"
#include "crossfire/rational.h"

namespace crossfire {

inline constexpr int kOracleMaxGroups = 20;
inline constexpr int kOracleMaxMutants = 12;

enum class CoverDimension { kAssertion, kVariable, kTest };

CoverDimension DimensionOf(Strategy strategy);

// Kill sets of the groups in `dimension`, each the union of its candidates'.
std::vector<std::vector<std::string>> CoverGroups(const CandidateMatrix& matrix,
                                                  CoverDimension dimension);

// Fewest groups whose kill sets cover every killable mutant (0 if none).
// Throws SizeError above kOracleMaxGroups groups or kOracleMaxMutants mutants.
int ExactMinCover(const CandidateMatrix& matrix, CoverDimension dimension);

// H(k) = 1 + 1/2 + ... + 1/k, with k the largest group kill set.
Rational HarmonicBound(const CandidateMatrix& matrix, CoverDimension dimension);

}  // namespace crossfire

#endif  // CROSSFIRE_ORACLE_H_
