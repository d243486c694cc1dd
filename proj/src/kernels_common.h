#ifndef CROSSFIRE_SRC_KERNELS_COMMON_H_
#define CROSSFIRE_SRC_KERNELS_COMMON_H_

#include <string>
#include <vector>

#include "crossfire/kernels.h"

namespace crossfire::internal {

// Builds one test's mask into `batch`, or records why it could not.
void MaskOneTest(const CorpusReader& corpus, const MaskOptions& options,
                 const std::string& test_id, MaskBatch* batch);
// As above but returns the pieces so threads can work independently.
struct MaskSlot {
  DeterminismMask mask;
  std::vector<MaskFailure> failures;
};
MaskSlot MaskTest(const CorpusReader& corpus, const MaskOptions& options,
                  const std::string& test_id);

// Run 0 of every test that has one; tests without it are simply absent.
ReferenceRuns LoadReferences(const CorpusReader& corpus);
// Surviving mutants in id order.
std::vector<const MutantEntry*> SurvivingEntries(const CorpusReader& corpus);
DiffBatch Collect(std::vector<MutantDiff> slots);

}  // namespace crossfire::internal

#endif  // CROSSFIRE_SRC_KERNELS_COMMON_H_
