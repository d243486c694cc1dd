#include "kernels_common.h"

#include <algorithm>

#include "crossfire/error.h"

namespace crossfire::internal {

MaskSlot MaskTest(const CorpusReader& corpus, const MaskOptions& options,
                  const std::string& test_id) {
  MaskSlot slot;
  try {
    std::vector<TestRunSnapshot> runs;
    const int64_t n = corpus.manifest().n_runs;
    runs.reserve(static_cast<size_t>(std::max<int64_t>(n, 0)));
    for (int64_t k = 0; k < n; ++k) runs.push_back(*corpus.LoadOriginal(k, test_id));
    slot.mask = BuildMask(runs, options);
  } catch (const Error& e) {
    slot.failures.push_back({test_id, e.what()});
  }
  return slot;
}

void MaskOneTest(const CorpusReader& corpus, const MaskOptions& options,
                 const std::string& test_id, MaskBatch* batch) {
  MaskSlot slot = MaskTest(corpus, options, test_id);
  for (auto& [key, slice] : slot.mask.entries) {
    batch->mask.entries.insert_or_assign(key, std::move(slice));
  }
  batch->failures.insert(batch->failures.end(), slot.failures.begin(),
                         slot.failures.end());
}

ReferenceRuns LoadReferences(const CorpusReader& corpus) {
  ReferenceRuns refs;
  for (const std::string& test : corpus.manifest().tests) {
    try {
      refs.emplace(test, corpus.LoadOriginal(0, test));
    } catch (const Error&) {
      // Reported per mutant by DiffMutant.
    }
  }
  return refs;
}

std::vector<const MutantEntry*> SurvivingEntries(const CorpusReader& corpus) {
  std::vector<const MutantEntry*> out;
  for (const MutantEntry& m : corpus.manifest().mutants) {
    if (m.status == MutantStatus::kSurvived) out.push_back(&m);
  }
  std::sort(out.begin(), out.end(), [](const MutantEntry* a, const MutantEntry* b) {
    return a->mutant_id < b->mutant_id;
  });
  return out;
}

DiffBatch Collect(std::vector<MutantDiff> slots) {
  DiffBatch batch;
  size_t total = 0;
  for (const MutantDiff& s : slots) total += s.records.size();
  batch.records.reserve(total);
  for (MutantDiff& s : slots) {
    batch.records.insert(batch.records.end(), std::make_move_iterator(s.records.begin()),
                         std::make_move_iterator(s.records.end()));
    batch.failures.insert(batch.failures.end(), s.failures.begin(), s.failures.end());
    batch.notices.insert(batch.notices.end(), s.notices.begin(), s.notices.end());
  }
  SortRecords(&batch.records);
  return batch;
}

}  // namespace crossfire::internal
