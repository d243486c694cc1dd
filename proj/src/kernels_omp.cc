#include <algorithm>
#include <thread>

#include <omp.h>

#include "crossfire/error.h"
#include "crossfire/kernels.h"
#include "kernels_common.h"

namespace crossfire {

int ResolveJobs(int jobs) {
  if (jobs > 0) return jobs;
  return std::max(1, omp_get_max_threads());
}

MaskBatch BuildMasks(const CorpusReader& corpus, const MaskOptions& options,
                     int jobs) {
  const std::vector<std::string>& tests = corpus.manifest().tests;
  std::vector<internal::MaskSlot> slots(tests.size());
  const int64_t n = static_cast<int64_t>(tests.size());
#pragma omp parallel for schedule(dynamic) num_threads(ResolveJobs(jobs))
  for (int64_t i = 0; i < n; ++i) {
    slots[i] = internal::MaskTest(corpus, options, tests[i]);
  }
  MaskBatch batch;
  batch.mask.n_runs_observed = corpus.manifest().n_runs;
  for (internal::MaskSlot& s : slots) {
    for (auto& [key, slice] : s.mask.entries) {
      batch.mask.entries.insert_or_assign(key, std::move(slice));
    }
    batch.failures.insert(batch.failures.end(), s.failures.begin(), s.failures.end());
  }
  return batch;
}

DiffBatch DiffAllMutants(const CorpusReader& corpus, const DeterminismMask& mask,
                         int jobs) {
  const ReferenceRuns refs = internal::LoadReferences(corpus);
  const std::vector<const MutantEntry*> mutants = internal::SurvivingEntries(corpus);
  std::vector<MutantDiff> slots(mutants.size());
  const int64_t n = static_cast<int64_t>(mutants.size());
#pragma omp parallel for schedule(dynamic) num_threads(ResolveJobs(jobs))
  for (int64_t i = 0; i < n; ++i) {
    slots[i] = DiffMutant(*mutants[i], corpus, refs, mask);
  }
  return internal::Collect(std::move(slots));
}

AggregatedSelection RunRepeated(const CandidateMatrix& matrix, Strategy strategy,
                                int64_t repeats, uint64_t base_seed,
                                TieBreak tie_break, int jobs) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  std::vector<Selection> runs(static_cast<size_t>(repeats));
#pragma omp parallel for schedule(dynamic) num_threads(ResolveJobs(jobs))
  for (int64_t i = 0; i < repeats; ++i) {
    runs[i] = Select(matrix, strategy, base_seed + static_cast<uint64_t>(i), tie_break);
  }
  return Aggregate(std::move(runs));
}

}  // namespace crossfire
