#include <algorithm>

#include "crossfire/error.h"
#include "crossfire/kernels.h"
#include "kernels_common.h"

namespace crossfire {

MaskBatch BuildMasksSerial(const CorpusReader& corpus, const MaskOptions& options) {
  const MutantManifest& manifest = corpus.manifest();
  MaskBatch batch;
  batch.mask.n_runs_observed = manifest.n_runs;
  for (const std::string& test : manifest.tests) {
    internal::MaskOneTest(corpus, options, test, &batch);
  }
  return batch;
}

DiffBatch DiffAllMutantsSerial(const CorpusReader& corpus,
                               const DeterminismMask& mask) {
  const ReferenceRuns refs = internal::LoadReferences(corpus);
  std::vector<const MutantEntry*> mutants = internal::SurvivingEntries(corpus);
  std::vector<MutantDiff> slots(mutants.size());
  for (size_t i = 0; i < mutants.size(); ++i) {
    slots[i] = DiffMutant(*mutants[i], corpus, refs, mask);
  }
  return internal::Collect(std::move(slots));
}

}  // namespace crossfire
