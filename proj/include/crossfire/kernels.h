#ifndef CROSSFIRE_KERNELS_H_
#define CROSSFIRE_KERNELS_H_

// Batch kernels over a whole corpus. Each has an OpenMP version and a serial
// reference; both return identical results (the parallel versions write into
// per-item slots and sort at the end).

#include <cstdint>
#include <string>
#include <vector>

#include "crossfire/corpus.h"
#include "crossfire/crossfire_select.h"
#include "crossfire/determinism.h"
#include "crossfire/infection_diff.h"

namespace crossfire {

// 0 means "all available threads".
int ResolveJobs(int jobs);

struct MaskFailure {
  std::string test_id;
  std::string message;

  bool operator==(const MaskFailure&) const = default;
};

struct MaskBatch {
  DeterminismMask mask;
  std::vector<MaskFailure> failures;  // tests whose runs could not be used
};

// One mask per manifest test from its n_runs original runs.
MaskBatch BuildMasksSerial(const CorpusReader& corpus, const MaskOptions& options);
MaskBatch BuildMasks(const CorpusReader& corpus, const MaskOptions& options,
                     int jobs);

struct DiffBatch {
  std::vector<InfectionRecord> records;  // RecordLess order
  std::vector<DiffFailure> failures;
  std::vector<std::string> notices;
};

// Diffs every surviving mutant's covering test runs against run 0.
DiffBatch DiffAllMutantsSerial(const CorpusReader& corpus,
                               const DeterminismMask& mask);
DiffBatch DiffAllMutants(const CorpusReader& corpus, const DeterminismMask& mask,
                         int jobs);

// Parallel counterpart of RunRepeatedSerial.
AggregatedSelection RunRepeated(const CandidateMatrix& matrix, Strategy strategy,
                                int64_t repeats, uint64_t base_seed,
                                TieBreak tie_break, int jobs);

}  // namespace crossfire

#endif  // CROSSFIRE_KERNELS_H_
