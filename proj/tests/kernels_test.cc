#include "crossfire/kernels.h"

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "crossfire/candidate_matrix.h"
#include "crossfire/synthetic.h"
#include "test_util.h"

namespace crossfire {
namespace {

ScenarioSpec SpecFor(uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.n_tests = 6;
  spec.n_mutants = 40;
  spec.nondeterminism_rate = 0.2;
  spec.masked_infections = seed % 2 == 0;
  spec.n_runs = 4;
  return spec;
}

void ExpectSameAggregate(const AggregatedSelection& a, const AggregatedSelection& b) {
  EXPECT_EQ(a.strategy, b.strategy);
  EXPECT_EQ(a.seeds, b.seeds);
  EXPECT_EQ(a.covered, b.covered);
  EXPECT_EQ(a.mean_assertions, b.mean_assertions);
  EXPECT_EQ(a.mean_variables, b.mean_variables);
  EXPECT_EQ(a.mean_tests, b.mean_tests);
  EXPECT_EQ(a.mean_crossfire_factor, b.mean_crossfire_factor);
  EXPECT_EQ(a.pooled_crossfire_factor, b.pooled_crossfire_factor);
  EXPECT_EQ(a.runs, b.runs);
}

TEST(ResolveJobsTest, PositivePassesThroughZeroMeansAll) {
  EXPECT_EQ(ResolveJobs(3), 3);
  EXPECT_GE(ResolveJobs(0), 1);
}

TEST(KernelsTest, ParallelMatchesSerialOnGeneratedCorpora) {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    const GeneratedCorpus g = GenerateCorpus(SpecFor(seed));
    const MaskBatch serial_mask = BuildMasksSerial(g.corpus, {});
    for (const int jobs : {1, 4}) {
      const MaskBatch mask = BuildMasks(g.corpus, {}, jobs);
      EXPECT_EQ(mask.mask, serial_mask.mask) << "seed " << seed;
      EXPECT_EQ(mask.failures, serial_mask.failures);

      const DiffBatch serial = DiffAllMutantsSerial(g.corpus, serial_mask.mask);
      const DiffBatch parallel = DiffAllMutants(g.corpus, mask.mask, jobs);
      EXPECT_EQ(parallel.records, serial.records) << "seed " << seed;
      EXPECT_EQ(parallel.failures, serial.failures);
      EXPECT_EQ(parallel.notices, serial.notices);
      EXPECT_EQ(serial.records, g.truth.records) << "seed " << seed;
    }
  }
}

TEST(KernelsTest, ExcludedTypesAgree) {
  const GeneratedCorpus g = GenerateCorpus(SpecFor(5));
  MaskOptions options;
  options.excluded_types = {"T0", "Node", "List"};
  EXPECT_EQ(BuildMasks(g.corpus, options, 3).mask, BuildMasksSerial(g.corpus, options).mask);
}

TEST(KernelsTest, RunRepeatedMatchesSerial) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const CandidateMatrix m = BuildMatrix(
        BuildCandidates(testing::RecordsFor(testing::RandomSpecs(rng, 25, 40, 5, 3))));
    for (const Strategy s : kAllStrategies) {
      for (const TieBreak t : {TieBreak::kRandom, TieBreak::kLexicographic}) {
        const AggregatedSelection serial = RunRepeatedSerial(m, s, 9, 100, t);
        for (const int jobs : {1, 3}) {
          ExpectSameAggregate(RunRepeated(m, s, 9, 100, t, jobs), serial);
        }
      }
    }
  }
}

}  // namespace
}  // namespace crossfire
