#ifndef CROSSFIRE_PIPELINE_H_
#define CROSSFIRE_PIPELINE_H_

// Stage orchestration over an on-disk corpus.
//
// Every stage writes its artifact into the output directory together with a
// key file holding the digest of its inputs. A stage whose key matches is
// skipped and its artifact is read back instead, so re-running `pipeline`
// only redoes stages whose inputs changed.
//
//   baseline  mask.json, baseline-failures.jsonl
//   diff      records.jsonl, diff-failures.jsonl
//   matrix    matrix.json, matrix-filtered.json, stats.json
//   select    selections.json
//   report    report.md, stats.csv, selection-summary.csv, suggestions.jsonl,
//             capability-grid.csv (with kills.jsonl and assertions.json)

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crossfire/candidate_matrix.h"
#include "crossfire/crossfire_select.h"
#include "crossfire/determinism.h"
#include "crossfire/infection_diff.h"
#include "crossfire/report.h"
#include "crossfire/snapshot.h"

namespace crossfire {

inline constexpr const char* kCorpusEnvVar = "CROSSFIRE_CORPUS";
inline constexpr const char* kKillsFile = "kills.jsonl";
inline constexpr const char* kInventoryFile = "assertions.json";

struct RunConfig {
  std::filesystem::path corpus;
  // Defaults to <corpus>/crossfire-out.
  std::filesystem::path out;
  // 0 means the manifest's n_runs.
  int64_t n_runs = 0;
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  int64_t repeats = 20;
  uint64_t seed = 0;
  TieBreak tie_break = TieBreak::kRandom;
  bool depth_filter = true;
  int depth_cap = 64;
  std::set<std::string> excluded_types;
  std::set<ReportFormat> formats{ReportFormat::kMarkdown, ReportFormat::kCsv,
                                 ReportFormat::kJson};
  int jobs = 0;  // 0: all available threads
};

// Throws ConfigError when a field is out of range.
void ValidateConfig(const RunConfig& config);

// Schema check of a whole corpus directory: manifest, every snapshot file
// (parse, data-model invariants, location matches content), presence of
// every required snapshot, and kills.jsonl / assertions.json when present.
// Throws IoError when the manifest is missing or unreadable.
std::vector<Violation> ValidateCorpus(const std::filesystem::path& root);

class Pipeline {
 public:
  // `log` receives progress and notices; may be empty.
  Pipeline(RunConfig config, std::function<void(const std::string&)> log = {});

  const RunConfig& config() const { return config_; }
  const std::filesystem::path& out_dir() const { return out_; }

  DeterminismMask Baseline();
  std::vector<InfectionRecord> Diff();
  // The unfiltered matrix (the filtered one, if any, is also written).
  CandidateMatrix Matrix();
  SelectionReport Select();
  // Rejected kill records make this throw ValidationError.
  std::vector<std::filesystem::path> Report();
  void Run();

  // Stages skipped because their key matched, in call order.
  const std::vector<std::string>& cache_hits() const { return cache_hits_; }
  // Per-mutant and per-test failures collected so far.
  int64_t partial_failures() const { return partial_failures_; }

 private:
  class Reader;

  const Reader& corpus();
  void Log(const std::string& line) const;
  bool Fresh(const std::string& stage, const std::string& key,
             const std::vector<std::string>& artifacts) const;
  void Stamp(const std::string& stage, const std::string& key) const;

  RunConfig config_;
  std::filesystem::path out_;
  std::function<void(const std::string&)> log_;
  std::shared_ptr<Reader> reader_;
  std::vector<std::string> cache_hits_;
  int64_t partial_failures_ = 0;
  std::optional<std::string> baseline_key_, diff_key_, matrix_key_, select_key_;
};

}  // namespace crossfire

#endif  // CROSSFIRE_PIPELINE_H_
