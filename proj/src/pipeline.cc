#include "crossfire/pipeline.h"

#include <algorithm>
#include <limits>
#include <map>

#include "crossfire/canonicalize.h"
#include "crossfire/corpus.h"
#include "crossfire/error.h"
#include "crossfire/hash.h"
#include "crossfire/kernels.h"
#include "json_codec.h"

namespace crossfire {

namespace fs = std::filesystem;
using internal::Json;

namespace {

constexpr const char* kMaskFile = "mask.json";
constexpr const char* kBaselineFailures = "baseline-failures.jsonl";
constexpr const char* kRecordsFile = "records.jsonl";
constexpr const char* kDiffFailures = "diff-failures.jsonl";
constexpr const char* kMatrixFile = "matrix.json";
constexpr const char* kFilteredFile = "matrix-filtered.json";
constexpr const char* kStatsFile = "stats.json";
constexpr const char* kSelectionsFile = "selections.json";

// Incremental digest over labeled pieces.
class Digest {
 public:
  Digest& Add(std::string_view label, std::string_view bytes) {
    h_ = Fnv1a64(label, h_);
    h_ = Fnv1a64("\x1e", h_);
    h_ = Fnv1a64(std::to_string(bytes.size()), h_);
    h_ = Fnv1a64("\x1e", h_);
    h_ = Fnv1a64(bytes, h_);
    return *this;
  }
  Digest& AddFile(const fs::path& root, const fs::path& path) {
    const std::string rel = path.lexically_relative(root).generic_string();
    if (!fs::exists(path)) return Add(rel, "<missing>");
    return Add(rel, ReadFile(path));
  }
  std::string Hex() const { return HashToHex(h_); }

 private:
  uint64_t h_ = kFnvOffsetBasis;
};

int MaxDepth(const VariableGraph& g) {
  int d = 0;
  for (const GraphNode& n : g.nodes) d = std::max(d, PathDepth(n.id));
  return d;
}

std::string FailuresJsonl(const std::vector<DiffFailure>& failures) {
  std::string out;
  for (const DiffFailure& f : failures) {
    out += internal::Dump(Json{{"mutant_id", f.mutant_id},
                               {"test_id", f.test_id},
                               {"message", f.message}}) +
           "\n";
  }
  return out;
}

std::string MaskFailuresJsonl(const std::vector<MaskFailure>& failures) {
  std::string out;
  for (const MaskFailure& f : failures) {
    out += internal::Dump(Json{{"test_id", f.test_id}, {"message", f.message}}) + "\n";
  }
  return out;
}

}  // namespace

// The on-disk corpus as the configuration sees it: n_runs overridden and
// graphs deeper than the cap re-canonicalized with truncation markers.
class Pipeline::Reader : public CorpusReader {
 public:
  Reader(const fs::path& root, int64_t n_runs, int depth_cap)
      : base_(root), manifest_(base_.manifest()), depth_cap_(depth_cap) {
    if (n_runs > 0) manifest_.n_runs = n_runs;
  }

  const MutantManifest& manifest() const override { return manifest_; }
  const fs::path& root() const { return base_.root(); }

  SnapshotPtr LoadOriginal(int64_t run, const std::string& test_id) const override {
    return Cap(base_.LoadOriginal(run, test_id));
  }
  SnapshotPtr LoadMutant(const std::string& mutant_id,
                         const std::string& test_id) const override {
    return Cap(base_.LoadMutant(mutant_id, test_id));
  }

 private:
  SnapshotPtr Cap(SnapshotPtr s) const {
    const bool deep = std::any_of(s->variables.begin(), s->variables.end(),
                                  [&](const VariableGraph& g) {
                                    return MaxDepth(g) > depth_cap_;
                                  });
    if (!deep) return s;
    auto capped = std::make_shared<TestRunSnapshot>(*s);
    for (VariableGraph& g : capped->variables) {
      if (MaxDepth(g) > depth_cap_) g = Canonicalize(g, {depth_cap_});
    }
    return capped;
  }

  DirectoryCorpus base_;
  MutantManifest manifest_;
  int depth_cap_;
};

void ValidateConfig(const RunConfig& c) {
  if (c.corpus.empty()) {
    throw ConfigError(std::string("no corpus given (use --corpus or set ") +
                      kCorpusEnvVar + ")");
  }
  if (c.n_runs != 0 && c.n_runs < 2) throw ConfigError("n_runs must be >= 2");
  if (c.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (c.depth_cap < 1) throw ConfigError("depth cap must be >= 1");
  if (c.jobs < 0) throw ConfigError("jobs must be >= 0");
  if (c.strategies.empty()) throw ConfigError("no strategies selected");
  if (c.formats.empty()) throw ConfigError("no output formats selected");
}

std::vector<Violation> ValidateCorpus(const fs::path& root) {
  std::vector<Violation> out;
  const fs::path manifest_path = root / "manifest.json";
  if (!fs::is_regular_file(manifest_path)) {
    throw IoError("no manifest.json in '" + root.string() + "'");
  }
  MutantManifest manifest;
  try {
    manifest = ParseManifest(ReadFile(manifest_path));
  } catch (const ParseError& e) {
    out.push_back({"manifest.json", std::string(e.what()) + " at byte " +
                                        std::to_string(e.offset())});
    return out;
  } catch (const ValidationError& e) {
    out.push_back({"manifest.json:" + e.field(), e.what()});
    return out;
  }
  for (Violation v : ValidateManifest(manifest)) {
    v.where = "manifest.json:" + v.where;
    out.push_back(std::move(v));
  }

  const DirectoryCorpus corpus(root);
  std::set<fs::path> expected;
  for (const std::string& t : manifest.tests) {
    for (int64_t k = 0; k < manifest.n_runs; ++k) {
      expected.insert(OriginalSnapshotPath(root, k, t));
    }
  }
  for (const MutantEntry& m : manifest.mutants) {
    if (m.status != MutantStatus::kSurvived) continue;
    for (const std::string& t : m.covering_tests) {
      expected.insert(MutantSnapshotPath(root, m.mutant_id, t));
    }
  }
  std::set<fs::path> present;
  for (const fs::path& file : corpus.SnapshotFiles()) {
    present.insert(file);
    const std::string rel = file.lexically_relative(root).generic_string();
    TestRunSnapshot s;
    try {
      s = ParseSnapshot(ReadFile(file));
    } catch (const ParseError& e) {
      out.push_back({rel, std::string(e.what()) + " at byte " + std::to_string(e.offset())});
      continue;
    } catch (const ValidationError& e) {
      out.push_back({rel + ":" + e.field(), e.what()});
      continue;
    }
    for (Violation v : Validate(s, manifest)) {
      v.where = rel + ":" + v.where;
      out.push_back(std::move(v));
    }
    const fs::path should = s.is_original()
                                ? OriginalSnapshotPath(root, s.run_index, s.test_id)
                                : MutantSnapshotPath(root, s.program_version, s.test_id);
    if (should != file) {
      out.push_back({rel, "content belongs at '" +
                              should.lexically_relative(root).generic_string() + "'"});
    }
  }
  for (const fs::path& p : expected) {
    if (!present.contains(p)) {
      out.push_back({p.lexically_relative(root).generic_string(), "missing snapshot"});
    }
  }

  const fs::path kills = root / kKillsFile;
  if (fs::exists(kills)) {
    try {
      for (Violation v : IngestKillRecords(ReadFile(kills), manifest).rejected) {
        v.where = std::string(kKillsFile) + ":" + v.where;
        out.push_back(std::move(v));
      }
    } catch (const ParseError& e) {
      out.push_back({kKillsFile, std::string(e.what()) + " at byte " +
                                     std::to_string(e.offset())});
    }
  }
  const fs::path inventory = root / kInventoryFile;
  if (fs::exists(inventory)) {
    try {
      for (const AssertionId& a : ParseAssertionInventory(ReadFile(inventory))) {
        if (!manifest.HasTest(a.test_id)) {
          out.push_back({kInventoryFile, "assertion " + DescribeAssertion(a) +
                                             " names an unknown test"});
        }
      }
    } catch (const ParseError& e) {
      out.push_back({kInventoryFile, std::string(e.what()) + " at byte " +
                                         std::to_string(e.offset())});
    } catch (const ValidationError& e) {
      out.push_back({std::string(kInventoryFile) + ":" + e.field(), e.what()});
    }
  }
  return out;
}

Pipeline::Pipeline(RunConfig config, std::function<void(const std::string&)> log)
    : config_(std::move(config)), log_(std::move(log)) {
  ValidateConfig(config_);
  out_ = config_.out.empty() ? config_.corpus / "crossfire-out" : config_.out;
}

const Pipeline::Reader& Pipeline::corpus() {
  if (!reader_) {
    reader_ = std::make_shared<Reader>(config_.corpus, config_.n_runs, config_.depth_cap);
  }
  return *reader_;
}

void Pipeline::Log(const std::string& line) const {
  if (log_) log_(line);
}

bool Pipeline::Fresh(const std::string& stage, const std::string& key,
                     const std::vector<std::string>& artifacts) const {
  const fs::path key_file = out_ / "cache" / (stage + ".key");
  if (!fs::is_regular_file(key_file) || ReadFile(key_file) != key + "\n") return false;
  return std::all_of(artifacts.begin(), artifacts.end(),
                     [&](const std::string& a) { return fs::is_regular_file(out_ / a); });
}

void Pipeline::Stamp(const std::string& stage, const std::string& key) const {
  WriteFile(out_ / "cache" / (stage + ".key"), key + "\n");
}

DeterminismMask Pipeline::Baseline() {
  const Reader& reader = corpus();
  const MutantManifest& manifest = reader.manifest();
  Digest d;
  d.Add("stage", "baseline/1")
      .Add("n_runs", std::to_string(manifest.n_runs))
      .Add("depth_cap", std::to_string(config_.depth_cap));
  for (const std::string& t : config_.excluded_types) d.Add("exclude", t);
  d.AddFile(reader.root(), reader.root() / "manifest.json");
  for (const std::string& t : manifest.tests) {
    for (int64_t k = 0; k < manifest.n_runs; ++k) {
      d.AddFile(reader.root(), OriginalSnapshotPath(reader.root(), k, t));
    }
  }
  baseline_key_ = d.Hex();
  if (Fresh("baseline", *baseline_key_, {kMaskFile, kBaselineFailures})) {
    cache_hits_.push_back("baseline");
    Log("baseline: up to date");
    return ParseMask(ReadFile(out_ / kMaskFile));
  }
  MaskOptions options;
  options.excluded_types = config_.excluded_types;
  MaskBatch batch = BuildMasks(reader, options, config_.jobs);
  for (const MaskFailure& f : batch.failures) {
    Log("baseline: test " + f.test_id + ": " + f.message);
  }
  partial_failures_ += static_cast<int64_t>(batch.failures.size());
  WriteFile(out_ / kMaskFile, SerializeMask(batch.mask));
  WriteFile(out_ / kBaselineFailures, MaskFailuresJsonl(batch.failures));
  Stamp("baseline", *baseline_key_);
  Log("baseline: " + std::to_string(batch.mask.entries.size()) + " variable masks over " +
      std::to_string(manifest.n_runs) + " runs");
  return std::move(batch.mask);
}

std::vector<InfectionRecord> Pipeline::Diff() {
  const DeterminismMask mask = Baseline();
  const Reader& reader = corpus();
  Digest d;
  d.Add("stage", "diff/1").Add("baseline", *baseline_key_);
  d.AddFile(out_, out_ / kMaskFile);
  for (const MutantEntry& m : reader.manifest().mutants) {
    if (m.status != MutantStatus::kSurvived) continue;
    for (const std::string& t : m.covering_tests) {
      d.AddFile(reader.root(), MutantSnapshotPath(reader.root(), m.mutant_id, t));
    }
  }
  diff_key_ = d.Hex();
  if (Fresh("diff", *diff_key_, {kRecordsFile, kDiffFailures})) {
    cache_hits_.push_back("diff");
    Log("diff: up to date");
    return ParseRecordsJsonl(ReadFile(out_ / kRecordsFile));
  }
  DiffBatch batch = DiffAllMutants(reader, mask, config_.jobs);
  for (const DiffFailure& f : batch.failures) {
    Log("diff: mutant " + f.mutant_id + ", test " + f.test_id + ": " + f.message);
  }
  for (const std::string& n : batch.notices) Log("diff: " + n);
  partial_failures_ += static_cast<int64_t>(batch.failures.size());
  WriteFile(out_ / kRecordsFile, SerializeRecordsJsonl(batch.records));
  WriteFile(out_ / kDiffFailures, FailuresJsonl(batch.failures));
  Stamp("diff", *diff_key_);
  Log("diff: " + std::to_string(batch.records.size()) + " infection records, " +
      std::to_string(batch.failures.size()) + " failures");
  return std::move(batch.records);
}

CandidateMatrix Pipeline::Matrix() {
  const std::vector<InfectionRecord> records = Diff();
  Digest d;
  d.Add("stage", "matrix/1").Add("diff", *diff_key_);
  d.AddFile(out_, out_ / kRecordsFile);
  d.AddFile(corpus().root(), corpus().root() / "manifest.json");
  matrix_key_ = d.Hex();
  if (Fresh("matrix", *matrix_key_, {kMatrixFile, kFilteredFile, kStatsFile})) {
    cache_hits_.push_back("matrix");
    Log("matrix: up to date");
    return ParseMatrix(ReadFile(out_ / kMatrixFile));
  }
  CandidateMatrix matrix = BuildMatrix(BuildCandidates(records));
  const CandidateMatrix filtered = ShortestDepthFilter(matrix);
  const KillableStats stats = ComputeKillableStats(matrix, corpus().manifest());
  WriteFile(out_ / kMatrixFile, SerializeMatrix(matrix));
  WriteFile(out_ / kFilteredFile, SerializeMatrix(filtered));
  WriteFile(out_ / kStatsFile, SerializeStats(stats));
  Stamp("matrix", *matrix_key_);
  Log("matrix: " + std::to_string(matrix.candidates.size()) + " candidates, " +
      RenderKillableRatio(stats.killable, stats.surviving) + " killable");
  return matrix;
}

SelectionReport Pipeline::Select() {
  Matrix();
  const std::string matrix_file = config_.depth_filter ? kFilteredFile : kMatrixFile;
  const CandidateMatrix matrix = ParseMatrix(ReadFile(out_ / matrix_file));
  Digest d;
  d.Add("stage", "select/1").Add("matrix", *matrix_key_);
  d.AddFile(out_, out_ / matrix_file);
  d.Add("depth_filter", config_.depth_filter ? "1" : "0")
      .Add("repeats", std::to_string(config_.repeats))
      .Add("seed", std::to_string(config_.seed))
      .Add("tie_break", TieBreakName(config_.tie_break));
  for (const Strategy s : config_.strategies) d.Add("strategy", StrategyName(s));
  select_key_ = d.Hex();
  if (Fresh("select", *select_key_, {kSelectionsFile})) {
    cache_hits_.push_back("select");
    Log("select: up to date");
    return ParseSelections(matrix, ReadFile(out_ / kSelectionsFile));
  }
  SelectionReport report;
  report.depth_filter = config_.depth_filter;
  if (!matrix.killable_mutants.empty()) {
    for (const Strategy s : config_.strategies) {
      report.strategies.push_back(RunRepeated(matrix, s, config_.repeats, config_.seed,
                                              config_.tie_break, config_.jobs));
      const AggregatedSelection& a = report.strategies.back();
      Log("select: " + std::string(StrategyName(s)) + " " +
          RenderWithFactor(a.MeanPrimaryCount(), a.pooled_crossfire_factor));
    }
  } else {
    Log("select: no killable mutants");
  }
  WriteFile(out_ / kSelectionsFile, SerializeSelections(matrix, report));
  Stamp("select", *select_key_);
  return report;
}

std::vector<fs::path> Pipeline::Report() {
  const SelectionReport selections = Select();
  const Reader& reader = corpus();
  const MutantManifest& manifest = reader.manifest();
  const CandidateMatrix full = ParseMatrix(ReadFile(out_ / kMatrixFile));
  const CandidateMatrix selected =
      config_.depth_filter ? ParseMatrix(ReadFile(out_ / kFilteredFile)) : full;

  ReportInputs in;
  in.subject = fs::absolute(config_.corpus).lexically_normal().filename().string();
  if (in.subject.empty()) {
    in.subject = fs::absolute(config_.corpus).lexically_normal().parent_path().filename().string();
  }
  in.stats = ComputeKillableStats(full, manifest);
  in.matrix = &selected;
  in.depth_filter = config_.depth_filter;
  in.selections = selections.strategies;

  const fs::path kills = reader.root() / kKillsFile;
  const fs::path inventory = reader.root() / kInventoryFile;
  if (fs::exists(kills) && fs::exists(inventory)) {
    KillIngest ingest = IngestKillRecords(ReadFile(kills), manifest);
    for (const std::string& n : ingest.notices) Log("report: " + n);
    if (!ingest.rejected.empty()) {
      std::string msg;
      for (const Violation& v : ingest.rejected) msg += "\n  " + v.where + ": " + v.message;
      throw ValidationError(kKillsFile, std::to_string(ingest.rejected.size()) +
                                            " rejected kill records:" + msg);
    }
    in.capability = BuildCapabilityReport(
        ingest.records, ParseAssertionInventory(ReadFile(inventory)), manifest);
  } else if (fs::exists(kills) != fs::exists(inventory)) {
    Log(std::string("report: ") + kKillsFile + " and " + kInventoryFile +
        " are needed together; capability grid skipped");
  }
  const std::vector<fs::path> written = EmitReport(in, config_.formats, out_);
  Log("report: wrote " + std::to_string(written.size()) + " files to " + out_.string());
  return written;
}

void Pipeline::Run() { Report(); }

}  // namespace crossfire
