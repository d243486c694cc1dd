#ifndef CROSSFIRE_REPORT_H_
#define CROSSFIRE_REPORT_H_

// Rendering of killability statistics, strategy comparisons and assertion
// suggestions, plus test/assertion kill-capability counts over kill records
// produced by an external attribution tool.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crossfire/candidate_matrix.h"
#include "crossfire/crossfire_select.h"
#include "crossfire/snapshot.h"

namespace crossfire {

struct AssertionId {
  std::string test_id;
  int64_t line = 0;
  int64_t ordinal = 0;

  auto operator<=>(const AssertionId&) const = default;
  bool operator==(const AssertionId&) const = default;
};

// "Test1:42#0".
std::string DescribeAssertion(const AssertionId& id);

enum class FailureKind { kAssertion, kNonAssertion };

struct KillRecord {
  std::string mutant_id;
  std::string test_id;
  FailureKind failure_kind = FailureKind::kAssertion;
  std::optional<AssertionId> assertion;  // iff kAssertion

  bool operator==(const KillRecord&) const = default;
};

struct KillIngest {
  std::vector<KillRecord> records;  // accepted, deduplicated, in file order
  std::vector<Violation> rejected;  // where = "line N"
  std::vector<std::string> notices;
};

// One canonical-JSON KillRecord per line. Throws ParseError (with the byte
// offset into `text`) on a malformed line. Records naming unknown mutants or
// tests, mutants not marked killed, tests that do not cover the mutant, or an
// inconsistent assertion_id are rejected, not thrown.
KillIngest IngestKillRecords(std::string_view text, const MutantManifest& manifest);
std::string SerializeKillRecord(const KillRecord& record);

// {"assertions": [{"test_id": ..., "line": ..., "ordinal": ...}, ...]}
std::vector<AssertionId> ParseAssertionInventory(std::string_view bytes);

struct CapabilityReport {
  std::map<std::string, int64_t> test_kills;          // distinct mutants per test
  std::map<AssertionId, int64_t> assertion_kills;     // distinct mutants per assertion
  std::map<std::string, int64_t> test_assertions;     // inventory size per test

  bool operator==(const CapabilityReport&) const = default;
};

// Every manifest test and inventory assertion appears, zero-kill ones
// included. Throws ValidationError for an assertion missing from the
// inventory.
CapabilityReport BuildCapabilityReport(const std::vector<KillRecord>& records,
                                       const std::vector<AssertionId>& inventory,
                                       const MutantManifest& manifest);

// test_id,test_kills,n_assertions,a0,a1,... with one column per assertion
// slot, in inventory order; cells past a test's count are empty.
std::string CapabilityGridCsv(const CapabilityReport& report);

// Display helpers. All round half up.
std::string RenderKillableRatio(int64_t killable, int64_t surviving);  // "36/60 (60%)"
std::string RenderWithFactor(const Rational& count, const Rational& factor);  // "27.0 (1.3)"

struct ReportInputs {
  std::string subject = "corpus";
  KillableStats stats;  // over the unfiltered matrix
  // The matrix that the selections index into (filtered when depth_filter).
  const CandidateMatrix* matrix = nullptr;
  bool depth_filter = true;
  std::vector<AggregatedSelection> selections;
  std::optional<CapabilityReport> capability;
};

enum class ReportFormat { kMarkdown, kCsv, kJson };

std::optional<ReportFormat> ParseReportFormat(std::string_view name);

// File name -> contents. markdown: report.md; csv: stats.csv,
// selection-summary.csv and capability-grid.csv (when capability is set);
// json: suggestions.jsonl.
std::map<std::string, std::string> RenderReport(const ReportInputs& inputs,
                                                const std::set<ReportFormat>& formats);

// Writes RenderReport's files into `out_dir`. Throws IoError.
std::vector<std::filesystem::path> EmitReport(const ReportInputs& inputs,
                                              const std::set<ReportFormat>& formats,
                                              const std::filesystem::path& out_dir);

}  // namespace crossfire

#endif  // CROSSFIRE_REPORT_H_
