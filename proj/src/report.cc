#include "crossfire/report.h"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "crossfire/corpus.h"
#include "crossfire/error.h"
#include "json_codec.h"

namespace crossfire {

using internal::Json;

namespace {

Json AssertionToJson(const AssertionId& a) {
  return Json{{"test_id", a.test_id}, {"line", a.line}, {"ordinal", a.ordinal}};
}

AssertionId AssertionFromJson(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where, "expected an object");
  AssertionId a;
  a.test_id = internal::RequireString(j, "test_id", where);
  a.line = internal::RequireInt(j, "line", where);
  a.ordinal = internal::RequireInt(j, "ordinal", where);
  return a;
}

std::string Fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Markdown table cells cannot hold a raw '|'.
std::string Cell(std::string_view s) {
  std::string out;
  for (const char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string AssertionPhrase(const AssertionCandidate& c) {
  switch (c.kind) {
    case AssertionKind::kValueEquality:
      return "equals " + c.expected;
    case AssertionKind::kNullCheck:
      return "is " + c.expected;
    case AssertionKind::kTypeCheck:
      return "has type " + c.expected;
    case AssertionKind::kSizeCheck:
      return "has size " + c.expected;
    case AssertionKind::kStructureCheck:
      return "has structure " + c.expected;
  }
  return "equals " + c.expected;
}

struct Suggestion {
  std::string mutant_id;
  const AssertionCandidate* candidate;
  std::vector<std::string> also_kills;
};

// For each killable mutant, the candidate that kills it together with the
// most other mutants; the earliest candidate wins ties.
std::vector<Suggestion> Suggestions(const CandidateMatrix& matrix) {
  std::map<std::string, const AssertionCandidate*> best;
  for (const AssertionCandidate& c : matrix.candidates) {
    for (const auto& [mutant, observed] : c.observed_by_mutant) {
      const AssertionCandidate*& b = best[mutant];
      if (b == nullptr || c.observed_by_mutant.size() > b->observed_by_mutant.size()) {
        b = &c;
      }
    }
  }
  std::vector<Suggestion> out;
  for (const auto& [mutant, c] : best) {
    Suggestion s{mutant, c, {}};
    for (const auto& [other, observed] : c->observed_by_mutant) {
      if (other != mutant) s.also_kills.push_back(other);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string SuggestionCard(const Suggestion& s) {
  const AssertionCandidate& c = *s.candidate;
  std::string out = "augment " + c.test_id + ", assert " + c.node_id + " " +
                    AssertionPhrase(c) + " (observed " +
                    c.observed_by_mutant.at(s.mutant_id) + " under mutant " +
                    s.mutant_id + "); also kills: ";
  if (s.also_kills.empty()) return out + "none";
  for (size_t i = 0; i < s.also_kills.size(); ++i) {
    if (i > 0) out += ", ";
    out += s.also_kills[i];
  }
  return out;
}

const AggregatedSelection* FindStrategy(const ReportInputs& in, Strategy s) {
  for (const AggregatedSelection& a : in.selections) {
    if (a.strategy == s) return &a;
  }
  return nullptr;
}

std::string Markdown(const ReportInputs& in, const std::vector<Suggestion>& cards) {
  const KillableStats& s = in.stats;
  std::string md = "# Crossfire report: " + in.subject + "\n\n";

  md += "## Surviving mutant-killing opportunities\n\n";
  md += "| Subject | #Killable/#Surviving | avg #assert | avg #var | avg #test "
        "| #Assert | #Var | #Test |\n";
  md += "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  md += "| " + Cell(in.subject) + " | " + RenderKillableRatio(s.killable, s.surviving) +
        " | " + s.avg_assertions.ToFixed(0) + " | " + s.avg_variables.ToFixed(0) +
        " | " + s.avg_tests.ToFixed(0) + " | " + std::to_string(s.total_assertions) +
        " | " + std::to_string(s.total_variables) + " | " +
        std::to_string(s.total_tests) + " |\n\n";
  if (!s.averages_defined) {
    md += "Averages are undefined without killable mutants and are shown as 0.\n\n";
  }
  md += "Mean candidate access depth: " + s.avg_depth.ToFixed(1) + " (unfiltered)";
  if (in.matrix != nullptr && in.depth_filter) {
    md += ", " + ComputeKillableStats(*in.matrix, MutantManifest{}).avg_depth.ToFixed(1) +
          " (shortest access paths only)";
  }
  md += ".\n\n";

  md += "## Surviving mutant-killing strategies\n\n";
  if (s.killable == 0) {
    md += "No killable mutants: nothing to select.\n\n";
  } else if (in.selections.empty()) {
    md += "No strategies were run.\n\n";
  } else {
    std::string header = "| Subject | #Kill | Dep |";
    std::string rule = "|---|---:|---:|";
    const Rational dep = in.matrix != nullptr
                             ? ComputeKillableStats(*in.matrix, MutantManifest{}).avg_depth
                             : s.avg_depth;
    std::string row = "| " + Cell(in.subject) + " | " + std::to_string(s.killable) +
                      " | " + dep.ToFixed(1) + " |";
    for (const Strategy strategy : kAllStrategies) {
      const AggregatedSelection* a = FindStrategy(in, strategy);
      if (a == nullptr) continue;
      const std::string name(StrategyName(strategy));
      header += " " + name + " #Assert | #Var | #Test |";
      rule += "---:|---:|---:|";
      const Rational counts[] = {a->mean_assertions, a->mean_variables, a->mean_tests};
      const size_t primary = strategy == Strategy::kAssertionGreedy  ? 0
                             : strategy == Strategy::kVariableGreedy ? 1
                                                                     : 2;
      for (size_t i = 0; i < 3; ++i) {
        row += i == primary
                   ? " **" + RenderWithFactor(counts[i], a->pooled_crossfire_factor) + "** |"
                   : " " + counts[i].ToFixed(1) + " |";
      }
    }
    md += header + "\n" + rule + "\n" + row + "\n\n";
    md += "Means over " + std::to_string(in.selections.front().repeats()) +
          " seeded runs per strategy; the bold column is the strategy's own unit, "
          "with its crossfire factor (killed mutants per unit) in parentheses.\n\n";
  }

  md += "## Assertion suggestions\n\n";
  if (cards.empty()) {
    md += "No killable mutants: no assertion suggestions.\n";
  } else {
    for (const Suggestion& c : cards) md += "- " + SuggestionCard(c) + "\n";
  }

  if (in.capability) {
    const CapabilityReport& cap = *in.capability;
    md += "\n## Test and assertion kill capability\n\n";
    md += "| Test | Killed mutants | Assertions | Killing assertions |\n";
    md += "|---|---:|---:|---:|\n";
    for (const auto& [test, kills] : cap.test_kills) {
      int64_t killing = 0;
      for (const auto& [a, n] : cap.assertion_kills) killing += a.test_id == test && n > 0;
      const auto n = cap.test_assertions.find(test);
      md += "| " + Cell(test) + " | " + std::to_string(kills) + " | " +
            std::to_string(n == cap.test_assertions.end() ? 0 : n->second) + " | " +
            std::to_string(killing) + " |\n";
    }
  }
  return md;
}

std::string StatsCsv(const ReportInputs& in) {
  const KillableStats& s = in.stats;
  std::string csv =
      "subject,killable,surviving,killable_pct,averages_defined,avg_assertions,"
      "avg_variables,avg_variables_global,avg_tests,total_assertions,"
      "total_variables,total_variables_global,total_tests,avg_depth,"
      "selected_matrix_avg_depth\n";
  const Rational pct = s.surviving > 0 ? Rational(s.killable * 100, s.surviving) : Rational();
  const Rational dep = in.matrix != nullptr
                           ? ComputeKillableStats(*in.matrix, MutantManifest{}).avg_depth
                           : s.avg_depth;
  csv += CsvField(in.subject) + "," + std::to_string(s.killable) + "," +
         std::to_string(s.surviving) + "," + pct.ToFixed(4) + "," +
         (s.averages_defined ? "true" : "false") + "," + s.avg_assertions.ToFixed(4) +
         "," + s.avg_variables.ToFixed(4) + "," + s.avg_variables_global.ToFixed(4) +
         "," + s.avg_tests.ToFixed(4) + "," + std::to_string(s.total_assertions) + "," +
         std::to_string(s.total_variables) + "," +
         std::to_string(s.total_variables_global) + "," +
         std::to_string(s.total_tests) + "," + s.avg_depth.ToFixed(4) + "," +
         dep.ToFixed(4) + "\n";
  return csv;
}

std::string SelectionCsv(const ReportInputs& in) {
  std::string csv =
      "strategy,repeats,covered,mean_assertions,mean_variables,mean_tests,"
      "pooled_crossfire_factor,mean_crossfire_factor\n";
  for (const AggregatedSelection& a : in.selections) {
    csv += std::string(StrategyName(a.strategy)) + "," + std::to_string(a.repeats()) +
           "," + std::to_string(a.covered) + "," + a.mean_assertions.ToFixed(4) + "," +
           a.mean_variables.ToFixed(4) + "," + a.mean_tests.ToFixed(4) + "," +
           a.pooled_crossfire_factor.ToFixed(4) + "," +
           Fixed(a.mean_crossfire_factor, 4) + "\n";
  }
  return csv;
}

std::string SuggestionsJsonl(const std::vector<Suggestion>& cards) {
  std::string out;
  for (const Suggestion& s : cards) {
    const AssertionCandidate& c = *s.candidate;
    Json j = Json::object();
    j["mutant_id"] = s.mutant_id;
    j["candidate_id"] = c.candidate_id;
    j["test_id"] = c.test_id;
    j["variable"] = internal::VariableToJson(c.variable);
    j["node_id"] = c.node_id;
    j["depth"] = c.depth;
    j["assertion_kind"] = std::string(AssertionKindName(c.kind));
    j["expected"] = c.expected;
    j["observed"] = c.observed_by_mutant.at(s.mutant_id);
    j["also_kills"] = s.also_kills;
    j["text"] = SuggestionCard(s);
    out += internal::Dump(j) + "\n";
  }
  return out;
}

}  // namespace

std::string DescribeAssertion(const AssertionId& id) {
  return id.test_id + ":" + std::to_string(id.line) + "#" + std::to_string(id.ordinal);
}

std::string SerializeKillRecord(const KillRecord& r) {
  Json j = Json::object();
  j["mutant_id"] = r.mutant_id;
  j["test_id"] = r.test_id;
  j["failure_kind"] =
      r.failure_kind == FailureKind::kAssertion ? "assertion" : "non-assertion";
  if (r.assertion) j["assertion_id"] = AssertionToJson(*r.assertion);
  return internal::Dump(j);
}

KillIngest IngestKillRecords(std::string_view text, const MutantManifest& manifest) {
  KillIngest out;
  std::set<std::tuple<std::string, std::string, std::optional<AssertionId>>> seen;
  size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    const size_t line_start = start;
    start = end + 1;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    Json j;
    try {
      j = internal::ParseJson(line);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what(), line_start + e.offset());
    }
    auto reject = [&](std::string message) {
      out.rejected.push_back({where, std::move(message)});
    };
    KillRecord r;
    try {
      if (!j.is_object()) throw ValidationError(where, "expected an object");
      r.mutant_id = internal::RequireString(j, "mutant_id", where);
      r.test_id = internal::RequireString(j, "test_id", where);
      const std::string kind = internal::RequireString(j, "failure_kind", where);
      if (kind == "assertion") {
        r.failure_kind = FailureKind::kAssertion;
      } else if (kind == "non-assertion") {
        r.failure_kind = FailureKind::kNonAssertion;
      } else {
        throw ValidationError(where + ".failure_kind", "unknown kind '" + kind + "'");
      }
      if (j.contains("assertion_id") && !j.at("assertion_id").is_null()) {
        r.assertion = AssertionFromJson(j.at("assertion_id"), where + ".assertion_id");
      }
    } catch (const ValidationError& e) {
      reject(e.field() + ": " + e.what());
      continue;
    }
    if (r.failure_kind == FailureKind::kAssertion && !r.assertion) {
      reject("assertion failure without an assertion_id");
      continue;
    }
    if (r.failure_kind == FailureKind::kNonAssertion && r.assertion) {
      reject("non-assertion failure carries an assertion_id");
      continue;
    }
    if (r.assertion && r.assertion->test_id != r.test_id) {
      reject("assertion_id names test '" + r.assertion->test_id + "', record names '" +
             r.test_id + "'");
      continue;
    }
    const MutantEntry* m = manifest.FindMutant(r.mutant_id);
    if (m == nullptr) {
      reject("unknown mutant '" + r.mutant_id + "'");
      continue;
    }
    if (!manifest.HasTest(r.test_id)) {
      reject("unknown test '" + r.test_id + "'");
      continue;
    }
    if (m->status != MutantStatus::kKilled) {
      reject("mutant '" + r.mutant_id + "' is not marked killed in the manifest");
      continue;
    }
    if (std::find(m->covering_tests.begin(), m->covering_tests.end(), r.test_id) ==
        m->covering_tests.end()) {
      reject("test '" + r.test_id + "' does not cover mutant '" + r.mutant_id + "'");
      continue;
    }
    if (!seen.emplace(r.mutant_id, r.test_id, r.assertion).second) {
      out.notices.push_back(where + ": duplicate of an earlier record for mutant '" +
                            r.mutant_id + "', test '" + r.test_id + "'; ignored");
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

std::vector<AssertionId> ParseAssertionInventory(std::string_view bytes) {
  const Json j = internal::ParseJson(bytes);
  if (!j.is_object()) throw ValidationError("$", "expected an object");
  const Json& list = internal::Require(j, "assertions", "$");
  if (!list.is_array()) throw ValidationError("$.assertions", "expected an array");
  std::vector<AssertionId> out;
  std::set<AssertionId> seen;
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string where = "$.assertions[" + std::to_string(i) + "]";
    AssertionId a = AssertionFromJson(list[i], where);
    if (!seen.insert(a).second) {
      throw ValidationError(where, "duplicate assertion " + DescribeAssertion(a));
    }
    out.push_back(std::move(a));
  }
  return out;
}

CapabilityReport BuildCapabilityReport(const std::vector<KillRecord>& records,
                                       const std::vector<AssertionId>& inventory,
                                       const MutantManifest& manifest) {
  CapabilityReport report;
  for (const std::string& t : manifest.tests) {
    report.test_kills[t] = 0;
    report.test_assertions[t] = 0;
  }
  for (const AssertionId& a : inventory) {
    report.assertion_kills[a] = 0;
    report.test_kills.try_emplace(a.test_id, 0);
    ++report.test_assertions[a.test_id];
  }
  std::map<std::string, std::set<std::string>> by_test;
  std::map<AssertionId, std::set<std::string>> by_assertion;
  for (const KillRecord& r : records) {
    by_test[r.test_id].insert(r.mutant_id);
    if (!r.assertion) continue;
    if (!report.assertion_kills.contains(*r.assertion)) {
      throw ValidationError("assertion_id", "assertion " + DescribeAssertion(*r.assertion) +
                                                " is not in the inventory");
    }
    by_assertion[*r.assertion].insert(r.mutant_id);
  }
  for (const auto& [t, m] : by_test) report.test_kills[t] = static_cast<int64_t>(m.size());
  for (const auto& [a, m] : by_assertion) {
    report.assertion_kills[a] = static_cast<int64_t>(m.size());
  }
  return report;
}

std::string CapabilityGridCsv(const CapabilityReport& report) {
  std::map<std::string, std::vector<int64_t>> cells;
  size_t width = 0;
  for (const auto& [a, n] : report.assertion_kills) {
    auto& row = cells[a.test_id];
    row.push_back(n);
    width = std::max(width, row.size());
  }
  std::string csv = "test_id,test_kills,n_assertions";
  for (size_t i = 0; i < width; ++i) csv += ",a" + std::to_string(i);
  csv += "\n";
  for (const auto& [test, kills] : report.test_kills) {
    const auto it = cells.find(test);
    const size_t n = it == cells.end() ? 0 : it->second.size();
    csv += CsvField(test) + "," + std::to_string(kills) + "," + std::to_string(n);
    for (size_t i = 0; i < width; ++i) {
      csv += ",";
      if (i < n) csv += std::to_string(it->second[i]);
    }
    csv += "\n";
  }
  return csv;
}

std::string RenderKillableRatio(int64_t killable, int64_t surviving) {
  const Rational pct = surviving > 0 ? Rational(killable * 100, surviving) : Rational();
  return std::to_string(killable) + "/" + std::to_string(surviving) + " (" +
         pct.ToFixed(0) + "%)";
}

std::string RenderWithFactor(const Rational& count, const Rational& factor) {
  return count.ToFixed(1) + " (" + factor.ToFixed(1) + ")";
}

std::optional<ReportFormat> ParseReportFormat(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  return std::nullopt;
}

std::map<std::string, std::string> RenderReport(const ReportInputs& inputs,
                                                const std::set<ReportFormat>& formats) {
  const CandidateMatrix empty;
  const std::vector<Suggestion> cards =
      Suggestions(inputs.matrix != nullptr ? *inputs.matrix : empty);
  std::map<std::string, std::string> files;
  if (formats.contains(ReportFormat::kMarkdown)) files["report.md"] = Markdown(inputs, cards);
  if (formats.contains(ReportFormat::kCsv)) {
    files["stats.csv"] = StatsCsv(inputs);
    files["selection-summary.csv"] = SelectionCsv(inputs);
    if (inputs.capability) files["capability-grid.csv"] = CapabilityGridCsv(*inputs.capability);
  }
  if (formats.contains(ReportFormat::kJson)) files["suggestions.jsonl"] = SuggestionsJsonl(cards);
  return files;
}

std::vector<std::filesystem::path> EmitReport(const ReportInputs& inputs,
                                              const std::set<ReportFormat>& formats,
                                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& [name, bytes] : RenderReport(inputs, formats)) {
    WriteFile(out_dir / name, bytes);
    written.push_back(out_dir / name);
  }
  return written;
}

}  // namespace crossfire
