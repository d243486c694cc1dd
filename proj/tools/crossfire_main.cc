// crossfire: command-line front end over a corpus directory.
//
// Exit status: 0 success, 1 validation failures (listed on stderr),
// 2 I/O, parse or configuration errors.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crossfire/canonicalize.h"
#include "crossfire/corpus.h"
#include "crossfire/error.h"
#include "crossfire/pipeline.h"
#include "crossfire/synthetic.h"

namespace {

using crossfire::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitError = 2;

struct Flags {
  std::string corpus;
  std::string out;
  int64_t n_runs = 0;
  std::vector<std::string> strategies;
  int64_t repeats = 20;
  uint64_t seed = 0;
  std::string tie_break = "random";
  bool no_depth_filter = false;
  int depth_cap = crossfire::kDefaultDepthCap;
  std::vector<std::string> exclude_types;
  std::vector<std::string> formats;
  int jobs = 0;
};

void AddCorpusFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--corpus", f.corpus, "Corpus root directory")
      ->envname(crossfire::kCorpusEnvVar);
  cmd->add_option("--out", f.out, "Output directory (default <corpus>/crossfire-out)");
}

void AddStageFlags(CLI::App* cmd, Flags& f) {
  AddCorpusFlags(cmd, f);
  cmd->add_option("--n-runs", f.n_runs, "Original runs per test (default: manifest)");
  cmd->add_option("--depth-cap", f.depth_cap, "Maximum graph depth before truncation");
  cmd->add_option("--exclude-types", f.exclude_types,
                  "Type names never asserted on (with their subtrees)")
      ->delimiter(',');
  cmd->add_option("--jobs", f.jobs, "Worker threads (0: all available)");
}

void AddSelectFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--strategy", f.strategies,
                  "assertion-greedy, variable-greedy, test-greedy (default: all)")
      ->delimiter(',');
  cmd->add_option("--repeats", f.repeats, "Seeded runs per strategy");
  cmd->add_option("--seed", f.seed, "Base seed; run i uses seed + i");
  cmd->add_option("--tie-break", f.tie_break, "random or lexicographic");
  cmd->add_flag("--no-depth-filter", f.no_depth_filter,
                "Keep candidates with non-shortest access paths");
}

RunConfig ToConfig(const Flags& f) {
  RunConfig c;
  c.corpus = f.corpus;
  c.out = f.out;
  c.n_runs = f.n_runs;
  c.repeats = f.repeats;
  c.seed = f.seed;
  c.depth_filter = !f.no_depth_filter;
  c.depth_cap = f.depth_cap;
  c.excluded_types.insert(f.exclude_types.begin(), f.exclude_types.end());
  c.jobs = f.jobs;
  const auto tie = crossfire::ParseTieBreak(f.tie_break);
  if (!tie) throw crossfire::ConfigError("unknown tie-break mode '" + f.tie_break + "'");
  c.tie_break = *tie;
  if (!f.strategies.empty()) {
    c.strategies.clear();
    for (const std::string& name : f.strategies) {
      const auto s = crossfire::ParseStrategy(name);
      if (!s) throw crossfire::ConfigError("unknown strategy '" + name + "'");
      c.strategies.push_back(*s);
    }
  }
  if (!f.formats.empty()) {
    c.formats.clear();
    for (const std::string& name : f.formats) {
      const auto fmt = crossfire::ParseReportFormat(name);
      if (!fmt) throw crossfire::ConfigError("unknown format '" + name + "'");
      c.formats.insert(*fmt);
    }
  }
  return c;
}

void LogLine(const std::string& line) { std::cerr << line << "\n"; }

int RunValidate(const Flags& f) {
  if (f.corpus.empty()) {
    throw crossfire::ConfigError(std::string("no corpus given (use --corpus or set ") +
                                 crossfire::kCorpusEnvVar + ")");
  }
  const auto violations = crossfire::ValidateCorpus(f.corpus);
  for (const auto& v : violations) std::cerr << v.where << ": " << v.message << "\n";
  if (!violations.empty()) {
    std::cerr << violations.size() << " violation(s)\n";
    return kExitValidation;
  }
  std::cerr << "corpus is valid\n";
  return kExitOk;
}

struct GenFlags {
  std::string out;
  std::string fixture;
  crossfire::ScenarioSpec spec;
};

int RunGen(const GenFlags& g) {
  if (g.out.empty()) throw crossfire::ConfigError("gen needs --out");
  crossfire::GeneratedCorpus generated;
  if (g.fixture == "account") {
    generated.plan = crossfire::AccountExamplePlan();
  } else if (g.fixture.empty()) {
    generated.plan = crossfire::PlanScenario(g.spec);
  } else {
    throw crossfire::ConfigError("unknown fixture '" + g.fixture + "'");
  }
  generated.truth = crossfire::ComputeTruth(generated.plan);
  generated.corpus = crossfire::Realize(generated.plan);
  crossfire::WriteGenerated(generated, g.out);
  if (g.fixture == "account") {
    crossfire::WriteFile(std::filesystem::path(g.out) / crossfire::kKillsFile,
                         crossfire::AccountExampleKillsJsonl());
    crossfire::WriteFile(std::filesystem::path(g.out) / crossfire::kInventoryFile,
                         crossfire::AccountExampleInventoryJson());
  }
  std::cerr << "wrote " << generated.corpus.All().size() << " snapshots, "
            << generated.truth.killable.size() << " killable of "
            << generated.plan.manifest.SurvivingMutants().size() << " surviving, to "
            << g.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crossfire analysis of surviving mutants over memory snapshots"};
  app.require_subcommand(1);

  Flags flags;
  GenFlags gen;

  CLI::App* validate = app.add_subcommand("validate", "Schema-check a corpus");
  AddCorpusFlags(validate, flags);

  CLI::App* baseline = app.add_subcommand("baseline", "Build and cache determinism masks");
  AddStageFlags(baseline, flags);
  CLI::App* diff = app.add_subcommand("diff", "Compute infection records");
  AddStageFlags(diff, flags);
  CLI::App* matrix = app.add_subcommand("matrix", "Build candidates and killability stats");
  AddStageFlags(matrix, flags);
  CLI::App* select = app.add_subcommand("select", "Run the selection strategies");
  AddStageFlags(select, flags);
  AddSelectFlags(select, flags);
  CLI::App* report = app.add_subcommand("report", "Render reports");
  AddStageFlags(report, flags);
  AddSelectFlags(report, flags);
  report->add_option("--formats", flags.formats, "markdown, csv, json (default: all)")
      ->delimiter(',');
  CLI::App* pipeline = app.add_subcommand("pipeline", "Run every stage");
  AddStageFlags(pipeline, flags);
  AddSelectFlags(pipeline, flags);
  pipeline->add_option("--formats", flags.formats, "markdown, csv, json (default: all)")
      ->delimiter(',');

  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus with truth.json");
  crossfire::ScenarioSpec& s = gen.spec;
  gen_cmd->add_option("--out", gen.out, "Directory to write")->required();
  gen_cmd->add_option("--fixture", gen.fixture, "Named fixture instead of a random spec (account)");
  gen_cmd->add_option("--seed", s.seed);
  gen_cmd->add_option("--tests", s.n_tests);
  gen_cmd->add_option("--min-variables", s.min_variables);
  gen_cmd->add_option("--max-variables", s.max_variables);
  gen_cmd->add_option("--max-depth", s.max_depth);
  gen_cmd->add_option("--max-fanout", s.max_fanout);
  gen_cmd->add_option("--max-collection", s.max_collection);
  gen_cmd->add_option("--mutants", s.n_mutants);
  gen_cmd->add_option("--surviving-fraction", s.surviving_fraction);
  gen_cmd->add_option("--infection-rate", s.infection_rate);
  gen_cmd->add_option("--max-plantings", s.max_plantings);
  gen_cmd->add_option("--max-covering-tests", s.max_covering_tests);
  gen_cmd->add_option("--nondeterminism-rate", s.nondeterminism_rate);
  gen_cmd->add_option("--alias-rate", s.alias_rate);
  gen_cmd->add_option("--subalias-rate", s.subalias_rate);
  gen_cmd->add_option("--diamond-rate", s.diamond_rate);
  gen_cmd->add_option("--structural-rate", s.structural_rate);
  gen_cmd->add_option("--site-pool", s.site_pool);
  gen_cmd->add_flag("--masked-infections", s.masked_infections);
  gen_cmd->add_option("--n-runs", s.n_runs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*validate) return RunValidate(flags);
    if (*gen_cmd) return RunGen(gen);

    crossfire::Pipeline p(ToConfig(flags), LogLine);
    if (*baseline) {
      p.Baseline();
    } else if (*diff) {
      p.Diff();
    } else if (*matrix) {
      p.Matrix();
    } else if (*select) {
      p.Select();
    } else if (*report || *pipeline) {
      p.Report();
    }
    if (p.partial_failures() > 0) {
      std::cerr << p.partial_failures() << " partial failure(s); see "
                << (p.out_dir() / "diff-failures.jsonl").string() << " and "
                << (p.out_dir() / "baseline-failures.jsonl").string() << "\n";
    }
    return kExitOk;
  } catch (const crossfire::ValidationError& e) {
    std::cerr << "validation error: " << e.field() << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const crossfire::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
