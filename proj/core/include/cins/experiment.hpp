#pragma once

// Manifest-driven experiment grid: sample -> compile -> (external trainer)
// -> score -> report.
//
// Output layout under the manifest's output directory:
//
//   splits/seed<N>.jsonl             written by run_sample
//   cells.json                       index of every cell and its status
//   cells/<cell>/cell.json           descriptor
//   cells/<cell>/{train,validation,test}.jsonl
//   cells/<cell>/split.jsonl         sampled ids with the plan in a header
//   cells/<cell>/error.txt           only when the cell failed
//   cells/<cell>/scores.<split>.json written by run_score
//   report.json, report.txt          written by run_report

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cins/compiler.hpp"
#include "cins/metrics.hpp"
#include "cins/sampler.hpp"
#include "cins/schema.hpp"

namespace cins {

/// Environment variable that re-roots relative output directories.
inline constexpr const char* kOutputRootEnv = "CINS_OUTPUT_ROOT";

class ManifestError : public Error {
 public:
  using Error::Error;
};

struct DataPaths {
  std::filesystem::path train;
  std::filesystem::path validation;
  std::filesystem::path test;
};

struct Manifest {
  std::string name;
  Task task = Task::IC;
  std::filesystem::path ontology;
  DataPaths data;
  std::vector<std::string> domains;
  std::optional<std::filesystem::path> templates;
  std::optional<std::filesystem::path> prompts;
  std::optional<std::filesystem::path> t2g2_templates;
  SamplePlan plan;  // plan.seed is ignored; cells use `seeds`
  std::vector<std::uint64_t> seeds;
  std::vector<Mode> modes;
  std::vector<PromptVariant> prompt_variants;  // empty: every catalog variant
  std::vector<AblationMask> ablations;         // empty: {full}
  std::optional<NlgRepr> nlg_repr;
  std::filesystem::path output_dir;

  /// Throws ManifestError describing the first broken rule.
  void validate() const;

  /// Relative input paths are resolved against `base_dir`; a relative output
  /// directory against $CINS_OUTPUT_ROOT, or the working directory when unset.
  static Manifest from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static Manifest load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// The manifest with ablations {full, no_definition, no_constraint,
/// no_prompt, no_descriptions} and CINS among its modes.
Manifest expand_ablation_grid(Manifest manifest);

struct Cell {
  Mode mode = Mode::STD;
  std::optional<PromptVariant> variant;  // absent for STD
  AblationMask ablation;                 // always full outside CINS
  std::uint64_t seed = 0;

  /// Row key without the seed, e.g. "CINS.ask_about-Q.full".
  std::string row_name() const;
  /// Directory name, e.g. "CINS.ask_about-Q.full.seed1".
  std::string name() const;
};

/// STD cells ignore prompt variants and ablations; PE cells ignore
/// ablations. Order: seed, mode, variant, ablation.
std::vector<Cell> expand_cells(const Manifest& manifest, const PromptCatalog& catalog);

/// Samples every seed and writes splits/seed<N>.jsonl under the output
/// directory. Returns the written paths in seed order; any failure throws.
std::vector<std::filesystem::path> run_sample(const Manifest& manifest);

struct CellOutcome {
  Cell cell;
  std::filesystem::path dir;
  std::string error;  // empty on success
};

struct CompileOutcome {
  std::vector<CellOutcome> cells;
  bool ok() const;
};

/// Loads inputs once, samples once per seed and writes every cell. Shared
/// input failures throw; per-cell failures are recorded in the outcome and
/// the cell's error.txt. `jobs` > 1 compiles cells in parallel.
CompileOutcome run_compile(const Manifest& manifest, int jobs = 1);

/// Scores `split` ("test" or "validation") of a compiled cell against a
/// predictions JSONL of {"id", "prediction"}. Writes scores.<split>.json into
/// the cell directory. Missing, extra or duplicate ids throw with every id
/// listed.
RunScores run_score(const std::filesystem::path& cell_dir,
                    const std::filesystem::path& predictions, const std::string& split = "test");

struct ReportRow {
  std::string mode;
  std::string prompt;  // "-" for STD
  std::string ablation;
  std::vector<std::uint64_t> expected_seeds;
  std::optional<AggregateScores> test;
  std::optional<AggregateScores> validation;
  bool complete = false;  // every expected seed scored on test
};

struct BestPrompt {
  std::string mode;
  std::string ablation;
  std::string selection;  // "validation" or "test"
  std::string prompt;
  std::string metric;
  double mean = 0;
  double stddev = 0;
};

struct Report {
  Task task = Task::IC;
  std::vector<ReportRow> rows;
  std::vector<BestPrompt> best;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Primary metric used for prompt selection: accuracy, jga or bleu.
std::string primary_metric(Task task);

/// Builds the report from cells.json and every scores file under
/// `output_dir`, then writes report.json and report.txt there.
Report run_report(const std::filesystem::path& output_dir);

}  // namespace cins
