// cins: sample, compile, score and report instruction-input experiments.
//
// Exit codes: 0 success, 1 data or runtime failure (including any failed
// cell), 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cins/experiment.hpp"
#include "cins/ingest.hpp"
#include "cins/schema_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json stats_json(const cins::LoadStats& s) {
  return {{"rows", s.rows},
          {"kept", s.kept},
          {"dropped_by_domain", s.dropped_by_domain},
          {"dropped_out_of_scope", s.dropped_out_of_scope},
          {"state_entries_dropped", s.state_entries_dropped}};
}

void write_lines(const fs::path& path, const std::vector<json>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cins::DataError(path.string(), "cannot write file");
  for (const auto& r : rows) out << cins::dump_line(r) << "\n";
}

int ingest(const std::string& task_name, const fs::path& ontology_path, const fs::path& data,
           const std::vector<std::string>& domains, const fs::path& t2g2, const fs::path& out) {
  const auto task = cins::parse_task(task_name);
  json summary{{"task", cins::to_string(task)}, {"data", data.string()}};
  std::map<std::string, std::vector<json>> rows;
  switch (task) {
    case cins::Task::IC: {
      const auto ds = cins::load_intent_dataset(data, cins::load_ontology(ontology_path), domains);
      summary["stats"] = stats_json(ds.stats);
      summary["domains"] = ds.domains;
      for (const auto& [split, examples] : ds.splits) {
        summary["counts"][split] = examples.size();
        for (const auto& e : examples)
          rows[split].push_back(
              {{"id", e.id}, {"text", e.utterance}, {"intent", e.intent}, {"domain", e.domain}});
      }
      break;
    }
    case cins::Task::DST: {
      const auto ds = cins::load_dst_dataset(data, cins::load_ontology(ontology_path), domains);
      summary["stats"] = stats_json(ds.stats);
      summary["domains"] = ds.domains;
      summary["counts"]["dialogs"] = ds.dialogs.size();
      for (const auto& d : ds.dialogs)
        rows["dialogs"].push_back({{"id", d.id}, {"turns", d.turns}, {"states", d.states}});
      break;
    }
    case cins::Task::NLG: {
      std::optional<cins::TemplateTable> table;
      if (!t2g2.empty()) table = cins::TemplateTable::load(t2g2);
      const auto ds = cins::load_nlg_dataset(data, table ? &*table : nullptr);
      summary["stats"] = stats_json(ds.stats);
      summary["counts"]["items"] = ds.items.size();
      for (const auto& item : ds.items)
        rows["items"].push_back({{"id", item.id},
                                 {"dialog_id", item.dialog_id},
                                 {"domain", item.domain},
                                 {"acts", cins::render_naive(item.frames)},
                                 {"reference", item.reference}});
      break;
    }
  }
  if (!out.empty()) {
    fs::create_directories(out);
    for (const auto& [name, lines] : rows) write_lines(out / (name + ".jsonl"), lines);
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int report_cells(const cins::CompileOutcome& outcome) {
  std::size_t failed = 0;
  for (const auto& c : outcome.cells) {
    if (c.error.empty()) continue;
    ++failed;
    std::cerr << "cell " << c.cell.name() << " failed: " << c.error << "\n";
  }
  std::cout << outcome.cells.size() - failed << "/" << outcome.cells.size() << " cells compiled\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile and score instruction inputs for task-oriented dialog tasks"};
  app.require_subcommand(1);

  std::string task;
  fs::path ontology, data, t2g2, out;
  std::vector<std::string> domains;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load a dataset, print load statistics, optionally export normalized rows");
  ingest_cmd->add_option("--task", task, "IC, DST or NLG")->required();
  ingest_cmd->add_option("--data", data, "Dataset file")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--ontology", ontology, "Ontology JSON (IC, DST)")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--domains", domains, "Domain filter")->delimiter(',');
  ingest_cmd->add_option("--t2g2-templates", t2g2, "T2G2 template table (NLG)")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", out, "Directory for normalized JSONL rows");

  fs::path manifest_path;
  int jobs = 1;
  auto* sample_cmd = app.add_subcommand("sample", "Write per-seed split manifests");
  sample_cmd->add_option("manifest", manifest_path, "Experiment manifest")->required()->check(CLI::ExistingFile);
  auto* compile_cmd = app.add_subcommand("compile", "Compile every cell of the experiment grid");
  compile_cmd->add_option("manifest", manifest_path, "Experiment manifest")->required()->check(CLI::ExistingFile);
  compile_cmd->add_option("-j,--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);
  auto* ablate_cmd = app.add_subcommand("ablate", "Compile the CINS component-ablation grid");
  ablate_cmd->add_option("manifest", manifest_path, "Experiment manifest")->required()->check(CLI::ExistingFile);
  ablate_cmd->add_option("-j,--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);

  fs::path cell_dir, predictions;
  std::string split = "test";
  auto* score_cmd = app.add_subcommand("score", "Score predictions for one compiled cell");
  score_cmd->add_option("cell", cell_dir, "Cell directory")->required()->check(CLI::ExistingDirectory);
  score_cmd->add_option("predictions", predictions, "Predictions JSONL {id, prediction}")
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd->add_option("--split", split, "test or validation")->check(CLI::IsMember({"test", "validation"}));

  fs::path output_dir;
  auto* report_cmd = app.add_subcommand("report", "Aggregate scores into report.json and report.txt");
  report_cmd->add_option("output_dir", output_dir, "Experiment output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest_cmd) {
      if (cins::parse_task(task) != cins::Task::NLG && ontology.empty()) {
        std::cerr << "error: --ontology is required for " << task << "\n";
        return 2;
      }
      return ingest(task, ontology, data, domains, t2g2, out);
    }
    if (*sample_cmd) {
      for (const auto& p : cins::run_sample(cins::Manifest::load(manifest_path))) std::cout << p.string() << "\n";
      return 0;
    }
    if (*compile_cmd) return report_cells(cins::run_compile(cins::Manifest::load(manifest_path), jobs));
    if (*ablate_cmd)
      return report_cells(
          cins::run_compile(cins::expand_ablation_grid(cins::Manifest::load(manifest_path)), jobs));
    if (*score_cmd) {
      const auto scores = cins::run_score(cell_dir, predictions, split);
      json j{{"n", scores.n}, {"seed", scores.seed}, {"metrics", scores.metrics}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*report_cmd) {
      std::cout << cins::run_report(output_dir).to_text();
      return 0;
    }
  } catch (const cins::ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
