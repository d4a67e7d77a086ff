#include "cins/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "cins/ingest.hpp"
#include "cins/schema_json.hpp"

namespace cins {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 3> kSplits = {"train", "validation", "test"};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string(), "cannot write file");
  out << text;
  if (!out) throw DataError(path.string(), "write failed");
}

std::string to_jsonl(const std::vector<CompiledExample>& examples) {
  std::string out;
  for (const auto& ex : examples) out += dump_line(json(ex)) + "\n";
  return out;
}

std::vector<json> read_jsonl_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), "cannot open file");
  std::vector<json> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ":" + std::to_string(n), std::string("invalid JSON: ") + e.what());
    }
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Strategy expected_strategy(Task task) {
  switch (task) {
    case Task::IC: return Strategy::k_per_label;
    case Task::DST: return Strategy::percent_dialogs;
    case Task::NLG: return Strategy::k_dialogs_per_domain;
  }
  return Strategy::k_per_label;
}

std::string fmt_pct(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v * 100.0;
  return s.str();
}

// ---------------------------------------------------------------------------
// Shared inputs, loaded once per run_compile.

struct Inputs {
  Ontology ontology;
  TemplateSet templates;
  PromptCatalog catalog;
  std::optional<TemplateTable> t2g2;

  std::map<std::string, std::vector<IntentExample>> ic;  // by split
  std::vector<std::string> labelset;
  std::map<std::string, DstDataset> dst;
  std::vector<SlotSpec> slots;
  std::map<std::string, NlgDataset> nlg;
};

const fs::path& split_path(const DataPaths& data, std::string_view split) {
  if (split == "train") return data.train;
  if (split == "validation") return data.validation;
  return data.test;
}

Inputs load_inputs(const Manifest& m) {
  Inputs in;
  if (!m.ontology.empty()) in.ontology = load_ontology(m.ontology);
  in.templates = m.templates ? TemplateSet::load(*m.templates) : TemplateSet::defaults();
  in.catalog = m.prompts ? PromptCatalog::load(*m.prompts) : PromptCatalog::defaults();
  if (m.t2g2_templates) in.t2g2 = TemplateTable::load(*m.t2g2_templates);

  switch (m.task) {
    case Task::IC: {
      std::map<fs::path, IntentDataset> files;
      for (const auto split : kSplits) {
        const auto& path = split_path(m.data, split);
        if (!files.contains(path)) files.emplace(path, load_intent_dataset(path, in.ontology, m.domains));
        in.ic[std::string(split)] = files.at(path).split(std::string(split));
      }
      for (const auto& d : files.begin()->second.domains)
        for (const auto& intent : in.ontology.domain(d).intents) in.labelset.push_back(intent.name);
      break;
    }
    case Task::DST:
      for (const auto split : kSplits)
        in.dst[std::string(split)] = load_dst_dataset(split_path(m.data, split), in.ontology, m.domains);
      in.slots = in_scope_slots(in.ontology, m.domains);
      break;
    case Task::NLG: {
      const TemplateTable* table = in.t2g2 ? &*in.t2g2 : nullptr;
      for (const auto split : kSplits)
        in.nlg[std::string(split)] = load_nlg_dataset(split_path(m.data, split), table);
      break;
    }
  }
  return in;
}

// ---------------------------------------------------------------------------
// Sampling, once per seed.

struct SeedSplits {
  Split train;
  Split validation;
  std::string manifest_text;
  std::string error;
};

std::vector<SampledUnit> validation_units(const Inputs& in, Task task) {
  switch (task) {
    case Task::IC: return intent_units(in.ic.at("validation"));
    case Task::DST: return dialog_units(in.dst.at("validation"));
    case Task::NLG: return dialog_units(in.nlg.at("validation"));
  }
  return {};
}

SeedSplits sample_seed(const Manifest& m, const Inputs& in, std::uint64_t seed) {
  SeedSplits out;
  try {
    SamplePlan plan = m.plan;
    plan.seed = seed;
    std::vector<SampledUnit> pool;
    switch (m.task) {
      case Task::IC:
        out.train = sample_k_per_label(in.ic.at("train"), static_cast<std::size_t>(plan.k_or_pct), seed);
        pool = intent_units(in.ic.at("train"));
        break;
      case Task::DST:
        out.train = sample_percent_dialogs(in.dst.at("train"), plan.k_or_pct, seed);
        pool = dialog_units(in.dst.at("train"));
        break;
      case Task::NLG:
        out.train = sample_k_dialogs_per_domain(in.nlg.at("train"),
                                                static_cast<std::size_t>(plan.k_or_pct), seed,
                                                plan.required_coverage);
        pool = dialog_units(in.nlg.at("train"));
        break;
    }
    auto val_pool = validation_units(in, m.task);
    if (plan.match_validation) {
      out.validation = match_validation(val_pool, out.train, seed, m.task == Task::IC);
    } else {
      out.validation = Split{std::move(val_pool)};
    }
    out.manifest_text = split_manifest(plan, dataset_hash(pool), out.train, &out.validation);
  } catch (const std::exception& e) {
    out.error = std::string("sampling failed for seed ") + std::to_string(seed) + ": " + e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cell compilation.

std::vector<CompiledExample> compile_split(const Manifest& m, const Inputs& in, const Cell& cell,
                                           std::string_view split, const Split* chosen) {
  std::set<std::string> ids;
  if (chosen)
    for (const auto& u : chosen->units) ids.insert(u.id);
  auto keep = [&](const std::string& id) { return !chosen || ids.contains(id); };

  const auto variant = cell.variant.value_or(PromptVariant{});
  const auto tmpl = in.templates.make(m.task, cell.mode, variant, m.nlg_repr);
  std::vector<CompiledExample> out;
  switch (m.task) {
    case Task::IC:
      for (const auto& ex : in.ic.at(std::string(split)))
        if (keep(ex.id)) out.push_back(compile_ic(ex, in.ontology, tmpl, in.catalog, cell.ablation));
      break;
    case Task::DST:
      for (const auto& dialog : in.dst.at(std::string(split)).dialogs) {
        if (!keep(dialog.id)) continue;
        for (const auto& turn : dst_turns(dialog)) {
          auto compiled = compile_dst(turn, in.slots, tmpl, in.catalog, cell.ablation);
          out.insert(out.end(), std::make_move_iterator(compiled.begin()),
                     std::make_move_iterator(compiled.end()));
        }
      }
      break;
    case Task::NLG: {
      const auto repr = m.nlg_repr.value_or(NlgRepr::naive);
      const TemplateTable* table = in.t2g2 ? &*in.t2g2 : nullptr;
      for (const auto& item : in.nlg.at(std::string(split)).items)
        if (keep(item.dialog_id))
          out.push_back(compile_nlg(item, repr, table, tmpl, in.catalog, cell.ablation));
      break;
    }
  }
  for (auto& ex : out) {
    ex.meta["seed"] = std::to_string(cell.seed);
    ex.meta["split"] = std::string(split);
  }
  return out;
}

json cell_json(const Cell& cell) {
  return json{{"name", cell.name()},
              {"row", cell.row_name()},
              {"mode", to_string(cell.mode)},
              {"prompt", cell.variant ? cell.variant->label() : "-"},
              {"ablation", cell.ablation.label()},
              {"seed", cell.seed}};
}

void compile_cell(const Manifest& m, const Inputs& in, const SeedSplits& splits, const Cell& cell,
                  const fs::path& dir) {
  if (!splits.error.empty()) throw Error(splits.error);

  std::map<std::string, std::vector<CompiledExample>> compiled;
  compiled["train"] = compile_split(m, in, cell, "train", &splits.train);
  compiled["validation"] = compile_split(m, in, cell, "validation", &splits.validation);
  compiled["test"] = compile_split(m, in, cell, "test", nullptr);

  json descriptor = cell_json(cell);
  descriptor["manifest"] = m.name;
  descriptor["task"] = to_string(m.task);
  descriptor["template_version"] = in.templates.version();
  descriptor["prompt_version"] = in.catalog.version();
  descriptor["nlg_repr"] = m.nlg_repr ? json(to_string(*m.nlg_repr)) : json(nullptr);
  descriptor["labelset"] = in.labelset;
  descriptor["split_manifest"] = "split.jsonl";
  for (const auto& [split, examples] : compiled) {
    descriptor["files"][split] = split + ".jsonl";
    descriptor["counts"][split] = examples.size();
  }

  for (const auto& [split, examples] : compiled) write_text(dir / (split + ".jsonl"), to_jsonl(examples));
  write_text(dir / "split.jsonl", splits.manifest_text);
  write_text(dir / "cell.json", descriptor.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Scoring helpers.

double metric_of(const AggregateScores& a, const std::string& name) {
  const auto it = a.metrics.find(name);
  return it == a.metrics.end() ? 0.0 : it->second.mean;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

void Manifest::validate() const {
  if (name.empty()) throw ManifestError("manifest needs a name");
  if (seeds.empty()) throw ManifestError("manifest needs at least one seed");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ManifestError("manifest seeds must be distinct");
  if (modes.empty()) throw ManifestError("manifest needs at least one mode");
  if (std::set<Mode>(modes.begin(), modes.end()).size() != modes.size())
    throw ManifestError("manifest modes must be distinct");
  if (std::set<PromptVariant>(prompt_variants.begin(), prompt_variants.end()).size() !=
      prompt_variants.size())
    throw ManifestError("manifest prompt variants must be distinct");
  std::set<std::string> ablation_labels;
  for (const auto& a : ablations)
    if (!ablation_labels.insert(a.label()).second)
      throw ManifestError("manifest ablations must be distinct");
  try {
    plan.validate();
  } catch (const Error& e) {
    throw ManifestError(e.what());
  }
  if (plan.strategy != expected_strategy(task))
    throw ManifestError(std::string(to_string(task)) + " manifests sample with " +
                        std::string(to_string(expected_strategy(task))));
  if (task != Task::NLG && ontology.empty())
    throw ManifestError(std::string(to_string(task)) + " manifests need an ontology");
  if (task != Task::NLG && domains.empty()) throw ManifestError("manifest needs a domain filter");
  if (task == Task::NLG && nlg_repr == NlgRepr::t2g2 && !t2g2_templates)
    throw ManifestError("the t2g2 representation needs t2g2_templates");
  if (data.train.empty() || data.validation.empty() || data.test.empty())
    throw ManifestError("manifest needs train, validation and test data paths");
  if (output_dir.empty()) throw ManifestError("manifest needs an output_dir");
}

Manifest Manifest::from_json(const json& j, const fs::path& base_dir) {
  Manifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.task = parse_task(j.at("task").get<std::string>());
    if (j.contains("ontology")) m.ontology = resolve(base_dir, j.at("ontology").get<std::string>());
    const auto& data = j.at("data");
    if (data.is_string()) {
      m.data.train = m.data.validation = m.data.test = resolve(base_dir, data.get<std::string>());
    } else {
      m.data.train = resolve(base_dir, data.at("train").get<std::string>());
      m.data.validation = resolve(base_dir, data.at("validation").get<std::string>());
      m.data.test = resolve(base_dir, data.at("test").get<std::string>());
    }
    m.domains = j.value("domains", std::vector<std::string>{});
    for (const auto* key : {"templates", "prompts", "t2g2_templates"}) {
      if (!j.contains(key) || j.at(key).is_null()) continue;
      const auto p = resolve(base_dir, j.at(key).get<std::string>());
      if (std::string_view(key) == "templates") m.templates = p;
      else if (std::string_view(key) == "prompts") m.prompts = p;
      else m.t2g2_templates = p;
    }
    const auto& plan = j.at("plan");
    m.plan.strategy = parse_strategy(plan.at("strategy").get<std::string>());
    m.plan.k_or_pct = plan.at("k_or_pct").get<double>();
    m.plan.match_validation = plan.value("match_validation", true);
    m.plan.required_coverage = plan.value("required_coverage", false);
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& mode : j.at("modes")) m.modes.push_back(parse_mode(mode.get<std::string>()));
    for (const auto& v : j.value("prompt_variants", json::array()))
      m.prompt_variants.push_back(PromptVariant::from_label(v.get<std::string>()));
    for (const auto& a : j.value("ablations", json::array())) m.ablations.push_back(a.get<AblationMask>());
    if (j.contains("nlg_repr") && !j.at("nlg_repr").is_null())
      m.nlg_repr = parse_nlg_repr(j.at("nlg_repr").get<std::string>());

    const fs::path out(j.at("output_dir").get<std::string>());
    const char* root = std::getenv(kOutputRootEnv);
    if (out.is_absolute()) m.output_dir = out;
    else m.output_dir = (root && *root ? fs::path(root) : fs::current_path()) / out;
  } catch (const json::exception& e) {
    throw ManifestError(std::string("malformed manifest: ") + e.what());
  } catch (const ManifestError&) {
    throw;
  } catch (const Error& e) {
    throw ManifestError(e.what());
  }
  m.validate();
  return m;
}

Manifest Manifest::load(const fs::path& path) {
  json doc;
  try {
    doc = read_json_file(path);
  } catch (const Error& e) {
    throw ManifestError(e.what());
  }
  return from_json(doc, fs::absolute(path).parent_path());
}

json Manifest::to_json() const {
  json j{{"name", name},
         {"task", to_string(task)},
         {"data", {{"train", data.train.string()},
                   {"validation", data.validation.string()},
                   {"test", data.test.string()}}},
         {"domains", domains},
         {"plan", {{"strategy", to_string(plan.strategy)},
                   {"k_or_pct", plan.k_or_pct},
                   {"match_validation", plan.match_validation},
                   {"required_coverage", plan.required_coverage}}},
         {"seeds", seeds},
         {"output_dir", output_dir.string()}};
  if (!ontology.empty()) j["ontology"] = ontology.string();
  if (templates) j["templates"] = templates->string();
  if (prompts) j["prompts"] = prompts->string();
  if (t2g2_templates) j["t2g2_templates"] = t2g2_templates->string();
  if (nlg_repr) j["nlg_repr"] = to_string(*nlg_repr);
  j["modes"] = json::array();
  for (const auto mode : modes) j["modes"].push_back(to_string(mode));
  j["prompt_variants"] = json::array();
  for (const auto& v : prompt_variants) j["prompt_variants"].push_back(v.label());
  j["ablations"] = json::array();
  for (const auto& a : ablations) j["ablations"].push_back(a.label());
  return j;
}

Manifest expand_ablation_grid(Manifest m) {
  m.ablations.clear();
  for (const auto* label : {"full", "no_definition", "no_constraint", "no_prompt", "no_descriptions"})
    m.ablations.push_back(AblationMask::from_label(label));
  if (std::find(m.modes.begin(), m.modes.end(), Mode::CINS) == m.modes.end())
    m.modes.push_back(Mode::CINS);
  return m;
}

// ---------------------------------------------------------------------------
// Cells

std::string Cell::row_name() const {
  std::string prompt = "-";
  if (variant)
    prompt = variant->root + (variant->expression == PromptExpression::declarative ? "-D" : "-Q");
  return std::string(to_string(mode)) + "." + prompt + "." + ablation.label();
}

std::string Cell::name() const { return row_name() + ".seed" + std::to_string(seed); }

std::vector<Cell> expand_cells(const Manifest& m, const PromptCatalog& catalog) {
  auto variants = m.prompt_variants.empty() ? variant_matrix(m.task, catalog) : m.prompt_variants;
  for (const auto& v : variants)
    if (!catalog.find(m.task, v.root, v.expression))
      throw ManifestError("prompt variant " + v.label() + " is not in the prompt catalog");
  const std::vector<AblationMask> ablations =
      m.ablations.empty() ? std::vector<AblationMask>{AblationMask{}} : m.ablations;

  std::vector<Cell> cells;
  for (const auto seed : m.seeds) {
    for (const auto mode : m.modes) {
      if (mode == Mode::STD) {
        cells.push_back({mode, std::nullopt, {}, seed});
        continue;
      }
      for (const auto& v : variants) {
        if (mode == Mode::PE) {
          cells.push_back({mode, v, {}, seed});
          continue;
        }
        for (const auto& a : ablations) cells.push_back({mode, v, a, seed});
      }
    }
  }
  return cells;
}

std::vector<fs::path> run_sample(const Manifest& m) {
  m.validate();
  const Inputs in = load_inputs(m);
  const fs::path dir = m.output_dir / "splits";
  fs::create_directories(dir);
  std::vector<fs::path> written;
  for (const auto seed : m.seeds) {
    const auto splits = sample_seed(m, in, seed);
    if (!splits.error.empty()) throw Error(splits.error);
    written.push_back(dir / ("seed" + std::to_string(seed) + ".jsonl"));
    write_text(written.back(), splits.manifest_text);
  }
  return written;
}

bool CompileOutcome::ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.error.empty(); });
}

CompileOutcome run_compile(const Manifest& m, int jobs) {
  m.validate();
  const Inputs in = load_inputs(m);
  const auto cells = expand_cells(m, in.catalog);

  std::map<std::uint64_t, SeedSplits> splits;
  for (const auto seed : m.seeds) splits.emplace(seed, sample_seed(m, in, seed));

  const fs::path cells_dir = m.output_dir / "cells";
  fs::create_directories(cells_dir);

  CompileOutcome outcome;
  outcome.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      auto& result = outcome.cells[i];
      result.cell = cells[i];
      result.dir = cells_dir / cells[i].name();
      try {
        fs::remove_all(result.dir);
        fs::create_directories(result.dir);
        compile_cell(m, in, splits.at(cells[i].seed), cells[i], result.dir);
      } catch (const std::exception& e) {
        result.error = e.what();
        // Partial files never survive a failed cell.
        std::error_code ec;
        fs::remove_all(result.dir, ec);
        fs::create_directories(result.dir, ec);
        std::ofstream(result.dir / "error.txt") << result.error << "\n";
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json index{{"manifest", m.name},
             {"task", to_string(m.task)},
             {"seeds", m.seeds},
             {"cells", json::array()}};
  for (const auto& c : outcome.cells) {
    auto entry = cell_json(c.cell);
    entry["status"] = c.error.empty() ? "ok" : "failed";
    if (!c.error.empty()) entry["error"] = c.error;
    index["cells"].push_back(std::move(entry));
  }
  write_text(m.output_dir / "cells.json", index.dump(2) + "\n");
  return outcome;
}

// ---------------------------------------------------------------------------
// Scoring

RunScores run_score(const fs::path& cell_dir, const fs::path& predictions, const std::string& split) {
  if (split != "test" && split != "validation")
    throw Error("can only score the test or validation split, not '" + split + "'");
  const auto descriptor = read_json_file(cell_dir / "cell.json");
  const Task task = parse_task(descriptor.at("task").get<std::string>());

  std::vector<CompiledExample> references;
  for (const auto& row : read_jsonl_values(cell_dir / (split + ".jsonl")))
    references.push_back(row.get<CompiledExample>());

  std::map<std::string, std::string> predicted;
  std::vector<std::string> duplicates;
  for (const auto& row : read_jsonl_values(predictions)) {
    const auto id = row.at("id").get<std::string>();
    if (!predicted.emplace(id, row.at("prediction").get<std::string>()).second) duplicates.push_back(id);
  }
  std::set<std::string> expected;
  std::vector<std::string> missing;
  for (const auto& ref : references) {
    expected.insert(ref.id);
    if (!predicted.contains(ref.id)) missing.push_back(ref.id);
  }
  std::vector<std::string> extra;
  for (const auto& [id, text] : predicted)
    if (!expected.contains(id)) extra.push_back(id);
  if (!missing.empty() || !extra.empty() || !duplicates.empty()) {
    std::ostringstream msg;
    msg << "predictions do not match " << split << " ids of " << cell_dir.filename().string();
    auto list = [&msg](const char* what, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg << "\n  " << what << " (" << ids.size() << "):";
      for (const auto& id : ids) msg << " " << id;
    };
    list("missing", missing);
    list("extra", extra);
    list("duplicate", duplicates);
    throw DataError(predictions.string(), msg.str());
  }

  RunScores scores;
  scores.task = task;
  scores.n = references.size();
  scores.seed = descriptor.at("seed").get<std::uint64_t>();
  if (references.empty()) throw Error("nothing to score in " + (cell_dir / (split + ".jsonl")).string());

  switch (task) {
    case Task::IC: {
      std::vector<std::string> preds, golds;
      for (const auto& ref : references) {
        preds.push_back(predicted.at(ref.id));
        golds.push_back(ref.target_text);
      }
      const auto acc =
          intent_accuracy(preds, golds, descriptor.value("labelset", std::vector<std::string>{}));
      scores.metrics["accuracy"] = acc.accuracy;
      scores.metrics["out_of_labelset"] = acc.out_of_labelset_rate;
      break;
    }
    case Task::DST: {
      // Per-slot generations become per-turn states keyed by (dialog, turn).
      std::map<std::pair<std::string, int>, std::pair<DialogState, DialogState>> turns;
      for (const auto& ref : references) {
        const std::pair key{ref.meta.at("dialog_id"), std::stoi(ref.meta.at("turn"))};
        auto& [pred, gold] = turns[key];
        const SlotKey slot{ref.meta.at("domain"), ref.meta.at("slot")};
        const auto& p = predicted.at(ref.id);
        if (normalize_label(p) != kNoneValue && !normalize_label(p).empty()) pred.entries[slot] = p;
        if (normalize_label(ref.target_text) != kNoneValue) gold.entries[slot] = ref.target_text;
      }
      std::vector<DialogState> preds, golds;
      for (auto& [key, states] : turns) {
        preds.push_back(std::move(states.first));
        golds.push_back(std::move(states.second));
      }
      scores.metrics["jga"] = joint_goal_accuracy(preds, golds);
      break;
    }
    case Task::NLG: {
      std::vector<std::string> outputs, refs;
      std::vector<ActList> frames;
      for (const auto& ref : references) {
        outputs.push_back(predicted.at(ref.id));
        refs.push_back(ref.target_text);
        frames.push_back(parse_acts(ref.meta.at("acts")));
      }
      scores.metrics["bleu"] = corpus_bleu(outputs, refs);
      scores.metrics["ser"] = slot_error_rate(outputs, frames);
      break;
    }
  }

  json out{{"cell", descriptor.at("name")},
           {"row", descriptor.at("row")},
           {"split", split},
           {"task", to_string(task)},
           {"mode", descriptor.at("mode")},
           {"prompt", descriptor.at("prompt")},
           {"ablation", descriptor.at("ablation")},
           {"seed", scores.seed},
           {"n", scores.n},
           {"metrics", scores.metrics}};
  if (task == Task::NLG) out["bleu_variant"] = kBleuVariant;
  write_text(cell_dir / ("scores." + split + ".json"), out.dump(2) + "\n");
  return scores;
}

// ---------------------------------------------------------------------------
// Reporting

std::string primary_metric(Task task) {
  switch (task) {
    case Task::IC: return "accuracy";
    case Task::DST: return "jga";
    case Task::NLG: return "bleu";
  }
  return "accuracy";
}

json Report::to_json() const {
  auto agg_json = [](const std::optional<AggregateScores>& a) -> json {
    if (!a) return nullptr;
    json metrics = json::object();
    for (const auto& [name, m] : a->metrics)
      metrics[name] = {{"mean", m.mean}, {"std", m.stddev}, {"values", m.values}};
    return json{{"seeds", a->seeds}, {"metrics", metrics}};
  };
  json rows = json::array();
  for (const auto& r : this->rows)
    rows.push_back({{"mode", r.mode},
                    {"prompt", r.prompt},
                    {"ablation", r.ablation},
                    {"expected_seeds", r.expected_seeds},
                    {"complete", r.complete},
                    {"test", agg_json(r.test)},
                    {"validation", agg_json(r.validation)}});
  json best_rows = json::array();
  for (const auto& b : best)
    best_rows.push_back({{"mode", b.mode},
                         {"ablation", b.ablation},
                         {"selection", b.selection},
                         {"prompt", b.prompt},
                         {"metric", b.metric},
                         {"mean", b.mean},
                         {"std", b.stddev}});
  json out{{"task", to_string(task)}, {"rows", rows}, {"best", best_rows}};
  if (task == Task::NLG) out["bleu_variant"] = kBleuVariant;
  return out;
}

std::string Report::to_text() const {
  std::set<std::string> names;
  for (const auto& r : rows)
    if (r.test)
      for (const auto& [name, m] : r.test->metrics) names.insert(name);

  std::ostringstream out;
  out << "task " << to_string(task) << " (test split, mean±std over seeds, x100)\n";
  out << std::left << std::setw(6) << "mode" << std::setw(18) << "prompt" << std::setw(18)
      << "ablation" << std::setw(7) << "seeds";
  for (const auto& n : names) out << std::setw(16) << n;
  out << "\n";
  for (const auto& r : rows) {
    out << std::setw(6) << r.mode << std::setw(18) << r.prompt << std::setw(18) << r.ablation;
    const std::size_t scored = r.test ? r.test->seeds.size() : 0;
    out << std::setw(7) << (std::to_string(scored) + "/" + std::to_string(r.expected_seeds.size()));
    for (const auto& n : names) {
      if (!r.test || !r.test->metrics.contains(n)) {
        out << std::setw(16) << "--";
        continue;
      }
      const auto& m = r.test->metrics.at(n);
      out << std::setw(16) << (fmt_pct(m.mean) + "±" + fmt_pct(m.stddev));
    }
    if (!r.complete) out << "  (partial)";
    out << "\n";
  }
  for (const auto& b : best)
    out << "best " << b.mode << " [" << b.ablation << "] by " << b.selection << ": " << b.prompt
        << " (" << b.metric << " " << fmt_pct(b.mean) << "±" << fmt_pct(b.stddev) << ")\n";
  if (task == Task::NLG) out << "bleu: " << kBleuVariant << "\n";
  return out.str();
}

Report run_report(const fs::path& output_dir) {
  const auto index = read_json_file(output_dir / "cells.json");
  Report report;
  report.task = parse_task(index.at("task").get<std::string>());
  const auto seeds = index.at("seeds").get<std::vector<std::uint64_t>>();

  // Rows in first-appearance order of the cell index.
  std::vector<std::string> order;
  std::map<std::string, ReportRow> rows;
  std::map<std::string, std::map<std::string, std::vector<RunScores>>> runs;  // row -> split -> runs
  for (const auto& c : index.at("cells")) {
    const auto row = c.at("row").get<std::string>();
    if (!rows.contains(row)) {
      order.push_back(row);
      rows[row] = ReportRow{c.at("mode").get<std::string>(), c.at("prompt").get<std::string>(),
                            c.at("ablation").get<std::string>(), seeds, std::nullopt, std::nullopt, false};
    }
    for (const auto* split : {"test", "validation"}) {
      const auto path = output_dir / "cells" / c.at("name").get<std::string>() /
                        (std::string("scores.") + split + ".json");
      if (!fs::exists(path)) continue;
      const auto s = read_json_file(path);
      RunScores r;
      r.task = parse_task(s.at("task").get<std::string>());
      r.metrics = s.at("metrics").get<std::map<std::string, double>>();
      r.n = s.at("n").get<std::size_t>();
      r.seed = s.at("seed").get<std::uint64_t>();
      runs[row][split].push_back(std::move(r));
    }
  }

  for (const auto& name : order) {
    auto row = rows.at(name);
    if (auto it = runs[name].find("test"); it != runs[name].end()) row.test = aggregate(it->second);
    if (auto it = runs[name].find("validation"); it != runs[name].end())
      row.validation = aggregate(it->second);
    row.complete = row.test && row.test->seeds.size() == seeds.size();
    report.rows.push_back(std::move(row));
  }

  // Best prompt per (mode, ablation), by validation when every candidate has
  // validation scores, and by test always.
  const auto metric = primary_metric(report.task);
  std::vector<std::pair<std::string, std::string>> groups;
  for (const auto& r : report.rows) {
    if (r.prompt == "-") continue;
    const std::pair g{r.mode, r.ablation};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  for (const auto& [mode, ablation] : groups) {
    std::vector<const ReportRow*> candidates;
    for (const auto& r : report.rows)
      if (r.mode == mode && r.ablation == ablation && r.prompt != "-") candidates.push_back(&r);
    for (const auto* selection : {"validation", "test"}) {
      const bool by_validation = std::string_view(selection) == "validation";
      const ReportRow* best = nullptr;
      bool usable = true;
      for (const auto* r : candidates) {
        const auto& scores = by_validation ? r->validation : r->test;
        if (!scores) {
          usable = usable && !by_validation;
          continue;
        }
        const auto& best_scores = best ? (by_validation ? best->validation : best->test) : scores;
        if (!best || metric_of(*scores, metric) > metric_of(*best_scores, metric)) best = r;
      }
      if (!usable || !best) continue;
      const auto& chosen = by_validation ? best->validation : best->test;
      const auto& m = chosen->metrics.at(metric);
      // Report the test numbers of the chosen prompt when they exist.
      const auto& shown = best->test && best->test->metrics.contains(metric) ? best->test->metrics.at(metric) : m;
      report.best.push_back({mode, ablation, selection, best->prompt, metric, shown.mean, shown.stddev});
    }
  }

  write_text(output_dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(output_dir / "report.txt", report.to_text());
  return report;
}

}  // namespace cins
