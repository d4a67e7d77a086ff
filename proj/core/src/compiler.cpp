#include "cins/compiler.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "cins/schema_json.hpp"

namespace cins {

using nlohmann::json;

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool is_placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

std::map<std::string, std::string> base_meta(const InstructionTemplate& tmpl,
                                             const AblationMask& mask) {
  std::map<std::string, std::string> meta{
      {"mode", std::string(to_string(tmpl.mode))},
      {"template", tmpl.id},
  };
  if (tmpl.mode != Mode::STD)
    meta["prompt"] = PromptVariant{tmpl.prompt_root, tmpl.prompt_expression}.label();
  if (tmpl.mode == Mode::CINS) meta["ablation"] = mask.label();
  return meta;
}

// Resolves the prompt text for a non-STD template.
std::string prompt_text(const InstructionTemplate& tmpl, const PromptCatalog& catalog,
                        bool boolean_slot, const std::map<std::string, std::string>& values) {
  if (tmpl.mode == Mode::STD) return {};
  const auto& entry = catalog.at(tmpl.task, tmpl.prompt_root, tmpl.prompt_expression);
  const auto& text = boolean_slot && !entry.boolean_text.empty() ? entry.boolean_text : entry.text;
  return fill_placeholders(text, values);
}

InstructionText render(const InstructionTemplate& tmpl, const PromptCatalog& catalog,
                       const std::string& definition_skeleton,
                       const std::map<std::string, std::string>& values, bool boolean_slot) {
  InstructionText out;
  out.mode = tmpl.mode;
  if (tmpl.mode == Mode::CINS) {
    out.definition = fill_placeholders(definition_skeleton, values);
    out.constraint = fill_placeholders(tmpl.constraint, values);
  }
  out.prompt = prompt_text(tmpl, catalog, boolean_slot, values);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Prompt catalog

std::string PromptVariant::label() const {
  return root + (expression == PromptExpression::declarative ? "(D)" : "(Q)");
}

PromptVariant PromptVariant::from_label(std::string_view label) {
  if (label.size() < 4 || label.back() != ')' || label[label.size() - 3] != '(')
    throw Error("prompt variant must look like root(D) or root(Q): '" + std::string(label) + "'");
  const char kind = label[label.size() - 2];
  if (kind != 'D' && kind != 'Q')
    throw Error("prompt variant must look like root(D) or root(Q): '" + std::string(label) + "'");
  return {std::string(label.substr(0, label.size() - 3)),
          kind == 'D' ? PromptExpression::declarative : PromptExpression::question};
}

void PromptCatalog::add(Task task, std::string root, PromptExpression expression,
                        PromptEntry entry) {
  if (root.empty()) throw Error("prompt root must be non-empty");
  if (entry.text.empty()) throw Error("prompt text must be non-empty for root '" + root + "'");
  Key key{task, std::move(root), expression};
  if (entries_.contains(key))
    throw Error("duplicate prompt for " + std::string(to_string(task)) + " " + std::get<1>(key));
  entries_.emplace(std::move(key), std::move(entry));
}

const PromptEntry* PromptCatalog::find(Task task, std::string_view root,
                                       PromptExpression expression) const {
  const auto it = entries_.find(Key{task, std::string(root), expression});
  return it == entries_.end() ? nullptr : &it->second;
}

const PromptEntry& PromptCatalog::at(Task task, std::string_view root,
                                     PromptExpression expression) const {
  if (const auto* e = find(task, root, expression)) return *e;
  throw Error("no " + std::string(to_string(expression)) + " prompt '" + std::string(root) +
              "' for task " + std::string(to_string(task)));
}

std::vector<std::string> PromptCatalog::roots(Task task) const {
  std::set<std::string> out;
  for (const auto& [key, entry] : entries_)
    if (std::get<0>(key) == task) out.insert(std::get<1>(key));
  return {out.begin(), out.end()};
}

std::vector<std::string> PromptCatalog::problems() const {
  std::vector<std::string> out;
  for (const Task task : {Task::IC, Task::DST, Task::NLG}) {
    for (const auto& root : roots(task)) {
      const std::string where = std::string(to_string(task)) + " prompt root '" + root + "'";
      const auto* declarative = find(task, root, PromptExpression::declarative);
      const auto* question = find(task, root, PromptExpression::question);
      if (!declarative) out.push_back(where + " has no declarative expression");
      if (!question) {
        out.push_back(where + " has no question expression");
        continue;
      }
      if (!starts_with(question->text, kQuestionPrefix))
        out.push_back(where + " question does not start with \"Question: \"");
      if (task == Task::DST) {
        if (!starts_with(question->text, "Question: What"))
          out.push_back(where + " question for open/categorical slots must start with \"Question: What\"");
        if (!starts_with(question->boolean_text, "Question: Whether"))
          out.push_back(where + " question for yes/no slots must start with \"Question: Whether\"");
      }
    }
  }
  return out;
}

PromptCatalog PromptCatalog::from_json_text(std::string_view text) {
  const auto doc = json::parse(text);
  PromptCatalog c;
  c.set_version(doc.value("version", ""));
  for (const auto& row : doc.at("prompts")) {
    c.add(parse_task(row.at("task").get<std::string>()), row.at("root").get<std::string>(),
          parse_expression(row.at("expression").get<std::string>()),
          {row.at("text").get<std::string>(), row.value("boolean_text", "")});
  }
  if (const auto issues = c.problems(); !issues.empty())
    throw Error("invalid prompt catalog: " + join(issues, "; "));
  return c;
}

PromptCatalog PromptCatalog::load(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  try {
    return from_json_text(doc.dump());
  } catch (const std::exception& e) {
    throw DataError(path.string(), e.what());
  }
}

std::string PromptCatalog::to_json_text() const {
  json rows = json::array();
  for (const auto& [key, entry] : entries_) {
    json row{{"task", to_string(std::get<0>(key))},
             {"root", std::get<1>(key)},
             {"expression", to_string(std::get<2>(key))},
             {"text", entry.text}};
    if (!entry.boolean_text.empty()) row["boolean_text"] = entry.boolean_text;
    rows.push_back(std::move(row));
  }
  return json{{"version", version_}, {"prompts", rows}}.dump(2) + "\n";
}

std::vector<PromptVariant> variant_matrix(Task task, const PromptCatalog& catalog) {
  std::vector<PromptVariant> out;
  for (const auto& root : catalog.roots(task))
    for (const auto expression : {PromptExpression::declarative, PromptExpression::question})
      out.push_back({root, expression});
  return out;
}

// ---------------------------------------------------------------------------
// Templates

const TaskSkeletons& TemplateSet::skeletons(Task task) const {
  const auto it = tasks_.find(task);
  if (it == tasks_.end())
    throw Error("template set '" + version_ + "' has no entry for task " +
                std::string(to_string(task)));
  return it->second;
}

InstructionTemplate TemplateSet::make(Task task, Mode mode, const PromptVariant& variant,
                                      std::optional<NlgRepr> repr) const {
  InstructionTemplate t;
  t.task = task;
  t.mode = mode;
  if (task == Task::NLG) t.nlg_repr = repr.value_or(NlgRepr::naive);
  t.id = version_ + "/" + std::string(to_string(task)) + "/" + std::string(to_string(mode));
  if (t.nlg_repr) t.id += "/" + std::string(to_string(*t.nlg_repr));
  if (mode == Mode::STD) return t;

  t.prompt_root = variant.root;
  t.prompt_expression = variant.expression;
  t.id += "/" + variant.label();
  if (mode == Mode::PE) return t;

  const auto& s = skeletons(task);
  t.definition = task == Task::NLG && t.nlg_repr == NlgRepr::t2g2 ? s.definition_t2g2 : s.definition;
  t.constraint = s.constraint;
  t.candidate_clause = s.candidate_clause;
  return t;
}

TemplateSet TemplateSet::from_json_text(std::string_view text) {
  const auto doc = json::parse(text);
  std::map<Task, TaskSkeletons> tasks;
  for (const auto& [name, body] : doc.at("tasks").items()) {
    tasks[parse_task(name)] = {
        .definition = body.value("definition", ""),
        .definition_t2g2 = body.value("definition_t2g2", ""),
        .constraint = body.value("constraint", ""),
        .candidate_clause = body.value("candidate_clause", ""),
    };
  }
  return TemplateSet(doc.value("version", ""), std::move(tasks));
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  try {
    return from_json_text(doc.dump());
  } catch (const std::exception& e) {
    throw DataError(path.string(), e.what());
  }
}

std::string TemplateSet::to_json_text() const {
  json tasks = json::object();
  for (const auto& [task, s] : tasks_) {
    json body{{"definition", s.definition}, {"constraint", s.constraint}};
    if (!s.definition_t2g2.empty()) body["definition_t2g2"] = s.definition_t2g2;
    if (!s.candidate_clause.empty()) body["candidate_clause"] = s.candidate_clause;
    tasks[std::string(to_string(task))] = std::move(body);
  }
  return json{{"version", version_}, {"tasks", tasks}}.dump(2) + "\n";
}

void validate_template(const InstructionTemplate& t) {
  const std::string where = "template '" + t.id + "': ";
  switch (t.mode) {
    case Mode::STD:
      if (!t.definition.empty() || !t.constraint.empty() || !t.prompt_root.empty())
        throw Error(where + "STD templates carry no definition, constraint or prompt");
      break;
    case Mode::PE:
      if (!t.definition.empty() || !t.constraint.empty())
        throw Error(where + "PE templates carry no definition or constraint");
      if (t.prompt_root.empty()) throw Error(where + "PE templates need a prompt");
      break;
    case Mode::CINS:
      if (t.definition.empty() || t.constraint.empty() || t.prompt_root.empty())
        throw Error(where + "CINS templates need a definition, a constraint and a prompt");
      break;
  }
}

std::string fill_placeholders(std::string_view skeleton,
                              const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(skeleton.size());
  std::size_t i = 0;
  while (i < skeleton.size()) {
    if (skeleton[i] == '{') {
      std::size_t j = i + 1;
      while (j < skeleton.size() && is_placeholder_char(skeleton[j])) ++j;
      if (j > i + 1 && j < skeleton.size() && skeleton[j] == '}') {
        const std::string name(skeleton.substr(i + 1, j - i - 1));
        const auto it = values.find(name);
        if (it == values.end()) throw Error("unknown placeholder {" + name + "}");
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out.push_back(skeleton[i++]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assembly

std::string assemble(std::string_view input_text, const InstructionText& ins,
                     const AblationMask& mask) {
  if (input_text.empty()) throw Error("input text is empty");
  switch (ins.mode) {
    case Mode::STD:
      if (!ins.definition.empty() || !ins.constraint.empty() || !ins.prompt.empty())
        throw Error("STD input carries no instruction components");
      return std::string(input_text);
    case Mode::PE:
      if (!ins.definition.empty() || !ins.constraint.empty())
        throw Error("PE input carries no definition or constraint");
      if (ins.prompt.empty()) throw Error("PE input needs a prompt");
      break;
    case Mode::CINS:
      if (ins.definition.empty() || ins.constraint.empty() || ins.prompt.empty())
        throw Error("CINS input needs a definition, a constraint and a prompt");
      break;
  }

  std::string out;
  auto segment = [&out](std::string_view id, std::string_view body) {
    if (body.empty()) return;
    if (!out.empty()) out += kSep;
    out += id;
    out += ' ';
    out += body;
  };
  segment(kInputId, input_text);
  if (!mask.drop_definition) segment(kDefinitionId, ins.definition);
  if (!mask.drop_constraint) segment(kConstraintId, ins.constraint);
  if (!mask.drop_prompt) segment(kPromptId, ins.prompt);
  return out;
}

// ---------------------------------------------------------------------------
// Intent classification

CompiledExample compile_ic(const IntentExample& ex, const DomainSpec& domain,
                           const InstructionTemplate& tmpl, const PromptCatalog& catalog,
                           const AblationMask& mask) {
  if (tmpl.task != Task::IC) throw Error("compile_ic needs an IC template");
  validate_template(tmpl);
  if (ex.utterance.empty()) throw DataError(ex.id, "utterance is empty");
  if (domain.intents.empty()) throw Error("domain '" + domain.name + "' has no intents");
  const auto* gold = domain.find_intent(ex.intent);
  if (!gold)
    throw DataError(ex.id, "intent '" + ex.intent + "' is not in domain '" + domain.name + "'");

  std::vector<std::string> listed;
  for (const auto& intent : domain.intents) {
    if (mask.drop_descriptions) {
      listed.push_back(intent.name);
      continue;
    }
    if (intent.description.empty())
      throw Error("intent '" + intent.name + "' has no description");
    listed.push_back(intent.name + ": " + intent.description);
  }
  const std::map<std::string, std::string> values{
      {"intents", join(listed, ", ")},
      {"domain", domain.name},
  };

  CompiledExample out;
  out.id = ex.id;
  out.task = Task::IC;
  out.input_text = assemble(ex.utterance, render(tmpl, catalog, tmpl.definition, values, false), mask);
  out.target_text = gold->name;
  out.meta = base_meta(tmpl, mask);
  out.meta["domain"] = domain.name;
  out.meta["gold_normalized"] = normalize_label(gold->name);
  out.meta["source_id"] = ex.id;
  return out;
}

CompiledExample compile_ic(const IntentExample& ex, const Ontology& ontology,
                           const InstructionTemplate& tmpl, const PromptCatalog& catalog,
                           const AblationMask& mask) {
  const auto* domain = ontology.find_domain(ex.domain);
  if (!domain) throw DataError(ex.id, "unknown domain '" + ex.domain + "'");
  return compile_ic(ex, *domain, tmpl, catalog, mask);
}

// ---------------------------------------------------------------------------
// Dialog state tracking

std::string flatten_history(const DialogHistory& history) {
  std::string out;
  for (const auto& turn : history.turns) {
    if (!out.empty()) out += ' ';
    out += to_string(turn.speaker);
    out += ": ";
    out += turn.utterance;
  }
  return out;
}

std::vector<CompiledExample> compile_dst(const DstTurn& turn, const std::vector<SlotSpec>& slots,
                                         const InstructionTemplate& tmpl,
                                         const PromptCatalog& catalog, const AblationMask& mask) {
  if (tmpl.task != Task::DST) throw Error("compile_dst needs a DST template");
  validate_template(tmpl);
  if (slots.empty()) throw Error("compile_dst needs at least one slot");
  try {
    turn.history.validate();
  } catch (const DataError& e) {
    throw DataError(turn.dialog_id, e.what());
  }

  const std::string input = flatten_history(turn.history);
  std::vector<CompiledExample> out;
  out.reserve(slots.size());
  for (const auto& slot : slots) {
    const std::string naive = slot.qualified_name();
    std::map<std::string, std::string> values{
        {"slot", naive},
        {"slot_description",
         mask.drop_descriptions || slot.description.empty() ? naive : slot.description},
        {"candidates", join(slot.candidate_values, ", ")},
        {"candidate_clause", ""},
        {"domain", slot.domain},
    };
    if (slot.kind == SlotKind::categorical)
      values["candidate_clause"] = fill_placeholders(tmpl.candidate_clause, values);

    CompiledExample ex;
    ex.id = turn.dialog_id + "/t" + std::to_string(turn.history.turn_index) + "/" + slot.domain +
            "/" + slot.name;
    ex.task = Task::DST;
    ex.input_text = assemble(
        input, render(tmpl, catalog, tmpl.definition, values, slot.kind == SlotKind::boolean), mask);
    ex.target_text = std::string(turn.gold.value({slot.domain, slot.name}));
    ex.meta = base_meta(tmpl, mask);
    ex.meta["dialog_id"] = turn.dialog_id;
    ex.meta["turn"] = std::to_string(turn.history.turn_index);
    ex.meta["domain"] = slot.domain;
    ex.meta["slot"] = slot.name;
    ex.meta["slot_kind"] = std::string(to_string(slot.kind));
    out.push_back(std::move(ex));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Natural language generation

CompiledExample compile_nlg(const NlgItem& item, NlgRepr repr, const TemplateTable* table,
                            const InstructionTemplate& tmpl, const PromptCatalog& catalog,
                            const AblationMask& mask) {
  if (tmpl.task != Task::NLG) throw Error("compile_nlg needs an NLG template");
  validate_template(tmpl);
  if (tmpl.nlg_repr && *tmpl.nlg_repr != repr)
    throw Error("template '" + tmpl.id + "' was built for the " +
                std::string(to_string(*tmpl.nlg_repr)) + " representation");

  std::string input;
  try {
    if (repr == NlgRepr::t2g2) {
      if (!table) throw Error("the t2g2 representation needs a template table");
      input = render_t2g2(item.frames, *table);
    } else {
      input = render_naive(item.frames);
    }
  } catch (const Error& e) {
    throw DataError(item.id, e.what());
  }

  const std::map<std::string, std::string> values{{"domain", item.domain}};
  CompiledExample out;
  out.id = item.id;
  out.task = Task::NLG;
  out.input_text = assemble(input, render(tmpl, catalog, tmpl.definition, values, false), mask);
  out.target_text = item.reference;
  out.meta = base_meta(tmpl, mask);
  out.meta["acts"] = render_naive(item.frames);
  out.meta["dialog_id"] = item.dialog_id;
  out.meta["domain"] = item.domain;
  out.meta["repr"] = std::string(to_string(repr));
  return out;
}

}  // namespace cins
