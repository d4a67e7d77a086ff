#include "cins/ingest.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "cins/schema_json.hpp"

namespace cins {

using nlohmann::json;

namespace {

struct Row {
  std::string location;
  json value;
};

// Lines of a JSONL file, blank lines skipped. Locations are "path:line".
std::vector<Row> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), "cannot open file");
  std::vector<Row> rows;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string location = path.string() + ":" + std::to_string(number);
    try {
      rows.push_back({location, json::parse(line)});
    } catch (const json::parse_error& e) {
      throw DataError(location, std::string("invalid JSON: ") + e.what());
    }
  }
  return rows;
}

bool is_jsonl(const std::filesystem::path& path) { return path.extension() == ".jsonl"; }

std::string text_field(const Row& row, const char* key) {
  const auto it = row.value.find(key);
  if (it == row.value.end() || !it->is_string())
    throw DataError(row.location, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

// Canonical ontology names of the requested domains, in ontology order.
std::vector<std::string> resolve_domains(const Ontology& ontology,
                                         const std::vector<std::string>& filter) {
  std::set<std::string> wanted;
  for (const auto& name : filter) {
    const auto* d = ontology.find_domain(name);
    if (!d) throw Error("domain filter names unknown domain '" + name + "'");
    wanted.insert(d->name);
  }
  std::vector<std::string> out;
  for (const auto& d : ontology.domains)
    if (wanted.contains(d.name)) out.push_back(d.name);
  return out;
}

bool contains(const std::vector<std::string>& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string canonical_split(std::string_view name) {
  if (name == "train") return "train";
  if (name == "val" || name == "validation" || name == "dev") return "validation";
  if (name == "test") return "test";
  return {};
}

// ---------------------------------------------------------------------------
// Intent rows

struct IntentRow {
  std::string location;
  std::string split;
  std::string text;
  std::string label;
  std::string domain;  // optional in source
  std::size_t ordinal = 0;
};

std::vector<IntentRow> read_intent_rows(const std::filesystem::path& path) {
  std::vector<IntentRow> rows;
  std::map<std::string, std::size_t> ordinals;
  if (is_jsonl(path)) {
    for (const auto& row : read_jsonl(path)) {
      IntentRow r;
      r.location = row.location;
      r.split = canonical_split(text_field(row, "split"));
      if (r.split.empty()) throw DataError(row.location, "unknown split name");
      r.text = text_field(row, "text");
      r.label = text_field(row, "intent");
      if (row.value.contains("domain")) r.domain = text_field(row, "domain");
      r.ordinal = ordinals[r.split]++;
      rows.push_back(std::move(r));
    }
    return rows;
  }

  const auto doc = read_json_file(path);
  if (!doc.is_object()) throw DataError(path.string(), "expected an object of splits");
  for (const auto& [key, entries] : doc.items()) {
    const auto split = canonical_split(key);
    if (split.empty()) continue;  // e.g. oos_train, oos_val
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      const std::string location = path.string() + ":" + key + "[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw DataError(location, "expected [utterance, intent]");
      rows.push_back({location, split, e[0].get<std::string>(), e[1].get<std::string>(), "",
                      ordinals[split]++});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// DST

void add_state_entry(DialogState& state, const std::string& domain, const std::string& slot,
                     const std::string& value, const Ontology& ontology,
                     const std::vector<std::string>& domains, const std::string& location,
                     LoadStats& stats) {
  const auto* d = ontology.find_domain(domain);
  if (!d) throw DataError(location, "state references unknown domain '" + domain + "'");
  if (!contains(domains, d->name)) {
    ++stats.state_entries_dropped;
    return;
  }
  const auto* s = d->find_slot(slot);
  if (!s) throw DataError(location, "state references unknown slot '" + domain + "-" + slot + "'");
  const auto normalized = normalize_label(value);
  if (normalized.empty() || normalized == kNoneValue) return;
  if (s->kind == SlotKind::categorical && normalized != "dontcare") {
    bool known = false;
    for (const auto& candidate : s->candidate_values) known |= normalize_label(candidate) == normalized;
    if (!known)
      throw DataError(location, "value '" + value + "' is not a candidate of " + s->qualified_name());
  }
  state.entries[{d->name, s->name}] = value;
}

std::vector<DstDialog> read_native_dialogs(const json& dialogs, const std::string& path,
                                           const Ontology& ontology,
                                           const std::vector<std::string>& domains,
                                           LoadStats& stats) {
  std::vector<DstDialog> out;
  for (std::size_t i = 0; i < dialogs.size(); ++i) {
    const auto& d = dialogs[i];
    const std::string location = path + ":dialogs[" + std::to_string(i) + "]";
    DstDialog dialog;
    try {
      dialog.id = d.at("id").get<std::string>();
      for (const auto& t : d.at("turns")) {
        dialog.turns.push_back(t.get<Turn>());
        if (dialog.turns.back().speaker != Speaker::user) continue;
        DialogState state;
        if (const auto it = t.find("state"); it != t.end())
          for (const auto& e : *it)
            add_state_entry(state, e.at("domain").get<std::string>(), e.at("slot").get<std::string>(),
                            e.at("value").get<std::string>(), ontology, domains,
                            location + " (" + dialog.id + ")", stats);
        dialog.states.push_back(std::move(state));
      }
    } catch (const json::exception& e) {
      throw DataError(location, std::string("malformed dialog: ") + e.what());
    } catch (const Error& e) {
      if (dynamic_cast<const DataError*>(&e)) throw;
      throw DataError(location, e.what());
    }
    out.push_back(std::move(dialog));
  }
  return out;
}

std::vector<DstDialog> read_trade_dialogs(const json& dialogs, const std::string& path,
                                          const Ontology& ontology,
                                          const std::vector<std::string>& domains,
                                          LoadStats& stats) {
  std::vector<DstDialog> out;
  for (std::size_t i = 0; i < dialogs.size(); ++i) {
    const auto& d = dialogs[i];
    const std::string location = path + "[" + std::to_string(i) + "]";
    DstDialog dialog;
    try {
      dialog.id = d.at("dialogue_idx").get<std::string>();
      const auto& turns = d.at("dialogue");
      for (std::size_t t = 0; t < turns.size(); ++t) {
        const auto system = turns[t].value("system_transcript", "");
        if (t > 0) dialog.turns.push_back({Speaker::system, system});
        dialog.turns.push_back({Speaker::user, turns[t].at("transcript").get<std::string>()});
        DialogState state;
        for (const auto& group : turns[t].value("belief_state", json::array())) {
          for (const auto& pair : group.at("slots")) {
            const auto key = pair.at(0).get<std::string>();
            const auto dash = key.find('-');
            if (dash == std::string::npos)
              throw DataError(location, "slot key '" + key + "' is not domain-slot");
            add_state_entry(state, key.substr(0, dash), key.substr(dash + 1),
                            pair.at(1).get<std::string>(), ontology, domains,
                            location + " (" + dialog.id + ")", stats);
          }
        }
        dialog.states.push_back(std::move(state));
      }
    } catch (const json::exception& e) {
      throw DataError(location, std::string("malformed dialog: ") + e.what());
    }
    out.push_back(std::move(dialog));
  }
  return out;
}

void check_alternation(const DstDialog& dialog, const std::string& path) {
  DialogHistory history{dialog.turns, static_cast<int>(dialog.states.size())};
  // A complete dialog may end with a system turn; C_t prefixes always end
  // with the user.
  if (!history.turns.empty() && history.turns.back().speaker == Speaker::system)
    history.turns.pop_back();
  try {
    history.validate();
  } catch (const DataError& e) {
    throw DataError(path + " (" + dialog.id + ")", e.what());
  }
}

}  // namespace

const std::vector<IntentExample>& IntentDataset::split(const std::string& name) const {
  static const std::vector<IntentExample> kEmpty;
  const auto it = splits.find(name);
  return it == splits.end() ? kEmpty : it->second;
}

IntentDataset load_intent_dataset(const std::filesystem::path& path, const Ontology& ontology,
                                  const std::vector<std::string>& domain_filter) {
  IntentDataset out;
  out.domains = resolve_domains(ontology, domain_filter);
  for (const auto& name : {"train", "validation", "test"}) out.splits[name];

  for (const auto& row : read_intent_rows(path)) {
    ++out.stats.rows;
    if (normalize_label(row.label) == kOutOfScopeIntent) {
      ++out.stats.dropped_out_of_scope;
      continue;
    }
    if (row.text.empty()) throw DataError(row.location, "empty utterance");

    const DomainSpec* domain = nullptr;
    if (!row.domain.empty()) {
      domain = ontology.find_domain(row.domain);
      if (!domain) throw DataError(row.location, "unknown domain '" + row.domain + "'");
      if (!domain->find_intent(row.label))
        throw DataError(row.location, "unknown intent label '" + row.label + "'");
    } else {
      for (const auto& d : ontology.domains) {
        if (!d.find_intent(row.label)) continue;
        if (domain)
          throw DataError(row.location, "intent label '" + row.label + "' is ambiguous across domains");
        domain = &d;
      }
      if (!domain) throw DataError(row.location, "unknown intent label '" + row.label + "'");
    }
    if (!contains(out.domains, domain->name)) {
      ++out.stats.dropped_by_domain;
      continue;
    }
    out.splits[row.split].push_back({row.split + "-" + std::to_string(row.ordinal), row.text,
                                     domain->find_intent(row.label)->name, domain->name});
    ++out.stats.kept;
  }
  return out;
}

DstDataset load_dst_dataset(const std::filesystem::path& path, const Ontology& ontology,
                            const std::vector<std::string>& domain_filter) {
  DstDataset out;
  out.domains = resolve_domains(ontology, domain_filter);
  const auto doc = read_json_file(path);
  std::vector<DstDialog> dialogs;
  if (doc.is_array() && !doc.empty() && doc.front().contains("dialogue_idx")) {
    dialogs = read_trade_dialogs(doc, path.string(), ontology, out.domains, out.stats);
  } else {
    const auto& list = doc.is_object() ? doc.at("dialogs") : doc;
    dialogs = read_native_dialogs(list, path.string(), ontology, out.domains, out.stats);
  }

  std::set<std::string> ids;
  for (auto& dialog : dialogs) {
    ++out.stats.rows;
    check_alternation(dialog, path.string());
    if (!ids.insert(dialog.id).second)
      throw DataError(path.string() + " (" + dialog.id + ")", "duplicate dialog id");
    out.dialogs.push_back(std::move(dialog));
    ++out.stats.kept;
  }
  return out;
}

std::vector<DstTurn> dst_turns(const DstDialog& dialog) {
  std::vector<DstTurn> out;
  DialogHistory prefix;
  prefix.turn_index = 0;
  std::size_t user_turn = 0;
  for (const auto& turn : dialog.turns) {
    prefix.turns.push_back(turn);
    if (turn.speaker != Speaker::user) continue;
    prefix.turn_index = static_cast<int>(++user_turn);
    out.push_back({dialog.id, prefix, dialog.states.at(user_turn - 1)});
  }
  return out;
}

std::vector<DstTurn> dst_turns(const DstDataset& dataset) {
  std::vector<DstTurn> out;
  for (const auto& dialog : dataset.dialogs) {
    auto turns = dst_turns(dialog);
    out.insert(out.end(), std::make_move_iterator(turns.begin()),
               std::make_move_iterator(turns.end()));
  }
  return out;
}

std::vector<SlotSpec> in_scope_slots(const Ontology& ontology,
                                     const std::vector<std::string>& domains) {
  std::vector<SlotSpec> out;
  for (const auto& name : resolve_domains(ontology, domains)) {
    const auto& d = ontology.domain(name);
    out.insert(out.end(), d.slots.begin(), d.slots.end());
  }
  return out;
}

NlgDataset load_nlg_dataset(const std::filesystem::path& path, const TemplateTable* table) {
  std::vector<Row> rows;
  if (is_jsonl(path)) {
    rows = read_jsonl(path);
  } else {
    const auto doc = read_json_file(path);
    const auto& list = doc.is_object() ? doc.at("items") : doc;
    for (std::size_t i = 0; i < list.size(); ++i)
      rows.push_back({path.string() + "[" + std::to_string(i) + "]", list[i]});
  }

  NlgDataset out;
  std::set<std::string> ids;
  for (const auto& row : rows) {
    ++out.stats.rows;
    NlgItem item;
    item.id = text_field(row, "id");
    const std::string location = row.location + " (" + item.id + ")";
    item.dialog_id = text_field(row, "dialog_id");
    item.domain = text_field(row, "domain");
    item.reference = text_field(row, "reference");
    if (item.reference.empty()) throw DataError(location, "empty reference");
    if (!ids.insert(item.id).second) throw DataError(location, "duplicate item id");
    try {
      item.frames = parse_acts(text_field(row, "acts"));
    } catch (const ParseError& e) {
      throw DataError(location, std::string("cannot parse dialog acts: ") + e.what());
    }
    if (table) {
      const auto missing = check_coverage({item.frames}, *table);
      if (!missing.empty()) {
        std::string names;
        for (const auto& key : missing) names += (names.empty() ? "" : ", ") + key.to_string();
        throw DataError(location, "no T2G2 template for " + names);
      }
    }
    out.items.push_back(std::move(item));
    ++out.stats.kept;
  }
  return out;
}

}  // namespace cins
