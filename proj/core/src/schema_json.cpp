#include "cins/schema_json.hpp"

#include <fstream>
#include <sstream>

namespace cins {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

}  // namespace

void to_json(json& j, const IntentSpec& v) {
  j = json{{"name", v.name}, {"description", v.description}};
}
void from_json(const json& j, IntentSpec& v) {
  v.name = j.at("name").get<std::string>();
  v.description = get_or<std::string>(j, "description", "");
}

void to_json(json& j, const SlotSpec& v) {
  j = json{{"domain", v.domain},
           {"name", v.name},
           {"description", v.description},
           {"kind", to_string(v.kind)},
           {"candidate_values", v.candidate_values}};
}
void from_json(const json& j, SlotSpec& v) {
  v.domain = get_or<std::string>(j, "domain", "");
  v.name = j.at("name").get<std::string>();
  v.description = get_or<std::string>(j, "description", "");
  v.kind = parse_slot_kind(get_or<std::string>(j, "kind", "open"));
  v.candidate_values = get_or<std::vector<std::string>>(j, "candidate_values", {});
}

void to_json(json& j, const DomainSpec& v) {
  j = json{{"name", v.name}, {"intents", v.intents}, {"slots", v.slots}};
}
void from_json(const json& j, DomainSpec& v) {
  v.name = j.at("name").get<std::string>();
  v.intents = get_or<std::vector<IntentSpec>>(j, "intents", {});
  v.slots = get_or<std::vector<SlotSpec>>(j, "slots", {});
  // Slots may omit their domain inside a domain block.
  for (auto& s : v.slots)
    if (s.domain.empty()) s.domain = v.name;
}

void to_json(json& j, const Ontology& v) {
  j = json{{"name", v.name}, {"version", v.version}, {"domains", v.domains}};
}
void from_json(const json& j, Ontology& v) {
  v.name = get_or<std::string>(j, "name", "");
  v.version = get_or<std::string>(j, "version", "");
  v.domains = j.at("domains").get<std::vector<DomainSpec>>();
}

void to_json(json& j, const Turn& v) {
  j = json{{"speaker", to_string(v.speaker)}, {"utterance", v.utterance}};
}
void from_json(const json& j, Turn& v) {
  v.speaker = parse_speaker(j.at("speaker").get<std::string>());
  v.utterance = j.at("utterance").get<std::string>();
}

void to_json(json& j, const DialogHistory& v) {
  j = json{{"turns", v.turns}, {"turn_index", v.turn_index}};
}
void from_json(const json& j, DialogHistory& v) {
  v.turns = j.at("turns").get<std::vector<Turn>>();
  v.turn_index = j.at("turn_index").get<int>();
}

// Serialized as a list so key order is explicit and keys may hold any text.
void to_json(json& j, const DialogState& v) {
  j = json::array();
  for (const auto& [key, value] : v.entries)
    j.push_back(json{{"domain", key.domain}, {"slot", key.slot}, {"value", value}});
}
void from_json(const json& j, DialogState& v) {
  v.entries.clear();
  for (const auto& e : j) {
    SlotKey key{e.at("domain").get<std::string>(), e.at("slot").get<std::string>()};
    v.entries[std::move(key)] = e.at("value").get<std::string>();
  }
}

void to_json(json& j, const SlotValue& v) {
  j = json{{"slot", v.slot}, {"value", v.value ? json(*v.value) : json(nullptr)}};
}
void from_json(const json& j, SlotValue& v) {
  v.slot = j.at("slot").get<std::string>();
  const auto& value = j.at("value");
  v.value = value.is_null() ? std::nullopt : std::optional<std::string>(value.get<std::string>());
}

void to_json(json& j, const DialogActFrame& v) {
  j = json{{"act", v.act}, {"slot_values", v.slot_values}};
}
void from_json(const json& j, DialogActFrame& v) {
  v.act = j.at("act").get<std::string>();
  v.slot_values = get_or<std::vector<SlotValue>>(j, "slot_values", {});
}

void to_json(json& j, const AblationMask& v) {
  j = json{{"drop_definition", v.drop_definition},
           {"drop_constraint", v.drop_constraint},
           {"drop_prompt", v.drop_prompt},
           {"drop_descriptions", v.drop_descriptions}};
}
void from_json(const json& j, AblationMask& v) {
  if (j.is_string()) {
    v = AblationMask::from_label(j.get<std::string>());
    return;
  }
  v.drop_definition = get_or(j, "drop_definition", false);
  v.drop_constraint = get_or(j, "drop_constraint", false);
  v.drop_prompt = get_or(j, "drop_prompt", false);
  v.drop_descriptions = get_or(j, "drop_descriptions", false);
}

void to_json(json& j, const InstructionTemplate& v) {
  j = json{{"id", v.id},
           {"task", to_string(v.task)},
           {"mode", to_string(v.mode)},
           {"definition", v.definition},
           {"constraint", v.constraint},
           {"candidate_clause", v.candidate_clause},
           {"prompt_root", v.prompt_root},
           {"prompt_expression", to_string(v.prompt_expression)},
           {"nlg_repr", v.nlg_repr ? json(to_string(*v.nlg_repr)) : json(nullptr)}};
}
void from_json(const json& j, InstructionTemplate& v) {
  v.id = get_or<std::string>(j, "id", "");
  v.task = parse_task(j.at("task").get<std::string>());
  v.mode = parse_mode(j.at("mode").get<std::string>());
  v.definition = get_or<std::string>(j, "definition", "");
  v.constraint = get_or<std::string>(j, "constraint", "");
  v.candidate_clause = get_or<std::string>(j, "candidate_clause", "");
  v.prompt_root = get_or<std::string>(j, "prompt_root", "");
  v.prompt_expression = parse_expression(get_or<std::string>(j, "prompt_expression", "question"));
  const auto repr = get_or<std::string>(j, "nlg_repr", "");
  v.nlg_repr = repr.empty() ? std::nullopt : std::optional<NlgRepr>(parse_nlg_repr(repr));
}

void to_json(json& j, const CompiledExample& v) {
  j = json{{"id", v.id},
           {"task", to_string(v.task)},
           {"input_text", v.input_text},
           {"target_text", v.target_text},
           {"meta", v.meta}};
}
void from_json(const json& j, CompiledExample& v) {
  v.id = j.at("id").get<std::string>();
  v.task = parse_task(j.at("task").get<std::string>());
  v.input_text = j.at("input_text").get<std::string>();
  v.target_text = j.at("target_text").get<std::string>();
  v.meta = get_or<std::map<std::string, std::string>>(j, "meta", {});
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

Ontology load_ontology(const std::filesystem::path& path) {
  Ontology ontology;
  try {
    ontology = read_json_file(path).get<Ontology>();
  } catch (const json::exception& e) {
    throw DataError(path.string(), std::string("malformed ontology: ") + e.what());
  }
  const auto violations = validate_ontology(ontology);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << violations.size() << " ontology violation(s):";
    for (const auto& v : violations) msg << "\n  " << v.entity << ": " << v.rule;
    throw DataError(path.string(), msg.str());
  }
  return ontology;
}

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

}  // namespace cins
