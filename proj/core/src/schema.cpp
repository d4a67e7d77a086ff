#include "cins/schema.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace cins {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void bad_enum(std::string_view kind, std::string_view value) {
  throw Error("unknown " + std::string(kind) + " '" + std::string(value) + "'");
}

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

std::string_view to_string(Task t) {
  switch (t) {
    case Task::IC: return "IC";
    case Task::DST: return "DST";
    case Task::NLG: return "NLG";
  }
  return "?";
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::STD: return "STD";
    case Mode::PE: return "PE";
    case Mode::CINS: return "CINS";
  }
  return "?";
}

std::string_view to_string(PromptExpression e) {
  return e == PromptExpression::declarative ? "declarative" : "question";
}

std::string_view to_string(NlgRepr r) { return r == NlgRepr::naive ? "naive" : "t2g2"; }

std::string_view to_string(SlotKind k) {
  switch (k) {
    case SlotKind::categorical: return "categorical";
    case SlotKind::open: return "open";
    case SlotKind::boolean: return "boolean";
  }
  return "?";
}

std::string_view to_string(Speaker s) { return s == Speaker::user ? "user" : "system"; }

Task parse_task(std::string_view s) {
  const auto l = lower(s);
  if (l == "ic") return Task::IC;
  if (l == "dst") return Task::DST;
  if (l == "nlg") return Task::NLG;
  bad_enum("task", s);
}

Mode parse_mode(std::string_view s) {
  const auto l = lower(s);
  if (l == "std") return Mode::STD;
  if (l == "pe") return Mode::PE;
  if (l == "cins") return Mode::CINS;
  bad_enum("mode", s);
}

PromptExpression parse_expression(std::string_view s) {
  const auto l = lower(s);
  if (l == "declarative" || l == "d") return PromptExpression::declarative;
  if (l == "question" || l == "q") return PromptExpression::question;
  bad_enum("prompt expression", s);
}

NlgRepr parse_nlg_repr(std::string_view s) {
  const auto l = lower(s);
  if (l == "naive") return NlgRepr::naive;
  if (l == "t2g2") return NlgRepr::t2g2;
  bad_enum("NLG representation", s);
}

SlotKind parse_slot_kind(std::string_view s) {
  if (s == "categorical") return SlotKind::categorical;
  if (s == "open") return SlotKind::open;
  if (s == "boolean") return SlotKind::boolean;
  bad_enum("slot kind", s);
}

Speaker parse_speaker(std::string_view s) {
  if (s == "user") return Speaker::user;
  if (s == "system") return Speaker::system;
  bad_enum("speaker", s);
}

std::string normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || c == '_') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string SlotSpec::qualified_name() const { return domain + " " + name; }

const IntentSpec* DomainSpec::find_intent(std::string_view n) const {
  const auto key = normalize_label(n);
  for (const auto& intent : intents)
    if (normalize_label(intent.name) == key) return &intent;
  return nullptr;
}

const SlotSpec* DomainSpec::find_slot(std::string_view n) const {
  const auto key = normalize_label(n);
  for (const auto& slot : slots)
    if (normalize_label(slot.name) == key) return &slot;
  return nullptr;
}

const DomainSpec* Ontology::find_domain(std::string_view n) const {
  const auto key = normalize_label(n);
  for (const auto& d : domains)
    if (normalize_label(d.name) == key) return &d;
  return nullptr;
}

const DomainSpec& Ontology::domain(std::string_view n) const {
  if (const auto* d = find_domain(n)) return *d;
  throw Error("unknown domain " + quoted(n) + " in ontology " + quoted(name));
}

std::vector<Violation> validate_ontology(const Ontology& ontology) {
  std::vector<Violation> out;
  auto report = [&](std::string entity, std::string rule) {
    out.push_back({std::move(entity), std::move(rule)});
  };

  // Duplicates are reported once per normalized name, listing every position.
  auto check_unique = [&](const std::vector<std::string>& names, const std::string& scope,
                          const std::string& what) {
    std::map<std::string, std::vector<std::size_t>> seen;
    for (std::size_t i = 0; i < names.size(); ++i) seen[normalize_label(names[i])].push_back(i);
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto& positions = seen[normalize_label(names[i])];
      if (positions.size() < 2 || positions.front() != i) continue;
      std::ostringstream entries;
      for (std::size_t p = 0; p < positions.size(); ++p)
        entries << (p ? ", " : "") << "#" << positions[p];
      report(scope + what + " " + quoted(names[i]),
             "duplicate " + what + " name (entries " + entries.str() + ")");
    }
  };

  std::vector<std::string> domain_names;
  for (const auto& d : ontology.domains) domain_names.push_back(d.name);
  check_unique(domain_names, "", "domain");

  for (const auto& d : ontology.domains) {
    const std::string scope = "domain " + quoted(d.name) + " ";
    if (d.name.empty()) report("domain #" + std::to_string(&d - ontology.domains.data()),
                               "domain name is empty");

    std::vector<std::string> intent_names;
    for (const auto& intent : d.intents) {
      intent_names.push_back(intent.name);
      if (intent.name.empty()) report(scope + "intent ''", "intent name is empty");
      if (intent.description.empty())
        report(scope + "intent " + quoted(intent.name), "intent description is empty");
    }
    check_unique(intent_names, scope, "intent");

    std::vector<std::string> slot_names;
    for (const auto& slot : d.slots) {
      slot_names.push_back(slot.name);
      const std::string entity = scope + "slot " + quoted(slot.name);
      if (slot.name.empty()) report(entity, "slot name is empty");
      if (slot.domain != d.name)
        report(entity, "slot domain " + quoted(slot.domain) + " differs from enclosing domain");
      if (slot.kind == SlotKind::categorical) {
        if (slot.candidate_values.empty())
          report(entity, "categorical slot has no candidate values");
        std::set<std::string> unique(slot.candidate_values.begin(), slot.candidate_values.end());
        if (unique.size() != slot.candidate_values.size())
          report(entity, "categorical slot has duplicate candidate values");
      } else if (!slot.candidate_values.empty()) {
        report(entity, std::string(to_string(slot.kind)) + " slot must not list candidate values");
      }
    }
    check_unique(slot_names, scope, "slot");
  }
  return out;
}

void DialogHistory::validate() const {
  if (turns.empty()) throw DataError("", "dialog history is empty");
  int user_turns = 0;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const Speaker expected = i % 2 == 0 ? Speaker::user : Speaker::system;
    if (turns[i].speaker != expected)
      throw DataError("turn " + std::to_string(i),
                      "expected " + std::string(to_string(expected)) + " turn, speakers must alternate "
                      "starting with the user");
    if (expected == Speaker::user) ++user_turns;
  }
  if (turns.back().speaker != Speaker::user)
    throw DataError("turn " + std::to_string(turns.size() - 1), "history must end with a user turn");
  if (turn_index != user_turns)
    throw DataError("", "turn_index " + std::to_string(turn_index) + " does not match " +
                            std::to_string(user_turns) + " user turns");
}

std::string_view DialogState::value(const SlotKey& key) const {
  const auto it = entries.find(key);
  return it == entries.end() ? kNoneValue : std::string_view(it->second);
}

std::string AblationMask::label() const {
  if (!any()) return "full";
  std::string out;
  auto add = [&](bool on, std::string_view name) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(drop_definition, "no_definition");
  add(drop_constraint, "no_constraint");
  add(drop_prompt, "no_prompt");
  add(drop_descriptions, "no_descriptions");
  return out;
}

AblationMask AblationMask::from_label(std::string_view label) {
  AblationMask mask;
  if (label == "full" || label.empty()) return mask;
  std::size_t start = 0;
  while (start <= label.size()) {
    const auto end = std::min(label.find('+', start), label.size());
    const auto part = label.substr(start, end - start);
    if (part == "no_definition") mask.drop_definition = true;
    else if (part == "no_constraint") mask.drop_constraint = true;
    else if (part == "no_prompt") mask.drop_prompt = true;
    else if (part == "no_descriptions") mask.drop_descriptions = true;
    else bad_enum("ablation", part);
    start = end + 1;
  }
  return mask;
}

}  // namespace cins
