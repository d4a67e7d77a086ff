#pragma once

// Shared domain types for task-oriented dialog compilation and scoring.
// Every type is a plain value object; JSON (de)serialization lives in
// schema_json.hpp.

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cins {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that cannot be accepted. `location()` names the file/row/item.
class DataError : public Error {
 public:
  DataError(std::string location, const std::string& what)
      : Error(location.empty() ? what : location + ": " + what),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

inline constexpr std::string_view kNoneValue = "none";

enum class Task { IC, DST, NLG };
enum class Mode { STD, PE, CINS };
enum class PromptExpression { declarative, question };
enum class NlgRepr { naive, t2g2 };
enum class SlotKind { categorical, open, boolean };
enum class Speaker { user, system };

std::string_view to_string(Task t);
std::string_view to_string(Mode m);
std::string_view to_string(PromptExpression e);
std::string_view to_string(NlgRepr r);
std::string_view to_string(SlotKind k);
std::string_view to_string(Speaker s);

// Parsers accept the exact spellings produced by to_string (case-insensitive
// for Task and Mode, so "CIns" and "cins" both work).
Task parse_task(std::string_view s);
Mode parse_mode(std::string_view s);
PromptExpression parse_expression(std::string_view s);
NlgRepr parse_nlg_repr(std::string_view s);
SlotKind parse_slot_kind(std::string_view s);
Speaker parse_speaker(std::string_view s);

struct IntentSpec {
  std::string name;
  std::string description;

  bool operator==(const IntentSpec&) const = default;
};

struct SlotSpec {
  std::string domain;
  std::string name;
  std::string description;
  SlotKind kind = SlotKind::open;
  std::vector<std::string> candidate_values;  // non-empty iff categorical

  /// "<domain> <name>", the slot identifier as plain words.
  std::string qualified_name() const;

  bool operator==(const SlotSpec&) const = default;
};

struct DomainSpec {
  std::string name;
  std::vector<IntentSpec> intents;
  std::vector<SlotSpec> slots;

  const IntentSpec* find_intent(std::string_view name) const;
  const SlotSpec* find_slot(std::string_view name) const;

  bool operator==(const DomainSpec&) const = default;
};

struct Ontology {
  std::string name;
  std::string version;
  std::vector<DomainSpec> domains;

  // Lookups compare names under normalize_label.
  const DomainSpec* find_domain(std::string_view name) const;
  const DomainSpec& domain(std::string_view name) const;  // throws Error

  bool operator==(const Ontology&) const = default;
};

struct Violation {
  std::string entity;  // e.g. "domain 'hotel' slot 'area'"
  std::string rule;

  bool operator==(const Violation&) const = default;
};

/// Returns every broken type invariant; empty means the ontology is valid.
std::vector<Violation> validate_ontology(const Ontology& ontology);

/// Lowercase, trim, collapse runs of whitespace and underscores to one space.
std::string normalize_label(std::string_view raw);

struct Turn {
  Speaker speaker = Speaker::user;
  std::string utterance;

  bool operator==(const Turn&) const = default;
};

/// C_t = {U_1, S_1, ..., S_{t-1}, U_t}.
struct DialogHistory {
  std::vector<Turn> turns;
  int turn_index = 1;

  /// Throws DataError unless turns start and end with the user, alternate
  /// strictly, and turn_index equals the number of user turns.
  void validate() const;

  bool operator==(const DialogHistory&) const = default;
};

struct SlotKey {
  std::string domain;
  std::string slot;

  auto operator<=>(const SlotKey&) const = default;
};

struct DialogState {
  std::map<SlotKey, std::string> entries;

  /// Value for `key`, or the none-sentinel when absent.
  std::string_view value(const SlotKey& key) const;

  bool operator==(const DialogState&) const = default;
};

struct SlotValue {
  std::string slot;
  std::optional<std::string> value;  // absent for slot-only mentions

  bool operator==(const SlotValue&) const = default;
};

/// One dialog act a_i(s_1=v_1, ...).
struct DialogActFrame {
  std::string act;
  std::vector<SlotValue> slot_values;

  bool operator==(const DialogActFrame&) const = default;
};

/// Which CINS components to remove. drop_descriptions only changes what the
/// Constraint says; it never removes the Constraint itself.
struct AblationMask {
  bool drop_definition = false;
  bool drop_constraint = false;
  bool drop_prompt = false;
  bool drop_descriptions = false;

  bool any() const {
    return drop_definition || drop_constraint || drop_prompt || drop_descriptions;
  }
  /// "full", "no_definition", "no_constraint+no_prompt", ...
  std::string label() const;
  static AblationMask from_label(std::string_view label);

  bool operator==(const AblationMask&) const = default;
};

/// Per-task, per-mode skeletons. Definition and constraint contain `{name}`
/// placeholders which the compiler fills; the prompt text itself comes from
/// a PromptCatalog through (prompt_root, prompt_expression).
struct InstructionTemplate {
  std::string id;
  Task task = Task::IC;
  Mode mode = Mode::STD;
  std::string definition;
  std::string constraint;
  // DST only: spliced into `{candidate_clause}` for categorical slots.
  std::string candidate_clause;
  std::string prompt_root;
  PromptExpression prompt_expression = PromptExpression::question;
  std::optional<NlgRepr> nlg_repr;

  bool operator==(const InstructionTemplate&) const = default;
};

/// Final (x, y) pair plus bookkeeping.
struct CompiledExample {
  std::string id;
  Task task = Task::IC;
  std::string input_text;
  std::string target_text;
  std::map<std::string, std::string> meta;

  bool operator==(const CompiledExample&) const = default;
};

}  // namespace cins
