#pragma once

// Standard / Prompt-Engineering / Comprehensive-Instruction input builders.
//
// A compiled CINS input is a sequence of identified segments
//
//   Input: <x> [SEP] Definition: <d> [SEP] Constraint: <c> [SEP] Prompt: <p>
//
// PE keeps only Input and Prompt; STD is the raw input with no identifier.
// Ablations remove whole segments (identifier included).

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cins/acts.hpp"
#include "cins/schema.hpp"

namespace cins {

inline constexpr std::string_view kSep = " [SEP] ";
inline constexpr std::string_view kInputId = "Input:";
inline constexpr std::string_view kDefinitionId = "Definition:";
inline constexpr std::string_view kConstraintId = "Constraint:";
inline constexpr std::string_view kPromptId = "Prompt:";
inline constexpr std::string_view kQuestionPrefix = "Question: ";

struct PromptVariant {
  std::string root;
  PromptExpression expression = PromptExpression::question;

  /// "root(D)" or "root(Q)".
  std::string label() const;
  static PromptVariant from_label(std::string_view label);

  auto operator<=>(const PromptVariant&) const = default;
};

struct PromptEntry {
  std::string text;
  // DST only: the form used for yes/no slots ("Question: Whether ...").
  // Falls back to `text` when empty.
  std::string boolean_text;

  bool operator==(const PromptEntry&) const = default;
};

/// Prompts keyed by (task, root, expression). Every root must exist in both
/// expressions and question forms start with "Question: ".
class PromptCatalog {
 public:
  void add(Task task, std::string root, PromptExpression expression, PromptEntry entry);
  const PromptEntry* find(Task task, std::string_view root, PromptExpression expression) const;
  const PromptEntry& at(Task task, std::string_view root, PromptExpression expression) const;

  /// Sorted prompt roots registered for `task`.
  std::vector<std::string> roots(Task task) const;
  /// Human-readable invariant breaches; empty when the catalog is usable.
  std::vector<std::string> problems() const;

  const std::string& version() const { return version_; }
  void set_version(std::string v) { version_ = std::move(v); }

  static PromptCatalog defaults();
  /// {"version": ..., "prompts": [{"task","root","expression","text","boolean_text"?}]}
  static PromptCatalog load(const std::filesystem::path& path);
  static PromptCatalog from_json_text(std::string_view text);
  std::string to_json_text() const;

 private:
  using Key = std::tuple<Task, std::string, PromptExpression>;
  std::map<Key, PromptEntry> entries_;
  std::string version_;
};

/// Every ordered (root, expression) pair the catalog offers for `task`.
std::vector<PromptVariant> variant_matrix(Task task, const PromptCatalog& catalog);

struct TaskSkeletons {
  std::string definition;       // IC, DST, NLG naive
  std::string definition_t2g2;  // NLG only
  std::string constraint;
  std::string candidate_clause;  // DST only

  bool operator==(const TaskSkeletons&) const = default;
};

/// Versioned Definition/Constraint wording for all three tasks.
class TemplateSet {
 public:
  TemplateSet() = default;
  TemplateSet(std::string version, std::map<Task, TaskSkeletons> tasks)
      : version_(std::move(version)), tasks_(std::move(tasks)) {}

  const std::string& version() const { return version_; }
  const TaskSkeletons& skeletons(Task task) const;

  /// Builds a template consistent with `mode`: STD carries nothing, PE only
  /// the prompt reference, CINS everything.
  InstructionTemplate make(Task task, Mode mode, const PromptVariant& variant,
                           std::optional<NlgRepr> repr = std::nullopt) const;

  static TemplateSet defaults();
  /// {"version": ..., "tasks": {"IC": {...}, "DST": {...}, "NLG": {...}}}
  static TemplateSet load(const std::filesystem::path& path);
  static TemplateSet from_json_text(std::string_view text);
  std::string to_json_text() const;

 private:
  std::string version_;
  std::map<Task, TaskSkeletons> tasks_;
};

/// Throws Error when the template fields do not match its mode.
void validate_template(const InstructionTemplate& tmpl);

/// Fills `{name}` placeholders. Unknown names throw; braces that do not
/// enclose a lowercase identifier are copied through.
std::string fill_placeholders(std::string_view skeleton,
                              const std::map<std::string, std::string>& values);

/// Rendered instruction components ready for assembly.
struct InstructionText {
  Mode mode = Mode::STD;
  std::string definition;
  std::string constraint;
  std::string prompt;
};

std::string assemble(std::string_view input_text, const InstructionText& instruction,
                     const AblationMask& mask);

struct IntentExample {
  std::string id;
  std::string utterance;
  std::string intent;
  std::string domain;

  bool operator==(const IntentExample&) const = default;
};

CompiledExample compile_ic(const IntentExample& example, const DomainSpec& domain,
                           const InstructionTemplate& tmpl, const PromptCatalog& catalog,
                           const AblationMask& mask);

/// Resolves the domain by name first; unknown domains throw.
CompiledExample compile_ic(const IntentExample& example, const Ontology& ontology,
                           const InstructionTemplate& tmpl, const PromptCatalog& catalog,
                           const AblationMask& mask);

struct DstTurn {
  std::string dialog_id;
  DialogHistory history;  // C_t
  DialogState gold;

  bool operator==(const DstTurn&) const = default;
};

/// "user: ... system: ... user: ..."
std::string flatten_history(const DialogHistory& history);

/// One example per slot, in the given order.
std::vector<CompiledExample> compile_dst(const DstTurn& turn, const std::vector<SlotSpec>& slots,
                                         const InstructionTemplate& tmpl,
                                         const PromptCatalog& catalog, const AblationMask& mask);

struct NlgItem {
  std::string id;
  std::string dialog_id;
  std::string domain;
  ActList frames;
  std::string reference;

  bool operator==(const NlgItem&) const = default;
};

/// `table` is required for NlgRepr::t2g2.
CompiledExample compile_nlg(const NlgItem& item, NlgRepr repr, const TemplateTable* table,
                            const InstructionTemplate& tmpl, const PromptCatalog& catalog,
                            const AblationMask& mask);

}  // namespace cins
