#pragma once

// Dialog-act strings: parsing, the "Naive" canonical rendering and the
// template-guided (T2G2) rendering used as NLG inputs.
//
// Grammar accepted by parse_acts (whitespace around tokens is ignored):
//
//   acts    := '[' list ']' | list
//   list    := act (',' act)*
//   act     := NAME '(' [pair (',' pair)*] ')'
//   pair    := NAME ['=' value]
//   value   := '"' (char | '\"' | '\\')* '"' | bare
//
// NAME and bare values are runs of any characters except , = ( ) [ ] "
// and may contain inner spaces. Values containing those characters, or with
// leading/trailing whitespace, must be quoted; render_naive quotes them.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cins/schema.hpp"

namespace cins {

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

struct TemplateKey {
  std::string act;
  std::optional<std::string> slot;

  auto operator<=>(const TemplateKey&) const = default;
  std::string to_string() const;  // "Inform(star)" / "Goodbye()"
};

class MissingTemplateError : public Error {
 public:
  explicit MissingTemplateError(TemplateKey key)
      : Error("no T2G2 template for " + key.to_string()), key_(std::move(key)) {}

  const TemplateKey& key() const noexcept { return key_; }

 private:
  TemplateKey key_;
};

inline constexpr std::string_view kValuePlaceholder = "{value}";

/// Human-written templates, one per (act, slot) plus (act, absent) for acts
/// without slots. Slot templates hold exactly one `{value}` placeholder.
class TemplateTable {
 public:
  TemplateTable() = default;

  /// Throws Error if a slot template lacks exactly one placeholder or the key
  /// is already present.
  void add(TemplateKey key, std::string text);
  const std::string* find(const TemplateKey& key) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<TemplateKey, std::string>& entries() const { return entries_; }

  /// File layout: JSON array of {"act", "slot" (nullable), "template"}.
  static TemplateTable load(const std::filesystem::path& path);
  static TemplateTable from_json_text(std::string_view text);

 private:
  std::map<TemplateKey, std::string> entries_;
};

using ActList = std::vector<DialogActFrame>;

ActList parse_acts(std::string_view text);

/// Canonical serialization; parse_acts(render_naive(f)) == f. Throws Error on
/// an empty list.
std::string render_naive(const ActList& frames);

/// One fragment per (act, slot) pair, or per slot-less act, joined by a
/// single space. A slot mentioned without a value substitutes the slot name.
std::string render_t2g2(const ActList& frames, const TemplateTable& table);

/// Every template key needed to render `frames`, in first-use order.
std::vector<TemplateKey> required_templates(const ActList& frames);

/// Sorted, de-duplicated keys that render_t2g2 would fail on.
std::vector<TemplateKey> check_coverage(const std::vector<ActList>& corpus,
                                        const TemplateTable& table);

}  // namespace cins
