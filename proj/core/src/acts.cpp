#include "cins/acts.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "cins/schema_json.hpp"

namespace cins {

namespace {

constexpr std::string_view kSpecial = ",=()[]\"";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_special(char c) { return kSpecial.find(c) != std::string_view::npos; }

class ActParser {
 public:
  explicit ActParser(std::string_view text) : text_(text) {}

  ActList parse() {
    ActList frames;
    skip_space();
    const bool bracketed = peek() == '[';
    if (bracketed) ++pos_;
    for (;;) {
      frames.push_back(parse_act());
      skip_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    if (bracketed) {
      if (peek() != ']') fail(at_end() ? "missing closing ']'" : unexpected());
      ++pos_;
      skip_space();
    }
    if (!at_end()) fail(peek() == ')' ? "unbalanced parentheses: unexpected ')'" : unexpected());
    return frames;
  }

 private:
  DialogActFrame parse_act() {
    skip_space();
    DialogActFrame frame;
    const std::size_t name_at = pos_;
    frame.act = read_name();
    if (frame.act.empty()) fail("empty act name", name_at);
    skip_space();
    if (peek() != '(') fail(at_end() ? "expected '(' after act name" : unexpected());
    const std::size_t open_at = pos_++;
    skip_space();
    if (peek() == ')') {
      ++pos_;
      return frame;
    }
    for (;;) {
      skip_space();
      SlotValue pair;
      const std::size_t slot_at = pos_;
      pair.slot = read_name();
      if (pair.slot.empty()) {
        if (at_end()) fail("unbalanced parentheses: missing ')'", open_at);
        fail("empty slot name", slot_at);
      }
      skip_space();
      if (peek() == '=') {
        const std::size_t eq_at = pos_++;
        skip_space();
        if (peek() == '"') {
          pair.value = read_quoted();
        } else {
          auto value = read_name();
          if (value.empty()) fail("dangling '='", eq_at);
          pair.value = std::move(value);
        }
        skip_space();
      }
      frame.slot_values.push_back(std::move(pair));
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ')') {
        ++pos_;
        return frame;
      }
      if (at_end()) fail("unbalanced parentheses: missing ')'", open_at);
      fail(peek() == '(' ? "unbalanced parentheses: unexpected '('" : unexpected());
    }
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (!at_end() && !is_special(text_[pos_])) ++pos_;
    std::size_t end = pos_;
    while (end > start && is_space(text_[end - 1])) --end;
    return std::string(text_.substr(start, end - start));
  }

  std::string read_quoted() {
    const std::size_t open_at = pos_++;
    std::string out;
    while (!at_end()) {
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\' && !at_end()) {
        out.push_back(text_[pos_++]);
        continue;
      }
      out.push_back(c);
    }
    fail("unterminated quoted value", open_at);
  }

  void skip_space() {
    while (!at_end() && is_space(text_[pos_])) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  std::string unexpected() const {
    return std::string("unexpected '") + text_[pos_] + "'";
  }

  [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ParseError(at, what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool needs_quotes(std::string_view value) {
  if (value.empty() || is_space(value.front()) || is_space(value.back())) return true;
  return std::any_of(value.begin(), value.end(), is_special);
}

void check_name(std::string_view name, std::string_view what) {
  if (name.empty() || is_space(name.front()) || is_space(name.back()) ||
      std::any_of(name.begin(), name.end(), is_special))
    throw Error("cannot render " + std::string(what) + " '" + std::string(name) +
                "': names must be non-empty, trimmed and free of , = ( ) [ ] \"");
}

std::string quote(std::string_view value) {
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::size_t count_placeholders(std::string_view text) {
  std::size_t n = 0;
  for (auto at = text.find(kValuePlaceholder); at != std::string_view::npos;
       at = text.find(kValuePlaceholder, at + kValuePlaceholder.size()))
    ++n;
  return n;
}

}  // namespace

std::string TemplateKey::to_string() const {
  return act + "(" + slot.value_or("") + ")";
}

void TemplateTable::add(TemplateKey key, std::string text) {
  if (key.act.empty()) throw Error("template with empty act name");
  if (key.slot && count_placeholders(text) != 1)
    throw Error("template for " + key.to_string() + " must contain exactly one {value}");
  if (entries_.contains(key)) throw Error("duplicate template for " + key.to_string());
  entries_.emplace(std::move(key), std::move(text));
}

const std::string* TemplateTable::find(const TemplateKey& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

TemplateTable TemplateTable::from_json_text(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  TemplateTable table;
  const auto& rows = doc.is_object() ? doc.at("templates") : doc;
  for (const auto& row : rows) {
    TemplateKey key{row.at("act").get<std::string>(), std::nullopt};
    if (const auto it = row.find("slot"); it != row.end() && !it->is_null())
      key.slot = it->get<std::string>();
    table.add(std::move(key), row.at("template").get<std::string>());
  }
  return table;
}

TemplateTable TemplateTable::load(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  try {
    return from_json_text(doc.dump());
  } catch (const std::exception& e) {
    throw DataError(path.string(), e.what());
  }
}

ActList parse_acts(std::string_view text) { return ActParser(text).parse(); }

std::string render_naive(const ActList& frames) {
  if (frames.empty()) throw Error("cannot render an empty dialog-act list");
  std::string out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& frame = frames[i];
    check_name(frame.act, "act");
    if (i) out += ", ";
    out += frame.act;
    out += '(';
    for (std::size_t p = 0; p < frame.slot_values.size(); ++p) {
      const auto& pair = frame.slot_values[p];
      check_name(pair.slot, "slot");
      if (p) out += ", ";
      out += pair.slot;
      if (pair.value) {
        out += '=';
        out += needs_quotes(*pair.value) ? quote(*pair.value) : *pair.value;
      }
    }
    out += ')';
  }
  return out;
}

std::vector<TemplateKey> required_templates(const ActList& frames) {
  std::vector<TemplateKey> keys;
  for (const auto& frame : frames) {
    if (frame.slot_values.empty()) {
      keys.push_back({frame.act, std::nullopt});
      continue;
    }
    for (const auto& pair : frame.slot_values) keys.push_back({frame.act, pair.slot});
  }
  return keys;
}

std::string render_t2g2(const ActList& frames, const TemplateTable& table) {
  std::string out;
  auto append = [&out](std::string_view fragment) {
    if (!out.empty()) out += ' ';
    out += fragment;
  };
  for (const auto& frame : frames) {
    if (frame.slot_values.empty()) {
      TemplateKey key{frame.act, std::nullopt};
      const auto* text = table.find(key);
      if (!text) throw MissingTemplateError(std::move(key));
      append(*text);
      continue;
    }
    for (const auto& pair : frame.slot_values) {
      TemplateKey key{frame.act, pair.slot};
      const auto* text = table.find(key);
      if (!text) throw MissingTemplateError(std::move(key));
      std::string fragment = *text;
      const auto at = fragment.find(kValuePlaceholder);
      if (at != std::string::npos)
        fragment.replace(at, kValuePlaceholder.size(), pair.value.value_or(pair.slot));
      append(fragment);
    }
  }
  return out;
}

std::vector<TemplateKey> check_coverage(const std::vector<ActList>& corpus,
                                        const TemplateTable& table) {
  std::set<TemplateKey> missing;
  for (const auto& frames : corpus)
    for (auto& key : required_templates(frames))
      if (!table.find(key)) missing.insert(std::move(key));
  return {missing.begin(), missing.end()};
}

}  // namespace cins
