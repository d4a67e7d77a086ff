#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <random>

#include "cins/schema.hpp"
#include "cins/schema_json.hpp"
#include "support.hpp"

namespace cins {
namespace {

using testing::random_word;
using testing::tiny_ontology;

// Straightforward reference: tokenize on whitespace/underscore, lowercase,
// rejoin with single spaces.
std::string normalize_oracle(const std::string& raw) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '_') {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

TEST(NormalizeLabel, Examples) {
  EXPECT_EQ(normalize_label("  Pay_Bill "), "pay bill");
  EXPECT_EQ(normalize_label("Freeze__Account"), "freeze account");
  EXPECT_EQ(normalize_label("A \t B"), "a b");
  EXPECT_EQ(normalize_label(""), "");
  EXPECT_EQ(normalize_label("___"), "");
  EXPECT_EQ(normalize_label("none"), "none");
}

TEST(NormalizeLabel, MatchesOracleAndIsIdempotent) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "aBc_ \t\nXyZ09-";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 24);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (int n = len(rng); n > 0; --n) s.push_back(alphabet[pick(rng)]);
    const auto once = normalize_label(s);
    EXPECT_EQ(once, normalize_oracle(s)) << "input: '" << s << "'";
    EXPECT_EQ(normalize_label(once), once);
  }
}

TEST(Enums, ParseIsCaseInsensitiveAndRoundTrips) {
  EXPECT_EQ(parse_task("dst"), Task::DST);
  EXPECT_EQ(parse_mode("cins"), Mode::CINS);
  EXPECT_EQ(parse_expression("Q"), PromptExpression::question);
  EXPECT_EQ(parse_expression("D"), PromptExpression::declarative);
  for (auto t : {Task::IC, Task::DST, Task::NLG}) EXPECT_EQ(parse_task(to_string(t)), t);
  for (auto m : {Mode::STD, Mode::PE, Mode::CINS}) EXPECT_EQ(parse_mode(to_string(m)), m);
  for (auto r : {NlgRepr::naive, NlgRepr::t2g2}) EXPECT_EQ(parse_nlg_repr(to_string(r)), r);
  EXPECT_THROW(parse_task("summarize"), Error);
  EXPECT_THROW(parse_mode(""), Error);
}

TEST(Ontology, FindersNormalize) {
  const auto o = tiny_ontology();
  ASSERT_NE(o.find_domain("Banking"), nullptr);
  EXPECT_NE(o.domain("banking").find_intent("Pay Bill"), nullptr);
  EXPECT_EQ(o.domain("banking").find_intent("refund"), nullptr);
  EXPECT_EQ(o.domain("hotel").find_slot("AREA")->name, "area");
  EXPECT_THROW(o.domain("taxi"), Error);
  EXPECT_EQ(o.domain("hotel").slots[0].qualified_name(), "hotel area");
}

TEST(ValidateOntology, CleanOntologyHasNoViolations) {
  EXPECT_TRUE(validate_ontology(tiny_ontology()).empty());
  EXPECT_TRUE(validate_ontology(load_ontology(testing::fixture("ontology.json"))).empty());
}

TEST(ValidateOntology, DuplicateReportedOnceWithBothEntries) {
  auto o = tiny_ontology();
  o.domains[0].intents.push_back({"Transfer", "Another transfer."});
  const auto v = validate_ontology(o);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].rule.find("#0, #3"), std::string::npos) << v[0].rule;
  EXPECT_NE(v[0].entity.find("transfer"), std::string::npos);
}

TEST(ValidateOntology, SlotRules) {
  auto o = tiny_ontology();
  auto& slots = o.domains[1].slots;
  slots[0].candidate_values.clear();                 // categorical without candidates
  slots[1].candidate_values = {"rosewood"};          // open slot with candidates
  slots[2].domain = "taxi";                          // domain mismatch
  const auto v = validate_ontology(o);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_NE(v[0].rule.find("no candidate values"), std::string::npos);
  EXPECT_NE(v[1].rule.find("must not list candidate values"), std::string::npos);
  EXPECT_NE(v[2].rule.find("differs from enclosing domain"), std::string::npos);
}

// Injects a random set of independent defects, each on its own entity, and
// checks the violation count equals the number injected.
TEST(ValidateOntology, ViolationCountMatchesInjectedDefects) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 300; ++round) {
    Ontology o;
    std::size_t expected = 0;
    const int n_domains = 1 + static_cast<int>(rng() % 4);
    for (int d = 0; d < n_domains; ++d) {
      DomainSpec dom;
      dom.name = "dom" + std::to_string(d);
      const int n_intents = static_cast<int>(rng() % 4);
      for (int i = 0; i < n_intents; ++i) {
        IntentSpec intent{"intent" + std::to_string(i), "does thing " + std::to_string(i)};
        if (rng() % 5 == 0) {
          intent.description.clear();
          ++expected;
        }
        dom.intents.push_back(intent);
      }
      if (n_intents > 0 && rng() % 6 == 0) {
        dom.intents.push_back({dom.intents[0].name, "dup"});
        ++expected;
      }
      const int n_slots = static_cast<int>(rng() % 4);
      for (int s = 0; s < n_slots; ++s) {
        SlotSpec slot{dom.name, "slot" + std::to_string(s), "desc", SlotKind::open, {}};
        switch (rng() % 6) {
          case 0:
            slot.kind = SlotKind::categorical;
            slot.candidate_values = {random_word(rng)};
            break;
          case 1:
            slot.kind = SlotKind::categorical;  // no candidates
            ++expected;
            break;
          case 2:
            slot.candidate_values = {"x"};  // open with candidates
            ++expected;
            break;
          case 3:
            slot.domain = "elsewhere";
            ++expected;
            break;
          default:
            break;
        }
        dom.slots.push_back(slot);
      }
      o.domains.push_back(dom);
    }
    EXPECT_EQ(validate_ontology(o).size(), expected) << "round " << round;
  }
}

TEST(DialogHistory, Validation) {
  DialogHistory ok{{{Speaker::user, "hi"}, {Speaker::system, "hello"}, {Speaker::user, "a hotel"}}, 2};
  EXPECT_NO_THROW(ok.validate());

  auto wrong_index = ok;
  wrong_index.turn_index = 3;
  EXPECT_THROW(wrong_index.validate(), DataError);

  auto ends_with_system = ok;
  ends_with_system.turns.pop_back();
  ends_with_system.turn_index = 1;
  EXPECT_THROW(ends_with_system.validate(), DataError);

  DialogHistory starts_with_system{{{Speaker::system, "welcome"}, {Speaker::user, "hi"}}, 1};
  EXPECT_THROW(starts_with_system.validate(), DataError);

  EXPECT_THROW(DialogHistory{}.validate(), DataError);
}

TEST(DialogState, AbsentSlotReadsAsNone) {
  DialogState s;
  s.entries[{"hotel", "area"}] = "east";
  EXPECT_EQ(s.value({"hotel", "area"}), "east");
  EXPECT_EQ(s.value({"hotel", "name"}), kNoneValue);
}

TEST(AblationMask, LabelsRoundTripForAllSixteenMasks) {
  std::set<std::string> labels;
  for (int bits = 0; bits < 16; ++bits) {
    AblationMask m{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0};
    const auto label = m.label();
    labels.insert(label);
    EXPECT_EQ(AblationMask::from_label(label), m) << label;
    EXPECT_EQ(m.any(), bits != 0);
  }
  EXPECT_EQ(labels.size(), 16u);
  EXPECT_EQ(AblationMask{}.label(), "full");
  EXPECT_EQ(AblationMask::from_label("no_definition+no_prompt").label(), "no_definition+no_prompt");
  EXPECT_THROW(AblationMask::from_label("no_input"), Error);
}

TEST(SchemaJson, RoundTrips) {
  const auto o = tiny_ontology();
  EXPECT_EQ(nlohmann::json(o).get<Ontology>(), o);

  DialogState s;
  s.entries[{"hotel", "area"}] = "east";
  s.entries[{"hotel", "name"}] = "a, \"quoted\" name";
  EXPECT_EQ(nlohmann::json(s).get<DialogState>(), s);

  CompiledExample ex{"x-1", Task::DST, "Input: hi", "none", {{"turn", "1"}, {"slot", "area"}}};
  const auto j = nlohmann::json(ex);
  EXPECT_EQ(j.get<CompiledExample>(), ex);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"id", "input_text", "meta", "target_text", "task"}));

  const auto mask = AblationMask::from_label("no_constraint+no_descriptions");
  EXPECT_EQ(nlohmann::json(mask).get<AblationMask>(), mask);
  EXPECT_EQ(nlohmann::json("no_prompt").get<AblationMask>(), AblationMask::from_label("no_prompt"));
}

TEST(SchemaJson, DumpLineIsOneLine) {
  const auto line = dump_line(nlohmann::json{{"text", "a\nb"}, {"u", "caf\xc3\xa9"}});
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_NE(line.find("caf\xc3\xa9"), std::string::npos);
}

TEST(SchemaJson, LoadOntologyRejectsViolations) {
  testing::TempDir tmp;
  auto o = tiny_ontology();
  o.domains[0].intents[0].description.clear();
  testing::write_file(tmp / "o.json", nlohmann::json(o).dump());
  try {
    load_ontology(tmp / "o.json");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("intent description is empty"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace cins
