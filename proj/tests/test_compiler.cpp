#include <gtest/gtest.h>

#include "cins/compiler.hpp"
#include "cins/schema_json.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace cins {
namespace {

const std::string kUtterance = "I want to book a 5-star hotel";

InstructionTemplate make(Task task, Mode mode, const std::string& variant = "ask_about(Q)",
                         std::optional<NlgRepr> repr = std::nullopt) {
  return TemplateSet::defaults().make(task, mode, PromptVariant::from_label(variant), repr);
}

CompiledExample compile_hotel_query(Mode mode, const AblationMask& mask = {}) {
  const auto o = testing::tiny_ontology();
  const IntentExample ex{"q1", kUtterance, "transfer", "banking"};
  return compile_ic(ex, o, make(Task::IC, mode), PromptCatalog::defaults(), mask);
}

TEST(Assemble, StdIsIdentity) { EXPECT_EQ(compile_hotel_query(Mode::STD).input_text, kUtterance); }

TEST(Assemble, PeGolden) {
  EXPECT_EQ(compile_hotel_query(Mode::PE).input_text,
            "Input: I want to book a 5-star hotel [SEP] Prompt: Question: What does the previous "
            "query ask about?");
}

TEST(Assemble, CinsHasFourSegmentsInOrder) {
  const auto text = compile_hotel_query(Mode::CINS).input_text;
  const auto segs = oracle::segments(text);
  ASSERT_EQ(segs.size(), 4u);
  EXPECT_EQ(segs[0].id, "Input:");
  EXPECT_EQ(segs[1].id, "Definition:");
  EXPECT_EQ(segs[2].id, "Constraint:");
  EXPECT_EQ(segs[3].id, "Prompt:");
  EXPECT_EQ(segs[2].body,
            "The output should be one of the following candidate intents: transfer: Move money "
            "between accounts, balance: Tell the balance of an account, pay_bill: Pay a bill.");
}

TEST(Assemble, MaskDropsSegments) {
  const auto text = compile_hotel_query(Mode::CINS, AblationMask::from_label("no_definition+no_prompt")).input_text;
  const auto segs = oracle::segments(text);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[1].id, "Constraint:");

  const auto bare = compile_hotel_query(Mode::CINS, AblationMask::from_label("no_descriptions"));
  EXPECT_NE(bare.input_text.find("candidate intents: transfer, balance, pay_bill."), std::string::npos)
      << bare.input_text;
  EXPECT_EQ(bare.meta.at("ablation"), "no_descriptions");
}

TEST(Assemble, RejectsInconsistentComponents) {
  EXPECT_THROW(assemble("", {Mode::STD, "", "", ""}, {}), Error);
  EXPECT_THROW(assemble("x", {Mode::STD, "", "", "prompt"}, {}), Error);
  EXPECT_THROW(assemble("x", {Mode::PE, "def", "", "prompt"}, {}), Error);
  EXPECT_THROW(assemble("x", {Mode::PE, "", "", ""}, {}), Error);
  EXPECT_THROW(assemble("x", {Mode::CINS, "def", "", "prompt"}, {}), Error);
  EXPECT_EQ(assemble("x", {Mode::CINS, "d", "c", "p"}, {}), "Input: x [SEP] Definition: d [SEP] Constraint: c [SEP] Prompt: p");
}

TEST(SegmentAlgebra, HoldsOnGeneratedCases) {
  const auto failure = oracle::check_segment_algebra(1000, 17);
  EXPECT_TRUE(failure.empty()) << failure;
}

TEST(CompileIc, TargetAndMeta) {
  const auto ex = compile_hotel_query(Mode::CINS);
  EXPECT_EQ(ex.target_text, "transfer");
  EXPECT_EQ(ex.task, Task::IC);
  EXPECT_EQ(ex.meta.at("mode"), "CINS");
  EXPECT_EQ(ex.meta.at("prompt"), "ask_about(Q)");
  EXPECT_EQ(ex.meta.at("domain"), "banking");
  EXPECT_EQ(ex.meta.at("template"), "cins-default-1/IC/CINS/ask_about(Q)");
}

TEST(CompileIc, DataErrors) {
  const auto o = testing::tiny_ontology();
  const auto tmpl = make(Task::IC, Mode::CINS);
  const auto& catalog = PromptCatalog::defaults();
  EXPECT_THROW(compile_ic({"x", "hello", "refund", "banking"}, o, tmpl, catalog, {}), DataError);
  EXPECT_THROW(compile_ic({"x", "", "transfer", "banking"}, o, tmpl, catalog, {}), DataError);
  EXPECT_THROW(compile_ic({"x", "hello", "transfer", "travel"}, o, tmpl, catalog, {}), DataError);
  EXPECT_THROW(compile_ic({"x", "hello", "area", "hotel"}, o, make(Task::DST, Mode::CINS, "slot_value(Q)"),
                          catalog, {}),
               Error);
}

DstTurn hotel_turn() {
  DstTurn t;
  t.dialog_id = "d1";
  t.history = {{{Speaker::user, "i need a hotel in the east"},
                {Speaker::system, "any price range?"},
                {Speaker::user, "with free parking please"}},
               2};
  t.gold.entries[{"hotel", "area"}] = "east";
  t.gold.entries[{"hotel", "parking"}] = "yes";
  return t;
}

TEST(CompileDst, OneExamplePerSlot) {
  const auto o = testing::tiny_ontology();
  const auto& slots = o.domain("hotel").slots;
  const auto out = compile_dst(hotel_turn(), slots, make(Task::DST, Mode::CINS, "slot_value(Q)"),
                               PromptCatalog::defaults(), {});
  ASSERT_EQ(out.size(), slots.size());
  EXPECT_EQ(out[0].id, "d1/t2/hotel/area");
  EXPECT_EQ(out[0].target_text, "east");
  EXPECT_EQ(out[1].target_text, "none");
  EXPECT_EQ(out[2].target_text, "yes");
  EXPECT_EQ(out[0].meta.at("turn"), "2");
  EXPECT_EQ(out[0].meta.at("slot_kind"), "categorical");

  const auto input = oracle::segments(out[0].input_text);
  EXPECT_EQ(input[0].body, "user: i need a hotel in the east system: any price range? user: with free parking please");
  EXPECT_NE(input[1].body.find("The slot to track is area or place of the hotel."), std::string::npos);
  EXPECT_NE(input[2].body.find("candidate values: north, south, east, west, centre."), std::string::npos);
  // Open and boolean slots carry no candidate list.
  EXPECT_EQ(out[1].input_text.find("candidate values"), std::string::npos);
  EXPECT_EQ(out[2].input_text.find("candidate values"), std::string::npos);
}

TEST(CompileDst, BooleanSlotsUseWhetherQuestion) {
  const auto o = testing::tiny_ontology();
  const auto out = compile_dst(hotel_turn(), o.domain("hotel").slots,
                               make(Task::DST, Mode::PE, "slot_value(Q)"), PromptCatalog::defaults(), {});
  const auto prompt = oracle::segments(out[2].input_text).back();
  EXPECT_EQ(prompt.id, "Prompt:");
  EXPECT_EQ(prompt.body.rfind("Question: Whether", 0), 0u) << prompt.body;
  EXPECT_EQ(oracle::segments(out[0].input_text).back().body.rfind("Question: What", 0), 0u);
}

TEST(CompileDst, DropDescriptionsUsesNaiveSlotName) {
  const auto o = testing::tiny_ontology();
  const auto out = compile_dst(hotel_turn(), o.domain("hotel").slots,
                               make(Task::DST, Mode::CINS, "slot_value(Q)"), PromptCatalog::defaults(),
                               AblationMask::from_label("no_descriptions"));
  EXPECT_NE(out[0].input_text.find("The slot to track is hotel area."), std::string::npos);
  EXPECT_EQ(out[0].input_text.find("area or place"), std::string::npos);
}

TEST(CompileDst, HistoryMustBeValid) {
  auto turn = hotel_turn();
  turn.history.turn_index = 3;
  const auto o = testing::tiny_ontology();
  EXPECT_THROW(compile_dst(turn, o.domain("hotel").slots, make(Task::DST, Mode::STD),
                           PromptCatalog::defaults(), {}),
               DataError);
}

TEST(CompileNlg, NaiveAndT2g2Golden) {
  const NlgItem item{"n1", "d1", "hotel", parse_acts("Inform(name=Rosewood), Inform(star=5)"),
                     "Rosewood is a 5 star hotel."};
  TemplateTable table;
  table.add({"Inform", "name"}, "The hotel is called {value}.");
  table.add({"Inform", "star"}, "It is {value} star.");
  const auto& catalog = PromptCatalog::defaults();

  const auto naive = compile_nlg(item, NlgRepr::naive, nullptr, make(Task::NLG, Mode::STD, "paraphrase(Q)", NlgRepr::naive),
                                 catalog, {});
  EXPECT_EQ(naive.input_text, "Inform(name=Rosewood), Inform(star=5)");
  EXPECT_EQ(naive.target_text, "Rosewood is a 5 star hotel.");

  const auto t2g2 = compile_nlg(item, NlgRepr::t2g2, &table,
                                make(Task::NLG, Mode::STD, "paraphrase(Q)", NlgRepr::t2g2), catalog, {});
  EXPECT_EQ(t2g2.input_text, "The hotel is called Rosewood. It is 5 star.");
  EXPECT_EQ(t2g2.meta.at("acts"), "Inform(name=Rosewood), Inform(star=5)");

  const auto cins = compile_nlg(item, NlgRepr::t2g2, &table,
                                make(Task::NLG, Mode::CINS, "paraphrase(Q)", NlgRepr::t2g2), catalog, {});
  EXPECT_NE(oracle::segments(cins.input_text)[1].body.find("paraphrase"), std::string::npos);

  EXPECT_THROW(compile_nlg(item, NlgRepr::t2g2, nullptr,
                           make(Task::NLG, Mode::STD, "paraphrase(Q)", NlgRepr::t2g2), catalog, {}),
               DataError);
  EXPECT_THROW(compile_nlg(item, NlgRepr::naive, nullptr,
                           make(Task::NLG, Mode::STD, "paraphrase(Q)", NlgRepr::t2g2), catalog, {}),
               Error);
}

TEST(FillPlaceholders, Rules) {
  EXPECT_EQ(fill_placeholders("a {x} b {y_z}", {{"x", "1"}, {"y_z", "{x}"}}), "a 1 b {x}");
  EXPECT_EQ(fill_placeholders("{Not} {} {x", {}), "{Not} {} {x");
  EXPECT_THROW(fill_placeholders("{missing}", {}), Error);
}

TEST(PromptCatalog, DefaultsAreConsistent) {
  const auto c = PromptCatalog::defaults();
  EXPECT_TRUE(c.problems().empty());
  for (auto task : {Task::IC, Task::DST, Task::NLG}) {
    const auto variants = variant_matrix(task, c);
    EXPECT_EQ(variants.size(), 4u) << to_string(task);
    for (const auto& v : variants) {
      const auto& entry = c.at(task, v.root, v.expression);
      const bool question = entry.text.rfind("Question: ", 0) == 0;
      EXPECT_EQ(question, v.expression == PromptExpression::question) << entry.text;
    }
  }
}

TEST(PromptCatalog, ProblemsReportMissingExpressionAndPrefix) {
  PromptCatalog c;
  c.add(Task::IC, "r", PromptExpression::question, {"What is it?", ""});
  const auto problems = c.problems();
  EXPECT_EQ(problems.size(), 2u);
}

TEST(PromptVariant, Labels) {
  EXPECT_EQ((PromptVariant{"ask_about", PromptExpression::declarative}.label()), "ask_about(D)");
  EXPECT_EQ(PromptVariant::from_label("slot_value(Q)"), (PromptVariant{"slot_value", PromptExpression::question}));
  EXPECT_THROW(PromptVariant::from_label("slot_value"), Error);
  EXPECT_THROW(PromptVariant::from_label("x(Z)"), Error);
}

TEST(TemplateSet, ModeShapes) {
  const auto std_t = make(Task::IC, Mode::STD);
  EXPECT_TRUE(std_t.definition.empty() && std_t.constraint.empty() && std_t.prompt_root.empty());
  const auto pe = make(Task::IC, Mode::PE);
  EXPECT_TRUE(pe.definition.empty() && pe.constraint.empty());
  EXPECT_EQ(pe.prompt_root, "ask_about");
  const auto cins = make(Task::IC, Mode::CINS);
  EXPECT_FALSE(cins.definition.empty() || cins.constraint.empty());
  EXPECT_NO_THROW(validate_template(cins));
  auto broken = pe;
  broken.definition = "x";
  EXPECT_THROW(validate_template(broken), Error);
}

TEST(TemplateSet, ShippedJsonMatchesBuiltins) {
  const auto templates = TemplateSet::load(testing::data_dir() / "templates.json");
  const auto prompts = PromptCatalog::load(testing::data_dir() / "prompts.json");
  EXPECT_EQ(templates.to_json_text(), TemplateSet::defaults().to_json_text());
  EXPECT_EQ(prompts.to_json_text(), PromptCatalog::defaults().to_json_text());
  EXPECT_EQ(TemplateSet::from_json_text(templates.to_json_text()).to_json_text(), templates.to_json_text());
}

}  // namespace
}  // namespace cins
