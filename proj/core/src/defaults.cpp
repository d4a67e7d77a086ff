// Default instruction wording and prompt catalog. These are data: edit the
// JSON exports under data/ and pass them with --templates / --prompts to
// override without rebuilding.

#include "cins/compiler.hpp"

namespace cins {

namespace {

constexpr std::string_view kTemplateVersion = "cins-default-1";
constexpr std::string_view kPromptVersion = "prompts-default-1";

}  // namespace

TemplateSet TemplateSet::defaults() {
  std::map<Task, TaskSkeletons> tasks;

  tasks[Task::IC] = {
      .definition =
          "Intent classification is to predict the intent of a user utterance. An intent is "
          "the purpose or goal that the user wants to achieve with the utterance.",
      .definition_t2g2 = "",
      .constraint = "The output should be one of the following candidate intents: {intents}.",
      .candidate_clause = "",
  };

  tasks[Task::DST] = {
      .definition =
          "Dialog state tracking is to predict the value of a slot requested by the user "
          "from the dialog history between the user and the system. The slot to track is "
          "{slot_description}.",
      .definition_t2g2 = "",
      .constraint =
          "{candidate_clause}If the slot is mentioned multiple times in the dialog history, "
          "the value should follow its latest mention. If the slot is not mentioned, the "
          "value is none.",
      .candidate_clause = "The value should be one of the candidate values: {candidates}. ",
  };

  tasks[Task::NLG] = {
      .definition =
          "Natural language generation is to verbalize a semantic representation of dialog "
          "actions into a natural language utterance.",
      .definition_t2g2 =
          "Natural language generation is to paraphrase a template-generated text into a "
          "natural language utterance.",
      .constraint =
          "The output utterance should be natural and concise, and it should preserve the "
          "meaning and information of the input.",
      .candidate_clause = "",
  };

  return TemplateSet(std::string(kTemplateVersion), std::move(tasks));
}

PromptCatalog PromptCatalog::defaults() {
  using E = PromptExpression;
  PromptCatalog c;
  c.set_version(std::string(kPromptVersion));

  c.add(Task::IC, "ask_about", E::declarative, {"The previous query asks about", ""});
  c.add(Task::IC, "ask_about", E::question,
        {"Question: What does the previous query ask about?", ""});
  c.add(Task::IC, "intent", E::declarative, {"The intent of the previous query is", ""});
  c.add(Task::IC, "intent", E::question,
        {"Question: What is the intent of the previous query?", ""});

  c.add(Task::DST, "slot_value", E::declarative,
        {"The value of {slot} is", "Whether the user wants {slot} is"});
  c.add(Task::DST, "slot_value", E::question,
        {"Question: What is the value of {slot}?", "Question: Whether the user wants {slot}?"});
  c.add(Task::DST, "user_wants", E::declarative,
        {"The {slot} that the user wants is", "Whether the user needs {slot} is"});
  c.add(Task::DST, "user_wants", E::question,
        {"Question: What is the {slot} that the user wants?",
         "Question: Whether the user needs {slot}?"});

  c.add(Task::NLG, "paraphrase", E::declarative, {"The natural paraphrase of the previous text is", ""});
  c.add(Task::NLG, "paraphrase", E::question,
        {"Question: What is a natural paraphrase of the previous text?", ""});
  c.add(Task::NLG, "response", E::declarative, {"The system response to the previous input is", ""});
  c.add(Task::NLG, "response", E::question,
        {"Question: What is the system response to the previous input?", ""});
  return c;
}

}  // namespace cins
