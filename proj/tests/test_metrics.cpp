#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cins/metrics.hpp"
#include "oracles.hpp"

namespace cins {
namespace {

double acc_only(const std::vector<std::string>& p, const std::vector<std::string>& g,
                const std::vector<std::string>& l) {
  return intent_accuracy(p, g, l).accuracy;
}

TEST(IntentAccuracy, NormalizesAndTracksOutOfLabelset) {
  const std::vector<std::string> labelset = {"transfer", "pay_bill", "balance"};
  const auto r = intent_accuracy({"Transfer", "pay bill", "refund", "balance"},
                                 {"transfer", "Pay_Bill", "refund", "transfer"}, labelset);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(r.out_of_labelset_rate, 0.25);
  // Without a labelset nothing is out of set.
  EXPECT_DOUBLE_EQ(intent_accuracy({"refund"}, {"refund"}, {}).accuracy, 1.0);
  EXPECT_THROW(intent_accuracy({"a"}, {}, labelset), Error);
  EXPECT_THROW(intent_accuracy({}, {}, labelset), Error);
}

TEST(JointGoalAccuracy, AbsentMeansNone) {
  DialogState a, b;
  a.entries[{"hotel", "area"}] = "east";
  b.entries[{"hotel", "area"}] = "East";
  b.entries[{"hotel", "name"}] = "none";
  DialogState c = a;
  c.entries[{"hotel", "parking"}] = "yes";
  EXPECT_DOUBLE_EQ(joint_goal_accuracy({a, a}, {b, c}), 0.5);
  EXPECT_DOUBLE_EQ(joint_goal_accuracy({DialogState{}}, {DialogState{}}), 1.0);

  const auto per_slot = slot_accuracy({a, a}, {b, c});
  EXPECT_DOUBLE_EQ(per_slot.at({"hotel", "area"}), 1.0);
  EXPECT_DOUBLE_EQ(per_slot.at({"hotel", "parking"}), 0.5);
}

TEST(SlotErrorRate, ValuesMustAppear) {
  const auto frames = parse_acts("Inform(name=Rosewood, star=5), Request(area)");
  EXPECT_FALSE(has_slot_error("The ROSEWOOD is 5 star. Which area?", frames));
  EXPECT_TRUE(has_slot_error("The Rosewood. Which area?", frames));
  EXPECT_DOUBLE_EQ(slot_error_rate({"rosewood 5", "nothing"}, {frames, frames}), 0.5);
}

TEST(MetricOracles, AgreeOnRandomFixtures) {
  const auto failure = oracle::check_metric_oracles(500, 7, joint_goal_accuracy, slot_error_rate, acc_only);
  EXPECT_TRUE(failure.empty()) << failure;
}

TEST(Bleu, Tokenizer) {
  EXPECT_EQ(bleu_tokenize("It is 5-star, ok?  yes."),
            (std::vector<std::string>{"It", "is", "5", "-", "star", ",", "ok", "?", "yes", "."}));
  EXPECT_EQ(bleu_tokenize("caf\xc3\xa9 au lait"), (std::vector<std::string>{"caf\xc3\xa9", "au", "lait"}));
  EXPECT_TRUE(bleu_tokenize(" \t ").empty());
}

TEST(Bleu, ManualTwoSentenceOracle) {
  EXPECT_NEAR(corpus_bleu(oracle::kBleuHyps, oracle::kBleuRefs), oracle::manual_bleu(), 1e-9);
  const auto s = bleu_stats(oracle::kBleuHyps[0], oracle::kBleuRefs[0]);
  EXPECT_EQ(s.matches, (std::array<std::uint64_t, 4>{5, 3, 1, 0}));
  EXPECT_EQ(s.totals, (std::array<std::uint64_t, 4>{6, 5, 4, 3}));
}

TEST(Bleu, IdentityIsExactlyOne) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> corpus;
    for (auto n = 1 + rng() % 5; n > 0; --n) corpus.push_back(oracle::sentence(rng, 12));
    ASSERT_EQ(corpus_bleu(corpus, corpus), 1.0);
  }
  EXPECT_EQ(corpus_bleu({"a"}, {"a"}), 1.0);
  EXPECT_EQ(corpus_bleu({""}, {"the hotel"}), 0.0);
}

TEST(Bleu, BrevityPenaltyOnlyWhenShort) {
  // Longer hypothesis with all n-grams matched is not penalized.
  BleuStats s;
  s.matches = s.totals = {4, 3, 2, 1};
  s.hypothesis_length = 4;
  s.reference_length = 3;
  EXPECT_EQ(s.score(), 1.0);
  s.reference_length = 8;
  EXPECT_NEAR(s.score(), std::exp(1.0 - 2.0), 1e-12);
}

TEST(Bleu, ShardsMergeExactly) {
  std::mt19937_64 rng(5);
  std::vector<std::string> hyps, refs;
  for (int i = 0; i < 30; ++i) {
    hyps.push_back(oracle::sentence(rng));
    refs.push_back(oracle::sentence(rng));
  }
  BleuStats left, right, all;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    (i < 13 ? left : right) += bleu_stats(hyps[i], refs[i]);
    all += bleu_stats(hyps[i], refs[i]);
  }
  left += right;
  EXPECT_EQ(left, all);
  EXPECT_EQ(left.score(), corpus_bleu(hyps, refs));
}

RunScores run(std::uint64_t seed, double acc) { return {Task::IC, {{"accuracy", acc}}, 10, seed}; }

TEST(Aggregate, MeanAndPopulationStd) {
  const std::vector<double> values = {0.2, 0.4, 0.6};
  const auto a = aggregate({run(1, 0.2), run(2, 0.4), run(3, 0.6)});
  const auto& m = a.metrics.at("accuracy");
  EXPECT_NEAR(m.mean, oracle::mean(values), 1e-12);
  EXPECT_NEAR(m.stddev, oracle::population_std(values), 1e-12);
  EXPECT_EQ(a.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
}

TEST(Aggregate, IdenticalValuesHaveZeroStd) {
  for (double v : {0.1, 1.0 / 3.0, 0.7, 1.0}) {
    const auto a = aggregate({run(1, v), run(2, v), run(3, v)});
    EXPECT_EQ(a.metrics.at("accuracy").stddev, 0.0);
    EXPECT_EQ(a.metrics.at("accuracy").mean, v);
  }
}

TEST(Aggregate, IndependentOfRunOrder) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dist;
  for (int i = 0; i < 100; ++i) {
    std::vector<RunScores> runs;
    for (std::uint64_t s = 0; s < 5; ++s) runs.push_back(run(s, dist(rng)));
    const auto a = aggregate(runs).metrics.at("accuracy");
    std::shuffle(runs.begin(), runs.end(), rng);
    const auto b = aggregate(runs).metrics.at("accuracy");
    ASSERT_EQ(a.mean, b.mean);
    ASSERT_EQ(a.stddev, b.stddev);
  }
}

TEST(Aggregate, Errors) {
  EXPECT_THROW(aggregate({}), Error);
  EXPECT_THROW(aggregate({run(1, 0.5), {Task::DST, {{"accuracy", 0.5}}, 1, 2}}), Error);
  EXPECT_THROW(aggregate({run(1, 0.5), {Task::IC, {{"jga", 0.5}}, 1, 2}}), Error);
}

}  // namespace
}  // namespace cins
