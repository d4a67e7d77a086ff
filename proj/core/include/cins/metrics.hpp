#pragma once

// Scoring for the three tasks. Every comparison goes through
// normalize_label; rates live in [0, 1].
//
// BLEU variant (recorded in every report as kBleuVariant):
//   corpus-level BLEU-4, uniform weights, clipped n-gram counts against a
//   single reference, brevity penalty exp(1 - r/c) when c <= r.
//   Tokens: whitespace split after isolating each ASCII punctuation mark.
//   Smoothing: an order with zero clipped matches uses (0 + 1) / (total + 1).
//   Empty hypothesis corpus (c = 0) scores 0.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cins/acts.hpp"
#include "cins/schema.hpp"

namespace cins {

inline constexpr std::string_view kBleuVariant =
    "corpus-bleu4/punct-split-whitespace/add-one-on-zero-match-orders";

struct AccuracyResult {
  double accuracy = 0;
  double out_of_labelset_rate = 0;
};

/// Fraction of exact matches after normalization. Predictions outside the
/// labelset are wrong and counted separately; an empty labelset disables that
/// count.
AccuracyResult intent_accuracy(const std::vector<std::string>& predictions,
                               const std::vector<std::string>& golds,
                               const std::vector<std::string>& labelset);

/// Fraction of turns where every slot in either state agrees; an absent slot
/// counts as "none".
double joint_goal_accuracy(const std::vector<DialogState>& predicted,
                           const std::vector<DialogState>& gold);

/// Per-slot accuracy over the same turns (union of keys seen anywhere).
std::map<SlotKey, double> slot_accuracy(const std::vector<DialogState>& predicted,
                                        const std::vector<DialogState>& gold);

/// True iff some slot value of `frames` is missing from `output`.
bool has_slot_error(std::string_view output, const ActList& frames);

double slot_error_rate(const std::vector<std::string>& outputs,
                       const std::vector<ActList>& frames);

std::vector<std::string> bleu_tokenize(std::string_view text);

/// Sufficient statistics; shards merge exactly with +=.
struct BleuStats {
  std::array<std::uint64_t, 4> matches{};
  std::array<std::uint64_t, 4> totals{};
  std::uint64_t hypothesis_length = 0;
  std::uint64_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
  double score() const;
  bool operator==(const BleuStats&) const = default;
};

BleuStats bleu_stats(std::string_view hypothesis, std::string_view reference);

double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references);

struct RunScores {
  Task task = Task::IC;
  std::map<std::string, double> metrics;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct MetricSummary {
  double mean = 0;
  double stddev = 0;  // population
  std::vector<double> values;
};

struct AggregateScores {
  Task task = Task::IC;
  std::map<std::string, MetricSummary> metrics;
  std::vector<std::uint64_t> seeds;
};

/// Per-metric mean and population standard deviation. Throws Error on an
/// empty list or when runs disagree on task or metric names.
AggregateScores aggregate(const std::vector<RunScores>& runs);

}  // namespace cins
