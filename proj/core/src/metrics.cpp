#include "cins/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace cins {

namespace {

void check_aligned(std::size_t a, std::size_t b, std::string_view what) {
  if (a != b)
    throw Error(std::string(what) + ": " + std::to_string(a) + " predictions but " +
                std::to_string(b) + " references");
  if (a == 0) throw Error(std::string(what) + ": nothing to score");
}

std::set<SlotKey> all_keys(const DialogState& a, const DialogState& b) {
  std::set<SlotKey> keys;
  for (const auto& [k, v] : a.entries) keys.insert(k);
  for (const auto& [k, v] : b.entries) keys.insert(k);
  return keys;
}

using Ngram = std::vector<std::string_view>;

std::map<Ngram, std::uint64_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<Ngram, std::uint64_t> out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++out[Ngram(tokens.begin() + static_cast<long>(i), tokens.begin() + static_cast<long>(i + n))];
  return out;
}

}  // namespace

AccuracyResult intent_accuracy(const std::vector<std::string>& predictions,
                               const std::vector<std::string>& golds,
                               const std::vector<std::string>& labelset) {
  check_aligned(predictions.size(), golds.size(), "intent accuracy");
  std::set<std::string> labels;
  for (const auto& l : labelset) labels.insert(normalize_label(l));

  std::size_t correct = 0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto p = normalize_label(predictions[i]);
    const bool in_set = labels.empty() || labels.contains(p);
    if (!in_set) ++outside;
    if (in_set && p == normalize_label(golds[i])) ++correct;
  }
  const auto n = static_cast<double>(predictions.size());
  return {static_cast<double>(correct) / n, static_cast<double>(outside) / n};
}

double joint_goal_accuracy(const std::vector<DialogState>& predicted,
                           const std::vector<DialogState>& gold) {
  check_aligned(predicted.size(), gold.size(), "joint goal accuracy");
  std::size_t correct = 0;
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    bool all = true;
    for (const auto& key : all_keys(predicted[t], gold[t]))
      all = all && normalize_label(predicted[t].value(key)) == normalize_label(gold[t].value(key));
    correct += all ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::map<SlotKey, double> slot_accuracy(const std::vector<DialogState>& predicted,
                                        const std::vector<DialogState>& gold) {
  check_aligned(predicted.size(), gold.size(), "slot accuracy");
  std::set<SlotKey> keys;
  for (std::size_t t = 0; t < predicted.size(); ++t)
    for (const auto& k : all_keys(predicted[t], gold[t])) keys.insert(k);
  std::map<SlotKey, double> out;
  for (const auto& key : keys) {
    std::size_t correct = 0;
    for (std::size_t t = 0; t < predicted.size(); ++t)
      correct += normalize_label(predicted[t].value(key)) == normalize_label(gold[t].value(key));
    out[key] = static_cast<double>(correct) / static_cast<double>(predicted.size());
  }
  return out;
}

bool has_slot_error(std::string_view output, const ActList& frames) {
  const auto haystack = normalize_label(output);
  for (const auto& frame : frames)
    for (const auto& pair : frame.slot_values)
      if (pair.value && haystack.find(normalize_label(*pair.value)) == std::string::npos)
        return true;
  return false;
}

double slot_error_rate(const std::vector<std::string>& outputs, const std::vector<ActList>& frames) {
  check_aligned(outputs.size(), frames.size(), "slot error rate");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) errors += has_slot_error(outputs[i], frames[i]);
  return static_cast<double>(errors) / static_cast<double>(outputs.size());
}

std::vector<std::string> bleu_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      tokens.emplace_back(1, ch);
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return tokens;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < 4; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hypothesis_length += other.hypothesis_length;
  reference_length += other.reference_length;
  return *this;
}

double BleuStats::score() const {
  if (hypothesis_length == 0) return 0.0;
  double log_sum = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double smooth = matches[n] == 0 ? 1.0 : 0.0;
    log_sum += std::log((static_cast<double>(matches[n]) + smooth) /
                        (static_cast<double>(totals[n]) + smooth));
  }
  const double c = static_cast<double>(hypothesis_length);
  const double r = static_cast<double>(reference_length);
  const double log_bp = c > r ? 0.0 : 1.0 - r / c;
  return std::exp(log_bp + log_sum / 4.0);
}

BleuStats bleu_stats(std::string_view hypothesis, std::string_view reference) {
  const auto hyp = bleu_tokenize(hypothesis);
  const auto ref = bleu_tokenize(reference);
  BleuStats s;
  s.hypothesis_length = hyp.size();
  s.reference_length = ref.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto h = ngram_counts(hyp, n);
    const auto r = ngram_counts(ref, n);
    for (const auto& [gram, count] : h) {
      s.totals[n - 1] += count;
      if (const auto it = r.find(gram); it != r.end()) s.matches[n - 1] += std::min(count, it->second);
    }
  }
  return s;
}

double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references) {
  check_aligned(hypotheses.size(), references.size(), "BLEU");
  BleuStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) total += bleu_stats(hypotheses[i], references[i]);
  return total.score();
}

AggregateScores aggregate(const std::vector<RunScores>& runs) {
  if (runs.empty()) throw Error("cannot aggregate zero runs");
  AggregateScores out;
  out.task = runs.front().task;
  for (const auto& run : runs) {
    if (run.task != out.task) throw Error("cannot aggregate runs of different tasks");
    if (run.metrics.size() != runs.front().metrics.size() ||
        !std::equal(run.metrics.begin(), run.metrics.end(), runs.front().metrics.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; }))
      throw Error("cannot aggregate runs with different metric sets");
    out.seeds.push_back(run.seed);
    for (const auto& [name, value] : run.metrics) out.metrics[name].values.push_back(value);
  }
  for (auto& [name, m] : out.metrics) {
    // Summing in sorted order makes the result independent of run order.
    auto sorted = m.values;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) {
      m.mean = sorted.front();
      m.stddev = 0;
      continue;
    }
    const auto n = static_cast<double>(sorted.size());
    double sum = 0;
    for (const double v : sorted) sum += v;
    m.mean = sum / n;
    double sq = 0;
    for (const double v : sorted) sq += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(sq / n);
  }
  return out;
}

}  // namespace cins
