#pragma once

// Few-shot split construction. All randomness comes from Pcg32 so a split is
// a pure function of (plan, dataset, seed) on every platform.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cins/ingest.hpp"

namespace cins {

/// PCG-XSH-RR with 64-bit state and 32-bit output (O'Neill 2014), seeded as
/// pcg32_srandom_r(seed, stream). The bounded draw uses the reference
/// rejection threshold, so results never depend on the C++ standard library.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0x14057b7ef767814fULL);

  std::uint32_t next();
  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint32_t below(std::uint32_t bound);

  /// Fisher-Yates, drawing j in [0, i] for i = n-1 .. 1.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(static_cast<std::uint32_t>(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
};

enum class Strategy { k_per_label, percent_dialogs, k_dialogs_per_domain };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

struct SamplePlan {
  Strategy strategy = Strategy::k_per_label;
  double k_or_pct = 1;
  std::uint64_t seed = 0;
  bool match_validation = true;
  bool required_coverage = false;  // k_dialogs_per_domain only

  /// Throws Error when k_or_pct is out of range for the strategy.
  void validate() const;
};

/// A sampled unit: an utterance id (intent data) or a dialog id (DST, NLG).
struct SampledUnit {
  std::string id;
  std::string label;  // intent for per-label plans, domain for per-domain plans

  auto operator<=>(const SampledUnit&) const = default;
};

struct Split {
  std::vector<SampledUnit> units;  // sorted by id

  std::size_t size() const { return units.size(); }
  std::vector<std::string> ids() const;
  std::map<std::string, std::size_t> label_counts() const;
};

/// Candidate pool for matching and hashing: every unit of a data split.
std::vector<SampledUnit> intent_units(const std::vector<IntentExample>& rows);
std::vector<SampledUnit> dialog_units(const DstDataset& dataset);
std::vector<SampledUnit> dialog_units(const NlgDataset& dataset);

/// FNV-1a 64 over the sorted unit ids, rendered as 16 hex digits.
std::string dataset_hash(const std::vector<SampledUnit>& units);

Split sample_k_per_label(const std::vector<IntentExample>& rows, std::size_t k, std::uint64_t seed);

/// floor(pct / 100 * |dialogs|) whole dialogs.
Split sample_percent_dialogs(const DstDataset& dataset, double pct, std::uint64_t seed);

/// k dialogs per domain, where a dialog's domain is that of its first item.
/// With `required_coverage`, redraws up to `max_attempts` times until every
/// (act, slot) of the dataset appears; otherwise throws listing what is missing.
Split sample_k_dialogs_per_domain(const NlgDataset& dataset, std::size_t k, std::uint64_t seed,
                                  bool required_coverage, int max_attempts = 100);

/// Down-samples `validation` to train.size() units. When `per_label` is set
/// the per-label counts mirror the training split.
Split match_validation(const std::vector<SampledUnit>& validation, const Split& train,
                       std::uint64_t seed, bool per_label);

/// Manifest: a header record followed by one {"split", "id", "label"} line
/// per unit. Identical inputs produce byte-identical text.
std::string split_manifest(const SamplePlan& plan, const std::string& data_hash,
                           const Split& train, const Split* validation);

}  // namespace cins
