#include "cins/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cins/schema_json.hpp"

namespace cins {

namespace {

constexpr std::uint64_t kValidationStream = 0x5851f42d4c957f2dULL;

std::vector<std::string> sorted_unique(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Split finish(std::vector<SampledUnit> units) {
  std::sort(units.begin(), units.end());
  return Split{std::move(units)};
}

std::size_t as_count(double k, std::string_view what) {
  if (!(k >= 1) || k != std::floor(k)) throw Error(std::string(what) + " must be a positive integer");
  return static_cast<std::size_t>(k);
}

// Dialog id -> domain of its first item, in file order.
std::map<std::string, std::string> dialog_domains(const NlgDataset& dataset) {
  std::map<std::string, std::string> out;
  for (const auto& item : dataset.items) out.emplace(item.dialog_id, item.domain);
  return out;
}

std::set<TemplateKey> act_slot_pairs(const NlgDataset& dataset, const std::set<std::string>* dialogs) {
  std::set<TemplateKey> out;
  for (const auto& item : dataset.items) {
    if (dialogs && !dialogs->contains(item.dialog_id)) continue;
    for (auto& key : required_templates(item.frames)) out.insert(std::move(key));
  }
  return out;
}

}  // namespace

Pcg32::Pcg32(std::uint64_t seed, std::uint64_t stream) : inc_((stream << 1U) | 1U) {
  next();
  state_ += seed;
  next();
}

std::uint32_t Pcg32::next() {
  const std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + inc_;
  const auto xorshifted = static_cast<std::uint32_t>(((old >> 18U) ^ old) >> 27U);
  const auto rot = static_cast<std::uint32_t>(old >> 59U);
  return (xorshifted >> rot) | (xorshifted << ((-rot) & 31U));
}

std::uint32_t Pcg32::below(std::uint32_t bound) {
  if (bound == 0) throw Error("Pcg32::below needs a positive bound");
  const std::uint32_t threshold = (0U - bound) % bound;
  for (;;) {
    const std::uint32_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::k_per_label: return "k_per_label";
    case Strategy::percent_dialogs: return "percent_dialogs";
    case Strategy::k_dialogs_per_domain: return "k_dialogs_per_domain";
  }
  return "?";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "k_per_label") return Strategy::k_per_label;
  if (s == "percent_dialogs") return Strategy::percent_dialogs;
  if (s == "k_dialogs_per_domain") return Strategy::k_dialogs_per_domain;
  throw Error("unknown sampling strategy '" + std::string(s) + "'");
}

void SamplePlan::validate() const {
  if (!(k_or_pct > 0)) throw Error("sample plan needs k_or_pct > 0");
  if (strategy == Strategy::percent_dialogs) {
    if (k_or_pct > 100) throw Error("percent plan needs 0 < pct <= 100");
  } else {
    as_count(k_or_pct, "k");
  }
}

std::vector<std::string> Split::ids() const {
  std::vector<std::string> out;
  out.reserve(units.size());
  for (const auto& u : units) out.push_back(u.id);
  return out;
}

std::map<std::string, std::size_t> Split::label_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& u : units) ++out[u.label];
  return out;
}

std::vector<SampledUnit> intent_units(const std::vector<IntentExample>& rows) {
  std::vector<SampledUnit> out;
  for (const auto& r : rows) out.push_back({r.id, r.intent});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SampledUnit> dialog_units(const DstDataset& dataset) {
  std::vector<SampledUnit> out;
  for (const auto& d : dataset.dialogs) out.push_back({d.id, ""});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SampledUnit> dialog_units(const NlgDataset& dataset) {
  std::vector<SampledUnit> out;
  for (const auto& [id, domain] : dialog_domains(dataset)) out.push_back({id, domain});
  return out;
}

std::string dataset_hash(const std::vector<SampledUnit>& units) {
  std::vector<std::string> ids;
  for (const auto& u : units) ids.push_back(u.id);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& id : sorted_unique(std::move(ids))) {
    for (const unsigned char c : id) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // separator outside the UTF-8 byte range of ids
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4U) out[static_cast<std::size_t>(i)] = kHex[h & 0xFU];
  return out;
}

Split sample_k_per_label(const std::vector<IntentExample>& rows, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error("k must be positive");
  std::map<std::string, std::vector<std::string>> by_label;
  for (const auto& r : rows) by_label[r.intent].push_back(r.id);

  Pcg32 rng(seed);
  std::vector<SampledUnit> picked;
  for (auto& [label, ids] : by_label) {
    ids = sorted_unique(std::move(ids));
    if (ids.size() < k)
      throw Error("label '" + label + "' has " + std::to_string(ids.size()) +
                  " instances, fewer than k=" + std::to_string(k));
    rng.shuffle(ids);
    for (std::size_t i = 0; i < k; ++i) picked.push_back({ids[i], label});
  }
  return finish(std::move(picked));
}

Split sample_percent_dialogs(const DstDataset& dataset, double pct, std::uint64_t seed) {
  if (!(pct > 0) || pct > 100) throw Error("percent must be in (0, 100]");
  auto units = dialog_units(dataset);
  // The epsilon keeps exact products such as 5% of 8420 from flooring down
  // through representation error.
  const auto n = static_cast<std::size_t>(
      std::floor(pct * static_cast<double>(units.size()) / 100.0 + 1e-9));
  if (n == 0)
    throw Error(std::to_string(pct) + "% of " + std::to_string(units.size()) +
                " dialogs selects no dialog");
  Pcg32 rng(seed);
  rng.shuffle(units);
  units.resize(n);
  return finish(std::move(units));
}

Split sample_k_dialogs_per_domain(const NlgDataset& dataset, std::size_t k, std::uint64_t seed,
                                  bool required_coverage, int max_attempts) {
  if (k == 0) throw Error("k must be positive");
  const auto domain_of = dialog_domains(dataset);
  std::map<std::string, std::vector<std::string>> by_domain;
  for (const auto& [id, domain] : domain_of) by_domain[domain].push_back(id);
  for (const auto& [domain, ids] : by_domain)
    if (ids.size() < k)
      throw Error("domain '" + domain + "' has " + std::to_string(ids.size()) +
                  " dialogs, fewer than k=" + std::to_string(k));

  const auto needed = act_slot_pairs(dataset, nullptr);
  Pcg32 rng(seed);
  std::vector<TemplateKey> uncovered;
  const int attempts = required_coverage ? std::max(1, max_attempts) : 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::vector<SampledUnit> picked;
    std::set<std::string> chosen;
    for (const auto& [domain, pool] : by_domain) {
      auto ids = pool;
      rng.shuffle(ids);
      for (std::size_t i = 0; i < k; ++i) {
        picked.push_back({ids[i], domain});
        chosen.insert(ids[i]);
      }
    }
    if (!required_coverage) return finish(std::move(picked));

    const auto have = act_slot_pairs(dataset, &chosen);
    uncovered.clear();
    std::set_difference(needed.begin(), needed.end(), have.begin(), have.end(),
                        std::back_inserter(uncovered));
    if (uncovered.empty()) return finish(std::move(picked));
  }
  std::string names;
  for (const auto& key : uncovered) names += (names.empty() ? "" : ", ") + key.to_string();
  throw Error("no " + std::to_string(k) + "-dialog-per-domain sample within " +
              std::to_string(attempts) + " attempts covers: " + names);
}

Split match_validation(const std::vector<SampledUnit>& validation, const Split& train,
                       std::uint64_t seed, bool per_label) {
  Pcg32 rng(seed, kValidationStream);
  std::vector<SampledUnit> pool(validation);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  if (!per_label) {
    if (pool.size() < train.size())
      throw Error("validation has " + std::to_string(pool.size()) + " units, fewer than the " +
                  std::to_string(train.size()) + " training units");
    rng.shuffle(pool);
    pool.resize(train.size());
    return finish(std::move(pool));
  }

  std::map<std::string, std::vector<SampledUnit>> by_label;
  for (auto& u : pool) by_label[u.label].push_back(u);
  std::vector<SampledUnit> picked;
  for (const auto& [label, count] : train.label_counts()) {
    auto& candidates = by_label[label];
    if (candidates.size() < count)
      throw Error("validation has " + std::to_string(candidates.size()) + " instances of '" +
                  label + "', fewer than the " + std::to_string(count) + " in training");
    rng.shuffle(candidates);
    picked.insert(picked.end(), candidates.begin(), candidates.begin() + static_cast<long>(count));
  }
  return finish(std::move(picked));
}

std::string split_manifest(const SamplePlan& plan, const std::string& data_hash,
                           const Split& train, const Split* validation) {
  nlohmann::json header{
      {"record", "header"},
      {"strategy", to_string(plan.strategy)},
      {"k_or_pct", plan.k_or_pct},
      {"seed", plan.seed},
      {"match_validation", plan.match_validation},
      {"required_coverage", plan.required_coverage},
      {"rounding", "floor"},
      {"generator", "pcg32-xsh-rr-64/32"},
      {"dataset_hash", data_hash},
      {"train_size", train.size()},
      {"validation_size", validation ? validation->size() : 0},
  };
  std::string out = dump_line(header) + "\n";
  auto emit = [&out](const char* split, const Split& s) {
    for (const auto& u : s.units)
      out += dump_line({{"split", split}, {"id", u.id}, {"label", u.label}}) + "\n";
  };
  emit("train", train);
  if (validation) emit("validation", *validation);
  return out;
}

}  // namespace cins
