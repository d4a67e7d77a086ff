#pragma once

// Dataset loaders. Each family has small adapters that normalize a native
// layout into one in-memory row schema:
//
//   intent  .jsonl  {"split", "text", "intent", "domain"?} per line
//           .json   OOS layout {"train": [[text, label], ...], "val": ..., "test": ...}
//   DST     .json   {"dialogs": [{"id", "turns": [{"speaker", "utterance", "state"?}]}]}
//           .json   TRADE-style list of {"dialogue_idx", "dialogue": [{"system_transcript",
//                   "transcript", "belief_state": [{"slots": [["hotel-area", "east"]]}]}]}
//   NLG     .jsonl  {"id", "dialog_id", "domain", "acts", "reference"} per line
//           .json   list of the same objects
//
// Every failure is a DataError whose location names the file and row.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cins/acts.hpp"
#include "cins/compiler.hpp"
#include "cins/schema.hpp"

namespace cins {

inline constexpr std::string_view kOutOfScopeIntent = "oos";

struct LoadStats {
  std::size_t rows = 0;
  std::size_t kept = 0;
  std::size_t dropped_by_domain = 0;
  std::size_t dropped_out_of_scope = 0;
  std::size_t state_entries_dropped = 0;

  bool operator==(const LoadStats&) const = default;
};

struct IntentDataset {
  // Keys: "train", "validation", "test".
  std::map<std::string, std::vector<IntentExample>> splits;
  std::vector<std::string> domains;
  LoadStats stats;

  const std::vector<IntentExample>& split(const std::string& name) const;
  bool operator==(const IntentDataset&) const = default;
};

IntentDataset load_intent_dataset(const std::filesystem::path& path, const Ontology& ontology,
                                  const std::vector<std::string>& domain_filter);

struct DstDialog {
  std::string id;
  std::vector<Turn> turns;
  std::vector<DialogState> states;  // one per user turn

  bool operator==(const DstDialog&) const = default;
};

struct DstDataset {
  std::vector<DstDialog> dialogs;
  std::vector<std::string> domains;
  LoadStats stats;

  bool operator==(const DstDataset&) const = default;
};

DstDataset load_dst_dataset(const std::filesystem::path& path, const Ontology& ontology,
                            const std::vector<std::string>& domain_filter);

/// One record per user turn: (C_t, gold state at t).
std::vector<DstTurn> dst_turns(const DstDialog& dialog);
std::vector<DstTurn> dst_turns(const DstDataset& dataset);

/// Slots of the given domains, in ontology order.
std::vector<SlotSpec> in_scope_slots(const Ontology& ontology,
                                     const std::vector<std::string>& domains);

struct NlgDataset {
  std::vector<NlgItem> items;
  LoadStats stats;

  bool operator==(const NlgDataset&) const = default;
};

/// When `table` is given every item must be renderable with it.
NlgDataset load_nlg_dataset(const std::filesystem::path& path, const TemplateTable* table);

}  // namespace cins
