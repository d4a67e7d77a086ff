#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "cins/schema.hpp"

namespace cins {

void to_json(nlohmann::json& j, const IntentSpec& v);
void from_json(const nlohmann::json& j, IntentSpec& v);
void to_json(nlohmann::json& j, const SlotSpec& v);
void from_json(const nlohmann::json& j, SlotSpec& v);
void to_json(nlohmann::json& j, const DomainSpec& v);
void from_json(const nlohmann::json& j, DomainSpec& v);
void to_json(nlohmann::json& j, const Ontology& v);
void from_json(const nlohmann::json& j, Ontology& v);
void to_json(nlohmann::json& j, const Turn& v);
void from_json(const nlohmann::json& j, Turn& v);
void to_json(nlohmann::json& j, const DialogHistory& v);
void from_json(const nlohmann::json& j, DialogHistory& v);
void to_json(nlohmann::json& j, const DialogState& v);
void from_json(const nlohmann::json& j, DialogState& v);
void to_json(nlohmann::json& j, const SlotValue& v);
void from_json(const nlohmann::json& j, SlotValue& v);
void to_json(nlohmann::json& j, const DialogActFrame& v);
void from_json(const nlohmann::json& j, DialogActFrame& v);
void to_json(nlohmann::json& j, const AblationMask& v);
void from_json(const nlohmann::json& j, AblationMask& v);
void to_json(nlohmann::json& j, const InstructionTemplate& v);
void from_json(const nlohmann::json& j, InstructionTemplate& v);
void to_json(nlohmann::json& j, const CompiledExample& v);
void from_json(const nlohmann::json& j, CompiledExample& v);

/// Reads a whole JSON document; errors carry the path.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Loads and validates an ontology file. Throws DataError listing every
/// violation when the ontology is invalid.
Ontology load_ontology(const std::filesystem::path& path);

/// Compact single-line dump used for every JSONL record we write.
std::string dump_line(const nlohmann::json& j);

}  // namespace cins
