#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cins/schema.hpp"

namespace cins::testing {

inline std::filesystem::path data_dir() { return CINS_DATA_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return data_dir() / "fixtures" / name; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    do {
      path_ = base / ("cins-test-" + std::to_string(rd()) + std::to_string(rd()));
    } while (std::filesystem::exists(path_));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Two small domains: one for intents, one for slots.
inline Ontology tiny_ontology() {
  Ontology o;
  o.name = "tiny";
  DomainSpec bank{"banking",
                  {{"transfer", "Move money between accounts"},
                   {"balance", "Tell the balance of an account"},
                   {"pay_bill", "Pay a bill"}},
                  {}};
  DomainSpec hotel{"hotel", {}, {}};
  hotel.slots.push_back({"hotel", "area", "area or place of the hotel", SlotKind::categorical,
                         {"north", "south", "east", "west", "centre"}});
  hotel.slots.push_back({"hotel", "name", "name of the hotel", SlotKind::open, {}});
  hotel.slots.push_back({"hotel", "parking", "whether the hotel has parking", SlotKind::boolean, {}});
  o.domains = {bank, hotel};
  return o;
}

inline std::string random_word(std::mt19937_64& rng, std::size_t min_len = 1, std::size_t max_len = 8) {
  static constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, kLetters.size() - 1);
  std::string out;
  for (std::size_t i = len(rng); i > 0; --i) out.push_back(kLetters[pick(rng)]);
  return out;
}

// Writes {"id","prediction"} rows equal to the targets of a compiled split.
inline std::filesystem::path write_gold_predictions(const std::filesystem::path& cell_dir,
                                                    const std::string& split = "test") {
  std::ifstream in(cell_dir / (split + ".jsonl"));
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = nlohmann::json::parse(line);
    out += nlohmann::json{{"id", row.at("id")}, {"prediction", row.at("target_text")}}.dump() + "\n";
  }
  const auto path = cell_dir / ("gold." + split + ".jsonl");
  write_file(path, out);
  return path;
}

// FNV-1a 64 over relative paths and contents of every regular file.
inline std::string tree_digest(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(std::filesystem::relative(e.path(), root));
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& bytes) {
    for (const unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto& f : files) {
    feed(f.generic_string());
    feed(read_file(root / f));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cins::testing
