#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pokerl/curriculum.hpp"
#include "pokerl/embedded_assets.hpp"
#include "pokerl/error.hpp"
#include "pokerl/tilemap.hpp"
#include "pokerl/world.hpp"

namespace pokerl {

/// Everything a world needs besides its state: map data, sequence anchors, battle numbers.
struct Assets {
  MapSet maps;
  std::vector<SequenceSpec> sequences;
  BattleRules battle;

  const SequenceSpec& sequence(int id) const {
    for (const auto& s : sequences)
      if (s.id == id) return s;
    throw UnknownSequence(id);
  }

  MapId map_id(std::string_view name) const {
    if (const TileMap* m = maps.find_by_name(name)) return m->id();
    throw ValidationError("no map named " + std::string(name));
  }

  void validate() const {
    maps.validate();
    for (const auto& s : sequences) validate_sequence(s, maps);
  }
};

inline Assets assets_from_text(const std::vector<std::string_view>& map_docs, std::string_view sequences_doc) {
  Assets a;
  for (auto doc : map_docs) a.maps.add(load_tilemap(doc));
  a.sequences = parse_sequences(sequences_doc);
  a.validate();
  return a;
}

/// Map and sequence data compiled into the binary from data/.
inline const Assets& default_assets() {
  static const Assets assets = [] {
    std::vector<std::string_view> docs(embedded::kMapDocuments.begin(), embedded::kMapDocuments.end());
    return assets_from_text(docs, embedded::kSequencesDocument);
  }();
  return assets;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Loads `maps/*.map` and `sequences.cfg` from a data directory.
inline Assets load_assets(const std::filesystem::path& dir) {
  std::vector<std::string> texts;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir / "maps"))
    if (e.path().extension() == ".map") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) texts.push_back(detail::read_file(f));
  const std::string seq = detail::read_file(dir / "sequences.cfg");
  std::vector<std::string_view> views(texts.begin(), texts.end());
  return assets_from_text(views, seq);
}

/// Canonical initial state for a curriculum sequence.
inline WorldState reset_world(int sequence, std::uint64_t seed, const Assets& assets = default_assets()) {
  return initial_state(assets.sequence(sequence), seed, assets.battle);
}

}  // namespace pokerl
