#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pokerl/error.hpp"
#include "pokerl/types.hpp"

namespace pokerl {

enum class TileKind : std::uint8_t { Floor, Wall, Warp, Grass, EventTile, Npc };

struct WarpTarget {
  MapId map = 0;
  TilePos pos;
  friend bool operator==(const WarpTarget&, const WarpTarget&) = default;
};

/// One grid cell. `warp` is set iff kind == Warp; `event_id` iff kind == EventTile.
struct Tile {
  TileKind kind = TileKind::Wall;
  std::optional<WarpTarget> warp;
  std::optional<int> event_id;
  friend bool operator==(const Tile&, const Tile&) = default;
};

constexpr bool is_walkable(TileKind k) noexcept {
  return k == TileKind::Floor || k == TileKind::Grass || k == TileKind::Warp ||
         k == TileKind::EventTile;
}

class TileMap {
 public:
  TileMap() = default;
  TileMap(MapId id, std::string name, int width, int height, std::vector<Tile> tiles)
      : id_(id), name_(std::move(name)), width_(width), height_(height), tiles_(std::move(tiles)) {}

  MapId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool in_bounds(TilePos p) const noexcept {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }
  const Tile& at(TilePos p) const { return tiles_.at(static_cast<std::size_t>(p.y * width_ + p.x)); }
  TileKind kind_at(TilePos p) const { return in_bounds(p) ? at(p).kind : TileKind::Wall; }
  bool walkable(TilePos p) const { return in_bounds(p) && is_walkable(at(p).kind); }

  const std::vector<Tile>& tiles() const noexcept { return tiles_; }

  friend bool operator==(const TileMap&, const TileMap&) = default;

 private:
  MapId id_ = 0;
  std::string name_;
  int width_ = 0;
  int height_ = 0;
  std::vector<Tile> tiles_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class Int>
Int parse_int(std::string_view s, std::string_view what, int line_no) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad " + std::string(what) + " '" +
                     std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

}  // namespace detail

/// Parses one ASCII map document.
///
/// Header lines (`map`, `size`, `warp`, `event`) come first; `#` comment and
/// blank lines are skipped. The grid follows as exactly `h` rows of `w`
/// characters. Warp targets on other maps are checked later by MapSet.
inline TileMap load_tilemap(std::string_view text) {
  std::optional<int> id;
  std::string name;
  std::optional<std::pair<int, int>> size;
  struct WarpDecl { TilePos at; WarpTarget target; int line; };
  struct EventDecl { TilePos at; int event_id; int line; };
  std::vector<WarpDecl> warps;
  std::vector<EventDecl> events;
  std::vector<std::pair<std::string_view, int>> rows;

  // Once `size` is known, the first space-free line of exactly `w` characters
  // starts the grid; every later non-empty line is a row. Other '#' lines are comments.
  auto is_grid_row = [&](std::string_view line) {
    return size && line.size() == static_cast<std::size_t>(size->first) &&
           line.find_first_of(" \t") == std::string_view::npos;
  };
  int line_no = 0;
  for (std::string_view line : detail::lines_of(text)) {
    ++line_no;
    if (!rows.empty() || is_grid_row(line)) {
      if (!line.empty()) rows.emplace_back(line, line_no);
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    auto f = detail::split_ws(line);
    auto expect = [&](std::size_t n) {
      if (f.size() != n)
        throw ParseError("line " + std::to_string(line_no) + ": '" + std::string(f[0]) +
                         "' expects " + std::to_string(n - 1) + " fields");
    };
    if (f[0] == "map") {
      expect(3);
      id = detail::parse_int<int>(f[1], "map id", line_no);
      if (*id < 0 || *id > 255) throw ParseError("line " + std::to_string(line_no) + ": map id out of range");
      name = std::string(f[2]);
    } else if (f[0] == "size") {
      expect(3);
      size = {detail::parse_int<int>(f[1], "width", line_no), detail::parse_int<int>(f[2], "height", line_no)};
      if (size->first < 1 || size->second < 1 || size->first > 255 || size->second > 255)
        throw ValidationError("line " + std::to_string(line_no) + ": size must be 1..255");
    } else if (f[0] == "warp") {
      expect(6);
      WarpDecl w;
      w.at = {detail::parse_int<int>(f[1], "x", line_no), detail::parse_int<int>(f[2], "y", line_no)};
      int target = detail::parse_int<int>(f[3], "target map", line_no);
      if (target < 0 || target > 255) throw ParseError("line " + std::to_string(line_no) + ": target map out of range");
      w.target.map = static_cast<MapId>(target);
      w.target.pos = {detail::parse_int<int>(f[4], "tx", line_no), detail::parse_int<int>(f[5], "ty", line_no)};
      w.line = line_no;
      warps.push_back(w);
    } else if (f[0] == "event") {
      expect(4);
      events.push_back({{detail::parse_int<int>(f[1], "x", line_no), detail::parse_int<int>(f[2], "y", line_no)},
                        detail::parse_int<int>(f[3], "event id", line_no), line_no});
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown directive '" + std::string(f[0]) + "'");
    }
  }

  if (!id) throw ParseError("missing 'map' line");
  if (!size) throw ParseError("missing 'size' line");
  const auto [w, h] = *size;
  if (static_cast<int>(rows.size()) != h)
    throw ParseError("expected " + std::to_string(h) + " grid rows, found " + std::to_string(rows.size()));

  std::vector<Tile> tiles(static_cast<std::size_t>(w * h));
  for (int y = 0; y < h; ++y) {
    auto [row, row_line] = rows[static_cast<std::size_t>(y)];
    if (static_cast<int>(row.size()) != w)
      throw ParseError("line " + std::to_string(row_line) + ": ragged row (width " +
                       std::to_string(row.size()) + ", expected " + std::to_string(w) + ")");
    for (int x = 0; x < w; ++x) {
      Tile& t = tiles[static_cast<std::size_t>(y * w + x)];
      switch (row[static_cast<std::size_t>(x)]) {
        case '#': t.kind = TileKind::Wall; break;
        case '.': t.kind = TileKind::Floor; break;
        case 'G': t.kind = TileKind::Grass; break;
        case 'W': t.kind = TileKind::Warp; break;
        case 'E': t.kind = TileKind::EventTile; break;
        case 'N': t.kind = TileKind::Npc; break;
        default:
          throw ParseError("line " + std::to_string(row_line) + ": bad tile character '" +
                           std::string(1, row[static_cast<std::size_t>(x)]) + "'");
      }
    }
  }

  auto in_bounds = [&](TilePos p) { return p.x >= 0 && p.y >= 0 && p.x < w && p.y < h; };
  auto tile_at = [&](TilePos p) -> Tile& { return tiles[static_cast<std::size_t>(p.y * w + p.x)]; };

  for (const auto& d : warps) {
    if (!in_bounds(d.at) || tile_at(d.at).kind != TileKind::Warp)
      throw ValidationError("line " + std::to_string(d.line) + ": warp declaration not on a 'W' tile");
    if (tile_at(d.at).warp) throw ValidationError("line " + std::to_string(d.line) + ": duplicate warp declaration");
    tile_at(d.at).warp = d.target;
  }
  for (const auto& d : events) {
    if (!in_bounds(d.at) || tile_at(d.at).kind != TileKind::EventTile)
      throw ValidationError("line " + std::to_string(d.line) + ": event declaration not on an 'E' tile");
    if (tile_at(d.at).event_id) throw ValidationError("line " + std::to_string(d.line) + ": duplicate event declaration");
    tile_at(d.at).event_id = d.event_id;
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Tile& t = tile_at({x, y});
      const std::string where = "(" + std::to_string(x) + "," + std::to_string(y) + ")";
      if (t.kind == TileKind::Warp && !t.warp) throw ValidationError("warp tile " + where + " has no warp declaration");
      if (t.kind == TileKind::EventTile && !t.event_id)
        throw ValidationError("event tile " + where + " has no event declaration");
      const bool border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
      if (border && t.kind != TileKind::Wall && t.kind != TileKind::Warp)
        throw ValidationError("border tile " + where + " must be '#' or 'W'");
    }
  }
  return TileMap(static_cast<MapId>(*id), std::move(name), w, h, std::move(tiles));
}

/// The set of maps a world runs on, keyed by map id.
class MapSet {
 public:
  MapSet() = default;

  /// Adds a map; throws ValidationError on a duplicate id.
  void add(TileMap m) {
    const MapId id = m.id();
    if (!maps_.emplace(id, std::move(m)).second)
      throw ValidationError("duplicate map id " + std::to_string(id));
  }

  /// Checks that every warp lands in-bounds on a non-Wall tile of an existing map.
  void validate() const {
    for (const auto& [id, m] : maps_) {
      for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
          const Tile& t = m.at({x, y});
          if (!t.warp) continue;
          const std::string where = m.name() + " (" + std::to_string(x) + "," + std::to_string(y) + ")";
          const TileMap* target = find(t.warp->map);
          if (!target) throw ValidationError("warp at " + where + " targets missing map " + std::to_string(t.warp->map));
          if (!target->in_bounds(t.warp->pos)) throw ValidationError("warp at " + where + " lands out of bounds");
          if (target->at(t.warp->pos).kind == TileKind::Wall) throw ValidationError("warp at " + where + " lands on a wall");
        }
      }
    }
  }

  const TileMap* find(MapId id) const {
    auto it = maps_.find(id);
    return it == maps_.end() ? nullptr : &it->second;
  }
  const TileMap& at(MapId id) const {
    if (const TileMap* m = find(id)) return *m;
    throw ValidationError("unknown map id " + std::to_string(id));
  }
  const TileMap* find_by_name(std::string_view name) const {
    for (const auto& [id, m] : maps_)
      if (m.name() == name) return &m;
    return nullptr;
  }

  const std::map<MapId, TileMap>& maps() const noexcept { return maps_; }

 private:
  std::map<MapId, TileMap> maps_;
};

}  // namespace pokerl
