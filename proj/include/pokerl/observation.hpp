#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <unordered_set>

#include "pokerl/tilemap.hpp"
#include "pokerl/world.hpp"

namespace pokerl {

inline constexpr int kFrameRows = 72;
inline constexpr int kFrameCols = 80;
inline constexpr int kTilePx = 8;
inline constexpr int kViewRows = kFrameRows / kTilePx;  // 9
inline constexpr int kViewCols = kFrameCols / kTilePx;  // 10
inline constexpr int kPlayerViewRow = 4;
inline constexpr int kPlayerViewCol = 4;
inline constexpr int kStackDepth = 4;
inline constexpr int kObsChannels = 2 * kStackDepth;
inline constexpr std::size_t kFrameBytes = std::size_t{kFrameRows} * kFrameCols;
inline constexpr std::size_t kObsBytes = kObsChannels * kFrameBytes;

/// Tile intensities of the grayscale renderer.
namespace palette {
inline constexpr std::uint8_t kOutside = 0;
inline constexpr std::uint8_t kWall = 40;
inline constexpr std::uint8_t kNpc = 90;
inline constexpr std::uint8_t kGrass = 120;
inline constexpr std::uint8_t kEvent = 180;
inline constexpr std::uint8_t kFloor = 200;
inline constexpr std::uint8_t kWarp = 230;
inline constexpr std::uint8_t kPlayer = 255;
inline constexpr std::uint8_t kMaskOn = 255;

// battle screen
inline constexpr std::uint8_t kBattleBackground = 200;
inline constexpr std::uint8_t kBarTrack = 40;
inline constexpr std::uint8_t kBarFill = 255;
inline constexpr std::uint8_t kMenuSlot = 120;
inline constexpr std::uint8_t kCursor = 0;
}  // namespace palette

/// Layout of the schematic battle screen (pixel coordinates).
namespace battle_layout {
inline constexpr int kBarLeft = 8;
inline constexpr int kBarLength = 64;
inline constexpr int kBarHeight = 4;
inline constexpr int kEnemyBarTop = 8;
inline constexpr int kPlayerBarTop = 40;
inline constexpr int kMenuTop = 56;  // slot i occupies rows kMenuTop + 8i .. +5
inline constexpr int kMenuLeft = 16;
inline constexpr int kMenuWidth = 40;
inline constexpr int kCursorLeft = 8;
inline constexpr int kCursorSize = 6;
}  // namespace battle_layout

/// 72x80 row-major grayscale image.
struct Frame {
  std::array<std::uint8_t, kFrameBytes> px{};

  std::uint8_t at(int row, int col) const { return px[static_cast<std::size_t>(row * kFrameCols + col)]; }
  std::uint8_t& at(int row, int col) { return px[static_cast<std::size_t>(row * kFrameCols + col)]; }

  void fill_rect(int top, int left, int h, int w, std::uint8_t v) {
    for (int r = std::max(0, top); r < std::min(kFrameRows, top + h); ++r)
      for (int c = std::max(0, left); c < std::min(kFrameCols, left + w); ++c) at(r, c) = v;
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Map-global tile shown at viewport cell (row, col) for a player at `pos`.
constexpr TilePos viewport_tile(TilePos pos, int row, int col) noexcept {
  return {pos.x + col - kPlayerViewCol, pos.y + row - kPlayerViewRow};
}

constexpr std::uint8_t tile_intensity(TileKind k) noexcept {
  switch (k) {
    case TileKind::Floor: return palette::kFloor;
    case TileKind::Wall: return palette::kWall;
    case TileKind::Warp: return palette::kWarp;
    case TileKind::Grass: return palette::kGrass;
    case TileKind::EventTile: return palette::kEvent;
    case TileKind::Npc: return palette::kNpc;
  }
  return palette::kOutside;
}

/// Filled pixels of an HP bar: floor(length * hp / max).
constexpr int hp_bar_pixels(int hp, int hp_max) noexcept {
  if (hp_max <= 0) return 0;
  return battle_layout::kBarLength * std::clamp(hp, 0, hp_max) / hp_max;
}

namespace detail {

inline void render_battle(Frame& f, const BattleState& b) {
  using namespace battle_layout;
  f.px.fill(palette::kBattleBackground);
  auto bar = [&](int top, int hp, int hp_max) {
    f.fill_rect(top, kBarLeft, kBarHeight, kBarLength, palette::kBarTrack);
    f.fill_rect(top, kBarLeft, kBarHeight, hp_bar_pixels(hp, hp_max), palette::kBarFill);
  };
  bar(kEnemyBarTop, b.enemy_hp, b.enemy_hp_max);
  bar(kPlayerBarTop, b.player_hp, b.player_hp_max);
  for (int slot = 0; slot < 2; ++slot) f.fill_rect(kMenuTop + 8 * slot, kMenuLeft, kCursorSize, kMenuWidth, palette::kMenuSlot);
  f.fill_rect(kMenuTop + 8 * b.cursor, kCursorLeft, kCursorSize, kCursorSize, palette::kCursor);
}

}  // namespace detail

/// Grayscale view: a 9x10-tile window around the player, or the battle screen.
inline Frame render_frame(const WorldState& state, const MapSet& maps) {
  Frame f;
  if (state.battle) {
    detail::render_battle(f, *state.battle);
    return f;
  }
  const TileMap& map = maps.at(state.map_id);
  for (int row = 0; row < kViewRows; ++row) {
    for (int col = 0; col < kViewCols; ++col) {
      const TilePos t = viewport_tile(state.pos, row, col);
      const std::uint8_t v = map.in_bounds(t) ? tile_intensity(map.at(t).kind) : palette::kOutside;
      f.fill_rect(row * kTilePx, col * kTilePx, kTilePx, kTilePx, v);
    }
  }
  f.fill_rect(kPlayerViewRow * kTilePx, kPlayerViewCol * kTilePx, kTilePx, kTilePx, palette::kPlayer);
  return f;
}

/// Per-map visited tiles, stored in map-global coordinates.
struct VisitedMap {
  TilePos anchor;
  std::unordered_set<std::uint32_t> tiles;  // MapTile::packed() of (map, x, y)

  bool contains(MapId map, TilePos p) const {
    if (p.x < 0 || p.y < 0 || p.x > 255 || p.y > 255) return false;
    return tiles.contains(MapTile{map, p.x, p.y}.packed());
  }
  friend bool operator==(const VisitedMap&, const VisitedMap&) = default;
};

struct VisitedMaskStore {
  std::map<MapId, VisitedMap> maps;

  const VisitedMap* find(MapId id) const {
    auto it = maps.find(id);
    return it == maps.end() ? nullptr : &it->second;
  }
  std::size_t visited_count(MapId id) const {
    const VisitedMap* m = find(id);
    return m ? m->tiles.size() : 0;
  }
  friend bool operator==(const VisitedMaskStore&, const VisitedMaskStore&) = default;
};

/// Marks the current tile. The anchor is the first tile seen on each map.
inline void update_visited(VisitedMaskStore& store, const WorldState& state) {
  auto [it, inserted] = store.maps.try_emplace(state.map_id);
  if (inserted) it->second.anchor = state.pos;
  it->second.tiles.insert(state.tile().packed());
}

/// Binary mask in the same viewport as render_frame.
inline Frame rasterize_mask(const VisitedMaskStore& store, const WorldState& state) {
  Frame f;
  const VisitedMap* visited = store.find(state.map_id);
  if (!visited) return f;
  for (int row = 0; row < kViewRows; ++row)
    for (int col = 0; col < kViewCols; ++col)
      if (visited->contains(state.map_id, viewport_tile(state.pos, row, col)))
        f.fill_rect(row * kTilePx, col * kTilePx, kTilePx, kTilePx, palette::kMaskOn);
  return f;
}

struct FramePair {
  Frame gray;
  Frame mask;
  friend bool operator==(const FramePair&, const FramePair&) = default;
};

/// Channels-first 8x72x80 bytes: [gray(t-3), mask(t-3), ..., gray(t), mask(t)].
struct ObservationStack {
  std::array<std::uint8_t, kObsBytes> data{};

  std::span<const std::uint8_t> channel(int c) const {
    return std::span<const std::uint8_t>(data).subspan(static_cast<std::size_t>(c) * kFrameBytes, kFrameBytes);
  }
  std::uint8_t at(int c, int row, int col) const {
    return data[static_cast<std::size_t>(c) * kFrameBytes + static_cast<std::size_t>(row * kFrameCols + col)];
  }
  static constexpr std::array<int, 3> shape() { return {kObsChannels, kFrameRows, kFrameCols}; }

  friend bool operator==(const ObservationStack&, const ObservationStack&) = default;
};

/// Stacks the most recent pairs (oldest first). Missing older slots replicate the oldest pair.
inline ObservationStack stack(std::span<const FramePair> history) {
  ObservationStack obs;
  if (history.empty()) return obs;
  const std::size_t n = std::min<std::size_t>(history.size(), kStackDepth);
  const auto recent = history.subspan(history.size() - n);
  for (int slot = 0; slot < kStackDepth; ++slot) {
    const int missing = kStackDepth - static_cast<int>(n);
    const FramePair& p = recent[static_cast<std::size_t>(std::max(0, slot - missing))];
    auto* dst = obs.data.data() + static_cast<std::size_t>(2 * slot) * kFrameBytes;
    std::copy(p.gray.px.begin(), p.gray.px.end(), dst);
    std::copy(p.mask.px.begin(), p.mask.px.end(), dst + kFrameBytes);
  }
  return obs;
}

inline ObservationStack stack(const std::deque<FramePair>& history) {
  std::vector<FramePair> v(history.begin(), history.end());
  return stack(std::span<const FramePair>(v));
}

}  // namespace pokerl
