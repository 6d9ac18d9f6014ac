#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pokerl {

enum class Direction : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

/// Agent actions. The integer values are the wire encoding.
enum class Action : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3, A = 4, B = 5, NoOp = 6 };

inline constexpr int kNumActions = 7;

inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Up, Action::Down, Action::Left, Action::Right, Action::A, Action::B, Action::NoOp};

inline constexpr std::array<std::string_view, kNumActions> kActionNames = {
    "up", "down", "left", "right", "a", "b", "noop"};

constexpr int index_of(Action a) noexcept { return static_cast<int>(a); }

constexpr bool is_movement(Action a) noexcept { return index_of(a) < 4; }

constexpr Direction direction_of(Action a) noexcept {
  return static_cast<Direction>(static_cast<std::uint8_t>(a));
}

constexpr Action action_of(Direction d) noexcept {
  return static_cast<Action>(static_cast<std::uint8_t>(d));
}

constexpr Direction opposite(Direction d) noexcept {
  switch (d) {
    case Direction::Up: return Direction::Down;
    case Direction::Down: return Direction::Up;
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
  }
  return d;
}

/// Action from its wire index; nullopt outside 0..6.
constexpr std::optional<Action> action_from_index(long long i) noexcept {
  if (i < 0 || i >= kNumActions) return std::nullopt;
  return static_cast<Action>(i);
}

inline std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "up") return Direction::Up;
  if (s == "down") return Direction::Down;
  if (s == "left") return Direction::Left;
  if (s == "right") return Direction::Right;
  return std::nullopt;
}

inline std::string_view direction_name(Direction d) {
  static constexpr std::array<std::string_view, 4> names = {"up", "down", "left", "right"};
  return names[static_cast<std::size_t>(d)];
}

struct TilePos {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(TilePos, TilePos) = default;
};

constexpr TilePos step_towards(TilePos p, Direction d) noexcept {
  switch (d) {
    case Direction::Up: return {p.x, p.y - 1};
    case Direction::Down: return {p.x, p.y + 1};
    case Direction::Left: return {p.x - 1, p.y};
    case Direction::Right: return {p.x + 1, p.y};
  }
  return p;
}

using MapId = std::uint8_t;

/// A tile on a specific map.
struct MapTile {
  MapId map = 0;
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(MapTile, MapTile) = default;
  friend constexpr auto operator<=>(MapTile, MapTile) = default;

  /// Packed form for hashing: map in bits 16..23, x in 8..15, y in 0..7.
  constexpr std::uint32_t packed() const noexcept {
    return (std::uint32_t{map} << 16) | (static_cast<std::uint32_t>(x & 0xFF) << 8) |
           static_cast<std::uint32_t>(y & 0xFF);
  }
};

struct MapTileHash {
  std::size_t operator()(MapTile t) const noexcept { return t.packed(); }
};

}  // namespace pokerl
