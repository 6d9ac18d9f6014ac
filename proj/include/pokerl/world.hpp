#pragma once

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "pokerl/error.hpp"
#include "pokerl/rng.hpp"
#include "pokerl/tilemap.hpp"
#include "pokerl/types.hpp"

namespace pokerl {

/// RAM addresses exposed by memory_view (Red/Blue WRAM layout).
namespace ram {
inline constexpr std::uint16_t kPlayerY = 0xD361;
inline constexpr std::uint16_t kPlayerX = 0xD362;
inline constexpr std::uint16_t kMapId = 0xD35E;
inline constexpr std::uint16_t kPartyCount = 0xD163;
inline constexpr std::uint16_t kBattleState = 0xD057;
inline constexpr std::uint16_t kPartyHp = 0xD16C;
}  // namespace ram

/// Numbers for the one-on-one battle. Defaults approximate two level-5 starters.
struct BattleRules {
  int player_hp_max = 20;
  int enemy_hp_max = 19;
  int strike_base = 4;
  int enemy_base = 3;
  int variance = 1;  // damage is base + uniform{-variance..+variance}
  int growl_drop = 1;
  int min_enemy_damage = 1;
  int text_presses = 2;
  friend bool operator==(const BattleRules&, const BattleRules&) = default;
};

enum class BattlePhase : std::uint8_t { ChooseMove, ResolveText };
enum class BattleOutcome : std::uint8_t { Ongoing, Won, Lost };

inline constexpr int kMoveStrike = 0;
inline constexpr int kMoveGrowl = 1;

struct BattleState {
  BattlePhase phase = BattlePhase::ChooseMove;
  int cursor = kMoveStrike;
  int player_hp = 0;
  int player_hp_max = 0;
  int enemy_hp = 0;
  int enemy_hp_max = 0;
  int pending_text = 0;
  int enemy_attack_drop = 0;  // accumulated Growl effect
  BattleOutcome outcome = BattleOutcome::Ongoing;

  static BattleState fresh(const BattleRules& r) {
    BattleState b;
    b.player_hp = b.player_hp_max = r.player_hp_max;
    b.enemy_hp = b.enemy_hp_max = r.enemy_hp_max;
    return b;
  }

  friend bool operator==(const BattleState&, const BattleState&) = default;
};

struct WorldState {
  MapId map_id = 0;
  TilePos pos;
  Direction facing = Direction::Down;
  int party_count = 0;
  std::optional<BattleState> battle;
  SplitMix64 rng;
  std::uint64_t step_count = 0;
  std::set<int> flags;              // scripted events triggered this episode
  std::bitset<256> maps_visited;    // maps entered this episode, including the start map

  bool in_battle() const noexcept { return battle.has_value(); }
  MapTile tile() const noexcept { return {map_id, pos.x, pos.y}; }

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// What happened during one transition.
struct EventSet {
  bool moved = false;
  bool new_tile = false;
  std::optional<MapId> entered_map;
  bool first_map_entry = false;
  bool entered_grass = false;
  bool battle_started = false;
  bool battle_won = false;
  bool battle_lost = false;
  std::optional<int> scripted_event;
  double distance_moved = 0.0;

  friend bool operator==(const EventSet&, const EventSet&) = default;
};

struct Transition {
  WorldState state;
  EventSet events;
};

namespace detail {

inline int roll_damage(SplitMix64& rng, int base, int variance) {
  const auto span = static_cast<std::uint32_t>(2 * variance + 1);
  return base + static_cast<int>(rng.below(span)) - variance;
}

}  // namespace detail

/// Advances an in-progress battle by one button press.
inline Transition battle_step(const WorldState& state, Action action, const BattleRules& rules = {}) {
  if (!state.in_battle()) throw NotInBattle();
  Transition t{state, {}};
  WorldState& s = t.state;
  BattleState& b = *s.battle;
  ++s.step_count;

  if (b.phase == BattlePhase::ChooseMove) {
    if (action == Action::Up) {
      b.cursor = kMoveStrike;
    } else if (action == Action::Down) {
      b.cursor = kMoveGrowl;
    } else if (action == Action::A) {
      // Player always moves first; the enemy answers only if it is still standing.
      if (b.cursor == kMoveStrike) {
        const int dmg = detail::roll_damage(s.rng, rules.strike_base, rules.variance);
        b.enemy_hp = std::max(0, b.enemy_hp - std::max(0, dmg));
      } else {
        b.enemy_attack_drop += rules.growl_drop;
      }
      if (b.enemy_hp > 0) {
        const int raw = detail::roll_damage(s.rng, rules.enemy_base, rules.variance) - b.enemy_attack_drop;
        b.player_hp = std::max(0, b.player_hp - std::max(rules.min_enemy_damage, raw));
      }
      // Simultaneous faint resolves as a loss.
      if (b.player_hp == 0) {
        b.outcome = BattleOutcome::Lost;
      } else if (b.enemy_hp == 0) {
        b.outcome = BattleOutcome::Won;
      }
      b.phase = BattlePhase::ResolveText;
      b.pending_text = rules.text_presses;
    }
    return t;
  }

  if (action != Action::A) return t;
  if (b.pending_text > 0) --b.pending_text;
  if (b.pending_text > 0) return t;
  if (b.outcome == BattleOutcome::Ongoing) {
    b.phase = BattlePhase::ChooseMove;
    return t;
  }
  t.events.battle_won = b.outcome == BattleOutcome::Won;
  t.events.battle_lost = b.outcome == BattleOutcome::Lost;
  s.battle.reset();
  return t;
}

/// One agent action. Movement turns and steps atomically; A interacts with
/// the faced tile; everything else only advances the step counter.
inline Transition step_world(const MapSet& maps, const WorldState& state, Action action,
                             const BattleRules& rules = {}) {
  if (state.in_battle()) return battle_step(state, action, rules);

  Transition t{state, {}};
  WorldState& s = t.state;
  EventSet& ev = t.events;
  ++s.step_count;
  const TileMap& map = maps.at(s.map_id);

  if (is_movement(action)) {
    s.facing = direction_of(action);
    const TilePos dest = step_towards(s.pos, s.facing);
    if (!map.walkable(dest)) return t;

    const Tile& tile = map.at(dest);
    if (tile.kind == TileKind::Warp) {
      s.map_id = tile.warp->map;
      s.pos = tile.warp->pos;
      ev.entered_map = s.map_id;
      ev.first_map_entry = !s.maps_visited.test(s.map_id);
      s.maps_visited.set(s.map_id);
      ev.distance_moved = 0.0;
    } else {
      ev.distance_moved = std::hypot(double(dest.x - s.pos.x), double(dest.y - s.pos.y));
      s.pos = dest;
    }
    ev.moved = true;
    ev.new_tile = true;

    if (maps.at(s.map_id).kind_at(s.pos) == TileKind::Grass) {
      ev.entered_grass = true;
      ev.battle_started = true;
      s.battle = BattleState::fresh(rules);
    }
    return t;
  }

  if (action == Action::A) {
    const TilePos faced = step_towards(s.pos, s.facing);
    if (map.in_bounds(faced)) {
      const Tile& tile = map.at(faced);
      if (tile.kind == TileKind::EventTile) {
        ev.scripted_event = *tile.event_id;
        s.flags.insert(*tile.event_id);
      }
    }
  }
  return t;
}

using MemoryView = std::map<std::uint16_t, std::uint8_t>;

/// The six RAM bytes the environment reads from a real cartridge.
inline MemoryView memory_view(const WorldState& s) {
  auto byte = [](long long v) { return static_cast<std::uint8_t>(std::clamp<long long>(v, 0, 255)); };
  return {
      {ram::kPlayerY, byte(s.pos.y)},
      {ram::kPlayerX, byte(s.pos.x)},
      {ram::kMapId, s.map_id},
      {ram::kPartyCount, byte(s.party_count)},
      {ram::kBattleState, static_cast<std::uint8_t>(s.in_battle() ? 1 : 0)},
      {ram::kPartyHp, byte(s.in_battle() ? s.battle->player_hp : 0)},
  };
}

}  // namespace pokerl
