#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "pokerl/assets.hpp"
#include "pokerl/curriculum.hpp"
#include "pokerl/error.hpp"
#include "pokerl/rng.hpp"
#include "pokerl/world.hpp"

namespace pokerl {

enum class PolicyKind : std::uint8_t { Random, SpamA, SpamNoop, Pacer, DiverseRandom, Solver };

inline constexpr std::array<std::pair<std::string_view, PolicyKind>, 6> kPolicyNames = {{
    {"random", PolicyKind::Random},
    {"spam_a", PolicyKind::SpamA},
    {"spam_noop", PolicyKind::SpamNoop},
    {"pacer", PolicyKind::Pacer},
    {"diverse_random", PolicyKind::DiverseRandom},
    {"solver", PolicyKind::Solver},
}};

inline std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (auto [n, k] : kPolicyNames)
    if (n == name) return k;
  return std::nullopt;
}

inline std::string_view policy_name(PolicyKind k) {
  for (auto [n, kind] : kPolicyNames)
    if (kind == k) return n;
  return "?";
}

/// Battle play that always picks Strike and clears text with A.
inline Action strike_policy(const BattleState& b) {
  if (b.phase == BattlePhase::ChooseMove && b.cursor != kMoveStrike) return Action::Up;
  return Action::A;
}

/// First action of a shortest walk to the sequence goal, or nullopt if none exists.
///
/// Grass is only entered when it is the goal (it starts a battle otherwise).
/// Ties break by the fixed expansion order Up, Down, Left, Right.
inline std::optional<Action> shortest_path_action(const MapSet& maps, const WorldState& state, const SequenceSpec& spec) {
  const MapTile start = state.tile();
  auto is_goal = [&](MapTile t) {
    if (spec.goal == Goal::ReachMap) return t.map == spec.goal_map;
    if (spec.goal == Goal::GrassOrEvent) return maps.at(t.map).kind_at({t.x, t.y}) == TileKind::Grass;
    return false;
  };
  std::map<MapTile, std::pair<MapTile, Direction>> parent;
  std::queue<MapTile> frontier;
  frontier.push(start);
  parent[start] = {start, Direction::Up};
  while (!frontier.empty()) {
    const MapTile cur = frontier.front();
    frontier.pop();
    if (cur != start && is_goal(cur)) {
      MapTile t = cur;
      while (parent[t].first != start) t = parent[t].first;
      return action_of(parent[t].second);
    }
    const TileMap& m = maps.at(cur.map);
    for (Direction d : {Direction::Up, Direction::Down, Direction::Left, Direction::Right}) {
      const TilePos next = step_towards({cur.x, cur.y}, d);
      if (!m.walkable(next)) continue;
      MapTile dest{cur.map, next.x, next.y};
      const Tile& tile = m.at(next);
      if (tile.kind == TileKind::Warp) dest = {tile.warp->map, tile.warp->pos.x, tile.warp->pos.y};
      if (maps.at(dest.map).kind_at({dest.x, dest.y}) == TileKind::Grass && !is_goal(dest)) continue;
      if (parent.try_emplace(dest, cur, d).second) frontier.push(dest);
    }
  }
  return std::nullopt;
}

/// Scripted behaviours. `act` is a pure function of (step index, state, seed).
struct ScriptedPolicy {
  PolicyKind kind = PolicyKind::Random;
  std::uint64_t seed = 0;

  Action act(std::uint64_t step, const WorldState& state, const Assets& assets, const SequenceSpec& spec) const {
    switch (kind) {
      case PolicyKind::Random:
        return static_cast<Action>(SplitMix64::seeded(seed, step).below(kNumActions));
      case PolicyKind::SpamA:
        return Action::A;
      case PolicyKind::SpamNoop:
        return Action::NoOp;
      case PolicyKind::Pacer:
        return pace(step, state, assets.maps);
      case PolicyKind::DiverseRandom:
        return diverse(step);
      case PolicyKind::Solver:
        if (state.battle) return strike_policy(*state.battle);
        return shortest_path_action(assets.maps, state, spec).value_or(Action::NoOp);
    }
    return Action::NoOp;
  }

 private:
  // Even steps step onto the first free neighbour (Down, Up, Left, Right order),
  // odd steps walk straight back.
  static Action pace(std::uint64_t step, const WorldState& state, const MapSet& maps) {
    if (state.battle) return step % 2 == 0 ? Action::Down : Action::Up;
    if (step % 2 == 1) return action_of(opposite(state.facing));
    const TileMap& m = maps.at(state.map_id);
    for (Direction d : {Direction::Down, Direction::Up, Direction::Left, Direction::Right}) {
      const TilePos p = step_towards(state.pos, d);
      if (m.walkable(p) && m.at(p).kind != TileKind::Warp && m.at(p).kind != TileKind::Grass) return action_of(d);
    }
    return Action::NoOp;
  }

  // Each block of seven steps is a fresh permutation of all seven actions, so
  // any eight consecutive actions contain at least four distinct values.
  Action diverse(std::uint64_t step) const {
    std::array<Action, kNumActions> perm = kAllActions;
    SplitMix64 rng = SplitMix64::seeded(seed ^ 0xD1CE5EEDULL, step / kNumActions);
    for (std::size_t i = perm.size() - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(static_cast<std::uint32_t>(i + 1))]);
    return perm[step % kNumActions];
  }
};

}  // namespace pokerl
