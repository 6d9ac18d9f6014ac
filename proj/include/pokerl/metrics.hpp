#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>
#include <vector>

#include "pokerl/curriculum.hpp"
#include "pokerl/error.hpp"
#include "pokerl/shaping.hpp"
#include "pokerl/tilemap.hpp"
#include "pokerl/types.hpp"
#include "pokerl/world.hpp"

namespace pokerl {

using ActionCounts = std::array<std::uint64_t, kNumActions>;

struct StepRecord {
  std::uint64_t step = 0;
  Action action = Action::NoOp;
  MapTile tile;  // position after the step
  RewardBreakdown reward;
  std::uint64_t pattern_hits_delta = 0;
  std::uint64_t loop_hits_delta = 0;
  EventSet events;
  EpisodeOutcome outcome = EpisodeOutcome::Running;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeLog {
  int sequence = 1;
  std::uint64_t seed = 0;
  MapTile start;
  std::vector<StepRecord> steps;

  EpisodeOutcome outcome() const { return steps.empty() ? EpisodeOutcome::Running : steps.back().outcome; }
  double total_reward() const {
    double t = 0.0;
    for (const auto& s : steps) t += s.reward.total();
    return t;
  }
  std::uint64_t pattern_hits() const {
    std::uint64_t n = 0;
    for (const auto& s : steps) n += s.pattern_hits_delta;
    return n;
  }
  std::uint64_t loop_hits() const {
    std::uint64_t n = 0;
    for (const auto& s : steps) n += s.loop_hits_delta;
    return n;
  }

  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

inline ActionCounts action_counts(const EpisodeLog& log) {
  ActionCounts c{};
  for (const auto& s : log.steps) ++c[static_cast<std::size_t>(index_of(s.action))];
  return c;
}

/// H = -sum p(a) log2 p(a) over the seven actions, with 0 log 0 = 0.
inline double shannon_entropy(const ActionCounts& counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (total == 0.0) throw EmptyCounts();
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return std::max(0.0, h);
}

struct ActionDistribution {
  std::array<double, kNumActions> fraction{};
  double movement = 0.0;  // Up/Down/Left/Right
  double ab = 0.0;        // A + B
  double noop = 0.0;
};

inline ActionDistribution action_distribution(const ActionCounts& counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw EmptyCounts();
  ActionDistribution d;
  for (std::size_t i = 0; i < counts.size(); ++i)
    d.fraction[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  auto frac = [&](std::uint64_t n) { return static_cast<double>(n) / static_cast<double>(total); };
  d.movement = frac(counts[0] + counts[1] + counts[2] + counts[3]);
  d.ab = frac(counts[4] + counts[5]);
  d.noop = frac(counts[6]);
  return d;
}

/// Occupancy count of each tile over the logged (post-step) positions.
inline std::unordered_map<MapTile, std::uint64_t, MapTileHash> tile_visit_counts(const EpisodeLog& log) {
  std::unordered_map<MapTile, std::uint64_t, MapTileHash> counts;
  for (const auto& s : log.steps) ++counts[s.tile];
  return counts;
}

inline constexpr std::uint64_t kLoopTileVisits = 10;
inline constexpr std::uint64_t kLoopPatternHits = 20;

/// Loop episode: some tile occupied more than 10 times, or pattern detection fired more than 20 times.
inline bool classify_loop_episode(const EpisodeLog& log) {
  for (const auto& [tile, n] : tile_visit_counts(log))
    if (n > kLoopTileVisits) return true;
  return log.pattern_hits() > kLoopPatternHits;
}

/// Standable tiles reachable from `start` by walking and warping, grouped by map.
inline std::map<MapId, std::set<std::pair<int, int>>> reachable_tiles(const MapSet& maps, MapTile start) {
  std::map<MapId, std::set<std::pair<int, int>>> seen;
  std::queue<MapTile> frontier;
  seen[start.map].insert({start.x, start.y});
  frontier.push(start);
  while (!frontier.empty()) {
    const MapTile cur = frontier.front();
    frontier.pop();
    const TileMap& m = maps.at(cur.map);
    for (Direction d : {Direction::Up, Direction::Down, Direction::Left, Direction::Right}) {
      const TilePos next = step_towards({cur.x, cur.y}, d);
      if (!m.walkable(next)) continue;
      MapTile dest{cur.map, next.x, next.y};
      if (const Tile& t = m.at(next); t.kind == TileKind::Warp) dest = {t.warp->map, t.warp->pos.x, t.warp->pos.y};
      if (seen[dest.map].insert({dest.x, dest.y}).second) frontier.push(dest);
    }
  }
  return seen;
}

struct ExplorationStats {
  std::uint64_t unique_positions = 0;
  double revisit_ratio = 1.0;
  double exploration_ratio = 0.0;
  MapId primary_map = 0;
};

/// Coverage statistics. The primary map is where most steps were spent (lowest id on ties).
inline ExplorationStats exploration_stats(const EpisodeLog& log, const MapSet& maps) {
  ExplorationStats st;
  st.primary_map = log.start.map;
  if (log.steps.empty()) return st;

  std::set<MapTile> unique;
  std::map<MapId, std::uint64_t> steps_on;
  for (const auto& s : log.steps) {
    unique.insert(s.tile);
    ++steps_on[s.tile.map];
  }
  st.unique_positions = unique.size();
  st.revisit_ratio = static_cast<double>(log.steps.size()) / static_cast<double>(unique.size());

  std::uint64_t best = 0;
  for (const auto& [map, n] : steps_on)
    if (n > best) { best = n; st.primary_map = map; }

  const auto reach = reachable_tiles(maps, log.start);
  auto it = reach.find(st.primary_map);
  if (it == reach.end() || it->second.empty()) return st;
  std::uint64_t covered = 0;
  for (const auto& t : unique)
    if (t.map == st.primary_map && it->second.contains({t.x, t.y})) ++covered;
  st.exploration_ratio = static_cast<double>(covered) / static_cast<double>(it->second.size());
  return st;
}

}  // namespace pokerl
