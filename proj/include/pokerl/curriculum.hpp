#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pokerl/error.hpp"
#include "pokerl/tilemap.hpp"
#include "pokerl/world.hpp"

namespace pokerl {

enum class Goal : std::uint8_t { ReachMap, GrassOrEvent, WinBattle };

enum class EpisodeOutcome : std::uint8_t { Running, Success, Timeout, Loss };

inline std::string_view outcome_name(EpisodeOutcome o) {
  switch (o) {
    case EpisodeOutcome::Running: return "running";
    case EpisodeOutcome::Success: return "success";
    case EpisodeOutcome::Timeout: return "timeout";
    case EpisodeOutcome::Loss: return "loss";
  }
  return "?";
}

inline std::optional<EpisodeOutcome> parse_outcome(std::string_view s) {
  for (auto o : {EpisodeOutcome::Running, EpisodeOutcome::Success, EpisodeOutcome::Timeout, EpisodeOutcome::Loss})
    if (outcome_name(o) == s) return o;
  return std::nullopt;
}

struct SequenceSpec {
  int id = 1;
  MapId map = 0;
  TilePos pos;
  Direction facing = Direction::Down;
  int party_count = 0;
  bool starts_in_battle = false;
  std::uint64_t step_limit = 1;
  Goal goal = Goal::ReachMap;
  MapId goal_map = 0;
  int goal_event = 0;

  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;
};

namespace detail {

inline std::string_view goal_name(Goal g) {
  switch (g) {
    case Goal::ReachMap: return "reach_map";
    case Goal::GrassOrEvent: return "grass_or_event";
    case Goal::WinBattle: return "win_battle";
  }
  return "?";
}

}  // namespace detail

/// One `sequence key=value ...` line per sequence; `#` starts a comment line.
inline std::vector<SequenceSpec> parse_sequences(std::string_view text) {
  std::vector<SequenceSpec> out;
  int line_no = 0;
  for (std::string_view line : detail::lines_of(text)) {
    ++line_no;
    auto f = detail::split_ws(line);
    if (f.empty() || f[0].front() == '#') continue;
    if (f[0] != "sequence") throw ParseError("line " + std::to_string(line_no) + ": expected 'sequence'");
    SequenceSpec s;
    bool has_id = false, has_limit = false, has_map = false;
    for (std::size_t i = 1; i < f.size(); ++i) {
      const auto eq = f[i].find('=');
      if (eq == std::string_view::npos) throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
      const std::string_view key = f[i].substr(0, eq), val = f[i].substr(eq + 1);
      auto num = [&](std::string_view what) { return detail::parse_int<long long>(val, what, line_no); };
      if (key == "id") { s.id = static_cast<int>(num("id")); has_id = true; }
      else if (key == "map") { s.map = static_cast<MapId>(num("map")); has_map = true; }
      else if (key == "x") s.pos.x = static_cast<int>(num("x"));
      else if (key == "y") s.pos.y = static_cast<int>(num("y"));
      else if (key == "facing") {
        auto d = parse_direction(val);
        if (!d) throw ParseError("line " + std::to_string(line_no) + ": bad facing '" + std::string(val) + "'");
        s.facing = *d;
      }
      else if (key == "limit") {
        const long long v = num("limit");
        if (v < 1) throw ValidationError("line " + std::to_string(line_no) + ": limit must be >= 1");
        s.step_limit = static_cast<std::uint64_t>(v);
        has_limit = true;
      }
      else if (key == "goal") {
        if (val == "reach_map") s.goal = Goal::ReachMap;
        else if (val == "grass_or_event") s.goal = Goal::GrassOrEvent;
        else if (val == "win_battle") s.goal = Goal::WinBattle;
        else throw ParseError("line " + std::to_string(line_no) + ": unknown goal '" + std::string(val) + "'");
      }
      else if (key == "goal_map") s.goal_map = static_cast<MapId>(num("goal_map"));
      else if (key == "goal_event") s.goal_event = static_cast<int>(num("goal_event"));
      else if (key == "battle") s.starts_in_battle = num("battle") != 0;
      else if (key == "party") s.party_count = static_cast<int>(num("party"));
      else throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    if (!has_id || !has_limit || !has_map)
      throw ParseError("line " + std::to_string(line_no) + ": sequence needs id, map and limit");
    out.push_back(s);
  }
  return out;
}

inline std::string format_sequence(const SequenceSpec& s) {
  std::string out = "sequence id=" + std::to_string(s.id) + " map=" + std::to_string(s.map) +
                    " x=" + std::to_string(s.pos.x) + " y=" + std::to_string(s.pos.y) +
                    " facing=" + std::string(direction_name(s.facing)) +
                    " limit=" + std::to_string(s.step_limit) + " goal=" + std::string(detail::goal_name(s.goal));
  if (s.goal == Goal::ReachMap) out += " goal_map=" + std::to_string(s.goal_map);
  if (s.goal == Goal::GrassOrEvent) out += " goal_event=" + std::to_string(s.goal_event);
  if (s.starts_in_battle) out += " battle=1";
  if (s.party_count != 0) out += " party=" + std::to_string(s.party_count);
  return out;
}

/// Checks the start anchor against the map data.
inline void validate_sequence(const SequenceSpec& s, const MapSet& maps) {
  const TileMap* m = maps.find(s.map);
  if (!m) throw ValidationError("sequence " + std::to_string(s.id) + " starts on unknown map");
  if (!m->walkable(s.pos) || m->at(s.pos).kind == TileKind::Warp)
    throw ValidationError("sequence " + std::to_string(s.id) + " start tile is not standable floor");
  if (s.goal == Goal::ReachMap && !maps.find(s.goal_map))
    throw ValidationError("sequence " + std::to_string(s.id) + " goal map does not exist");
}

/// Canonical start state. The RNG stream is keyed by (seed, sequence id).
inline WorldState initial_state(const SequenceSpec& spec, std::uint64_t seed, const BattleRules& rules = {}) {
  WorldState s;
  s.map_id = spec.map;
  s.pos = spec.pos;
  s.facing = spec.facing;
  s.party_count = spec.party_count;
  s.rng = SplitMix64::seeded(seed, static_cast<std::uint64_t>(spec.id));
  s.maps_visited.set(spec.map);
  if (spec.starts_in_battle) s.battle = BattleState::fresh(rules);
  return s;
}

/// Outcome after a step. Success is checked before the step limit.
inline EpisodeOutcome check_termination(const SequenceSpec& spec, const WorldState& state, const EventSet& events,
                                        std::uint64_t step_count) {
  switch (spec.goal) {
    case Goal::ReachMap:
      if (state.map_id == spec.goal_map) return EpisodeOutcome::Success;
      break;
    case Goal::GrassOrEvent:
      if (events.entered_grass || events.scripted_event == spec.goal_event) return EpisodeOutcome::Success;
      break;
    case Goal::WinBattle:
      if (events.battle_won) return EpisodeOutcome::Success;
      if (events.battle_lost) return EpisodeOutcome::Loss;
      break;
  }
  if (step_count >= spec.step_limit) return EpisodeOutcome::Timeout;
  return EpisodeOutcome::Running;
}

}  // namespace pokerl
