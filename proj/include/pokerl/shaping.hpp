#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pokerl/types.hpp"
#include "pokerl/world.hpp"

namespace pokerl {

/// Reward constants and detector thresholds.
///
/// Positive terms follow the micro/meso/macro hierarchy (1 / 10 / 20+);
/// every penalty magnitude sits inside [0.02, 0.2].
struct RewardConfig {
  // micro
  double new_tile = 1.0;
  double distance_coeff = 0.2;
  double first_visit = 0.5;
  // meso
  double map_transition = 10.0;
  double first_map_entry = 5.0;
  double exploration_bonus = 2.0;
  int exploration_bonus_quantum = 25;
  // macro
  double grass = 20.0;
  double battle_start = 10.0;
  double victory = 50.0;
  double catch_reward = 50.0;  // no catch mechanic; kept so reports list the full table
  // battle shaping, per HP point
  double damage_dealt_coeff = 0.2;
  double damage_taken_coeff = -0.1;
  // anti-loop
  double visit_soft_penalty = -0.05;
  double visit_hard_penalty = -0.2;
  int visit_soft_after = 3;   // penalty once the count exceeds this
  int visit_hard_after = 5;
  double pattern_penalty = -0.1;
  double pattern_break_bonus = 0.05;
  int pattern_window = 20;
  double loop_radius_penalty = -0.2;
  int loop_history = 30;
  int loop_oldest = 20;
  int loop_radius = 1;
  int loop_min_returns = 3;
  // anti-spam
  double stay_penalty = -0.02;
  int stay_after = 3;
  double spam_soft_penalty = -0.1;
  double spam_hard_penalty = -0.2;
  int spam_soft_from = 3;
  int spam_hard_after = 5;
  double diversity_bonus = 0.02;
  int diversity_window = 8;
  int diversity_min_distinct = 4;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

/// Calls `f(name, field)` for every field of a RewardConfig, in declaration order.
template <class Config, class F>
  requires std::same_as<std::remove_const_t<Config>, RewardConfig>
void visit_config(Config& c, F&& f) {
  f("new_tile", c.new_tile);
  f("distance_coeff", c.distance_coeff);
  f("first_visit", c.first_visit);
  f("map_transition", c.map_transition);
  f("first_map_entry", c.first_map_entry);
  f("exploration_bonus", c.exploration_bonus);
  f("exploration_bonus_quantum", c.exploration_bonus_quantum);
  f("grass", c.grass);
  f("battle_start", c.battle_start);
  f("victory", c.victory);
  f("catch", c.catch_reward);
  f("damage_dealt_coeff", c.damage_dealt_coeff);
  f("damage_taken_coeff", c.damage_taken_coeff);
  f("visit_soft_penalty", c.visit_soft_penalty);
  f("visit_hard_penalty", c.visit_hard_penalty);
  f("visit_soft_after", c.visit_soft_after);
  f("visit_hard_after", c.visit_hard_after);
  f("pattern_penalty", c.pattern_penalty);
  f("pattern_break_bonus", c.pattern_break_bonus);
  f("pattern_window", c.pattern_window);
  f("loop_radius_penalty", c.loop_radius_penalty);
  f("loop_history", c.loop_history);
  f("loop_oldest", c.loop_oldest);
  f("loop_radius", c.loop_radius);
  f("loop_min_returns", c.loop_min_returns);
  f("stay_penalty", c.stay_penalty);
  f("stay_after", c.stay_after);
  f("spam_soft_penalty", c.spam_soft_penalty);
  f("spam_hard_penalty", c.spam_hard_penalty);
  f("spam_soft_from", c.spam_soft_from);
  f("spam_hard_after", c.spam_hard_after);
  f("diversity_bonus", c.diversity_bonus);
  f("diversity_window", c.diversity_window);
  f("diversity_min_distinct", c.diversity_min_distinct);
}

/// Every field of RewardConfig as (name, value), in declaration order.
inline std::vector<std::pair<std::string, double>> config_entries(const RewardConfig& c) {
  std::vector<std::pair<std::string, double>> out;
  visit_config(c, [&](std::string_view name, const auto& v) { out.emplace_back(std::string(name), static_cast<double>(v)); });
  return out;
}

/// Sets one field by name; false if the name is unknown or an integer field gets a fraction.
inline bool set_config_entry(RewardConfig& c, std::string_view key, double value) {
  bool ok = false;
  visit_config(c, [&](std::string_view name, auto& field) {
    if (name != key) return;
    using T = std::remove_reference_t<decltype(field)>;
    if constexpr (std::is_integral_v<T>) {
      if (value != std::floor(value)) return;
    }
    field = static_cast<T>(value);
    ok = true;
  });
  return ok;
}

/// Named reward terms. Order is the breakdown/CSV column order.
enum class Component : std::uint8_t {
  NewTile, Distance, FirstVisit,
  MapTransition, FirstMapEntry, ExplorationBonus,
  Grass, BattleStart, Victory,
  DamageDealt, DamageTaken,
  VisitSoft, VisitHard, Pattern, PatternBreak, LoopRadius,
  Stay, SpamSoft, SpamHard, Diversity,
};
inline constexpr std::size_t kNumComponents = 20;

inline constexpr std::array<std::string_view, kNumComponents> kComponentNames = {
    "new_tile", "distance", "first_visit",
    "map_transition", "first_map_entry", "exploration_bonus",
    "grass", "battle_start", "victory",
    "damage_dealt", "damage_taken",
    "visit_soft", "visit_hard", "pattern", "pattern_break", "loop_radius",
    "stay", "spam_soft", "spam_hard", "diversity",
};

inline std::optional<Component> component_from_name(std::string_view n) {
  for (std::size_t i = 0; i < kNumComponents; ++i)
    if (kComponentNames[i] == n) return static_cast<Component>(i);
  return std::nullopt;
}

inline constexpr bool is_loop_component(Component c) {
  return c == Component::VisitSoft || c == Component::VisitHard || c == Component::Pattern ||
         c == Component::PatternBreak || c == Component::LoopRadius;
}

inline constexpr bool is_spam_component(Component c) {
  return c == Component::Stay || c == Component::SpamSoft || c == Component::SpamHard ||
         c == Component::Diversity;
}

class RewardBreakdown {
 public:
  void add(Component c, double v) {
    const auto i = static_cast<std::size_t>(c);
    values_[i] += v;
    fired_.set(i);
    total_ = 0.0;
    for (std::size_t k = 0; k < kNumComponents; ++k)
      if (fired_.test(k)) total_ += values_[k];
  }

  bool fired(Component c) const { return fired_.test(static_cast<std::size_t>(c)); }
  double value(Component c) const { return values_[static_cast<std::size_t>(c)]; }
  double total() const noexcept { return total_; }
  std::size_t fired_count() const noexcept { return fired_.count(); }

  /// Fired components as (name, value) in column order.
  std::vector<std::pair<std::string_view, double>> entries() const {
    std::vector<std::pair<std::string_view, double>> out;
    for (std::size_t k = 0; k < kNumComponents; ++k)
      if (fired_.test(k)) out.emplace_back(kComponentNames[k], values_[k]);
    return out;
  }

  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;

 private:
  std::array<double, kNumComponents> values_{};
  std::bitset<kNumComponents> fired_;
  double total_ = 0.0;
};

/// Which detector families contribute reward. Disabled families still update
/// their counters (so loop metrics stay comparable) but add nothing.
struct ShapingToggles {
  bool anti_loop = true;
  bool anti_spam = true;
  friend bool operator==(const ShapingToggles&, const ShapingToggles&) = default;
};

/// Per-episode memory of the shaping system.
struct ShapingState {
  std::unordered_map<MapTile, std::uint32_t, MapTileHash> position_visits;
  std::deque<Action> action_window;
  std::deque<MapTile> position_history;
  int streak_a = 0;
  int streak_b = 0;
  int streak_stay = 0;
  std::uint64_t pattern_hits = 0;
  std::uint64_t loop_hits = 0;
  bool pattern_active = false;
  std::bitset<256> maps_entered;
  std::map<MapId, int> unique_tiles_per_map;
  std::map<MapId, int> last_bonus_quantum;
  bool grass_awarded = false;

  /// State at episode start: the start tile counts as visited and its map as entered.
  static ShapingState start(const WorldState& s0) {
    ShapingState ss;
    ss.position_visits[s0.tile()] = 1;
    ss.maps_entered.set(s0.map_id);
    ss.unique_tiles_per_map[s0.map_id] = 1;
    return ss;
  }

  std::uint32_t visits(MapTile t) const {
    auto it = position_visits.find(t);
    return it == position_visits.end() ? 0 : it->second;
  }

  friend bool operator==(const ShapingState&, const ShapingState&) = default;
};

/// Graduated revisit penalty for a tile whose count already includes this step.
inline double visit_penalty(const ShapingState& ss, MapTile key, const RewardConfig& cfg = {}) {
  const auto count = static_cast<int>(ss.visits(key));
  if (count > cfg.visit_hard_after) return cfg.visit_hard_penalty;
  if (count > cfg.visit_soft_after) return cfg.visit_soft_penalty;
  return 0.0;
}

/// Smallest period p in 1..4 such that the last 4p actions repeat with period p.
///
/// p = 1 is only reported for movement (button spam is the streak counters'
/// job), and p <= 2 additionally requires at most two distinct actions.
inline std::optional<int> detect_action_pattern(std::span<const Action> window) {
  const std::size_t n = window.size();
  for (std::size_t p = 1; p <= 4; ++p) {
    if (n < 4 * p) break;
    const auto tail = window.subspan(n - 4 * p);
    bool periodic = true;
    for (std::size_t i = p; i < tail.size() && periodic; ++i) periodic = tail[i] == tail[i - p];
    if (!periodic) continue;
    if (p == 1) {
      if (is_movement(tail[0])) return 1;
      return std::nullopt;
    }
    // For p = 2 the unit is two different actions (else p = 1 would have
    // matched), so the two-distinct-actions condition holds automatically.
    return static_cast<int>(p);
  }
  return std::nullopt;
}

inline std::optional<int> detect_action_pattern(const std::deque<Action>& window) {
  std::vector<Action> v(window.begin(), window.end());
  return detect_action_pattern(std::span<const Action>(v));
}

/// Penalty while a pattern is detected, a small bonus on the first clean step after.
inline double pattern_reward(ShapingState& ss, std::optional<int> detection, const RewardConfig& cfg = {}) {
  if (detection) {
    ++ss.pattern_hits;
    ss.pattern_active = true;
    return cfg.pattern_penalty;
  }
  if (ss.pattern_active) {
    ss.pattern_active = false;
    return cfg.pattern_break_bonus;
  }
  return 0.0;
}

/// True when the agent moved back within `radius` of at least `min_returns`
/// of the oldest `oldest` entries of `history` (which excludes `current`).
inline bool detect_position_loop(const std::deque<MapTile>& history, MapTile current, bool moved,
                                 const RewardConfig& cfg = {}) {
  if (!moved) return false;
  const std::size_t limit = std::min(history.size(), static_cast<std::size_t>(cfg.loop_oldest));
  int near = 0;
  for (std::size_t i = 0; i < limit; ++i) {
    const MapTile& h = history[i];
    if (h.map == current.map && std::abs(h.x - current.x) <= cfg.loop_radius &&
        std::abs(h.y - current.y) <= cfg.loop_radius)
      ++near;
  }
  return near >= cfg.loop_min_returns;
}

struct SpamTerms {
  double soft = 0.0;
  double hard = 0.0;
  double stay = 0.0;
  double diversity = 0.0;
};

/// Updates the A/B/stay streaks for this step and returns the anti-spam terms.
/// Expects `ss.action_window` to already contain `action`.
inline SpamTerms spam_penalty(ShapingState& ss, Action action, bool moved, const RewardConfig& cfg = {}) {
  ss.streak_a = action == Action::A ? ss.streak_a + 1 : 0;
  ss.streak_b = action == Action::B ? ss.streak_b + 1 : 0;
  ss.streak_stay = moved ? 0 : ss.streak_stay + 1;

  SpamTerms t;
  const int streak = std::max(ss.streak_a, ss.streak_b);
  if (streak >= cfg.spam_soft_from) t.soft = cfg.spam_soft_penalty;
  if (streak > cfg.spam_hard_after) t.hard = cfg.spam_hard_penalty;
  if (ss.streak_stay >= cfg.stay_after) t.stay = cfg.stay_penalty;

  const auto w = static_cast<std::size_t>(cfg.diversity_window);
  const std::size_t n = ss.action_window.size();
  std::bitset<kNumActions> seen;
  for (std::size_t i = n > w ? n - w : 0; i < n; ++i) seen.set(static_cast<std::size_t>(index_of(ss.action_window[i])));
  if (static_cast<int>(seen.count()) >= cfg.diversity_min_distinct) t.diversity = cfg.diversity_bonus;
  return t;
}

/// Applies one transition to the shaping state and returns its reward.
///
/// `ss` is updated exactly once. The caller guarantees (prev, action) -> next
/// produced `events`.
inline RewardBreakdown apply_reward(ShapingState& ss, const WorldState& prev, const WorldState& next, Action action,
                                    const EventSet& events, const RewardConfig& cfg = {},
                                    const ShapingToggles& toggles = {}) {
  RewardBreakdown r;
  const MapTile here = next.tile();

  // micro
  const bool first_visit = ss.visits(here) == 0;
  ++ss.position_visits[here];
  if (events.new_tile) r.add(Component::NewTile, cfg.new_tile);
  if (events.distance_moved > 0.0) r.add(Component::Distance, cfg.distance_coeff * events.distance_moved);
  if (first_visit) r.add(Component::FirstVisit, cfg.first_visit);

  // meso
  if (events.entered_map) {
    r.add(Component::MapTransition, cfg.map_transition);
    if (!ss.maps_entered.test(*events.entered_map)) {
      ss.maps_entered.set(*events.entered_map);
      r.add(Component::FirstMapEntry, cfg.first_map_entry);
    }
  }
  if (first_visit) {
    const int unique = ++ss.unique_tiles_per_map[here.map];
    const int quantum = unique / cfg.exploration_bonus_quantum;
    int& last = ss.last_bonus_quantum[here.map];
    if (quantum > last) {
      last = quantum;
      r.add(Component::ExplorationBonus, cfg.exploration_bonus);
    }
  }

  // macro
  if (events.entered_grass && !ss.grass_awarded) {
    ss.grass_awarded = true;
    r.add(Component::Grass, cfg.grass);
  }
  if (events.battle_started) r.add(Component::BattleStart, cfg.battle_start);
  if (events.battle_won) r.add(Component::Victory, cfg.victory);

  // battle shaping
  if (prev.battle && next.battle) {
    const int dealt = prev.battle->enemy_hp - next.battle->enemy_hp;
    const int taken = prev.battle->player_hp - next.battle->player_hp;
    if (dealt > 0) r.add(Component::DamageDealt, cfg.damage_dealt_coeff * dealt);
    if (taken > 0) r.add(Component::DamageTaken, cfg.damage_taken_coeff * taken);
  }

  // anti-loop: revisits, action patterns, radius returns
  const double visit = visit_penalty(ss, here, cfg);

  ss.action_window.push_back(action);
  while (ss.action_window.size() > static_cast<std::size_t>(cfg.pattern_window)) ss.action_window.pop_front();
  const double pattern = pattern_reward(ss, detect_action_pattern(ss.action_window), cfg);

  const bool loop = detect_position_loop(ss.position_history, here, events.moved, cfg);
  if (loop) ++ss.loop_hits;
  ss.position_history.push_back(here);
  while (ss.position_history.size() > static_cast<std::size_t>(cfg.loop_history)) ss.position_history.pop_front();

  if (toggles.anti_loop) {
    if (static_cast<int>(ss.visits(here)) > cfg.visit_hard_after) r.add(Component::VisitHard, visit);
    else if (visit != 0.0) r.add(Component::VisitSoft, visit);
    if (pattern < 0.0) r.add(Component::Pattern, pattern);
    if (pattern > 0.0) r.add(Component::PatternBreak, pattern);
    if (loop) r.add(Component::LoopRadius, cfg.loop_radius_penalty);
  }

  // anti-spam
  const SpamTerms spam = spam_penalty(ss, action, events.moved, cfg);
  if (toggles.anti_spam) {
    if (spam.soft != 0.0) r.add(Component::SpamSoft, spam.soft);
    if (spam.hard != 0.0) r.add(Component::SpamHard, spam.hard);
    if (spam.stay != 0.0) r.add(Component::Stay, spam.stay);
    if (spam.diversity != 0.0) r.add(Component::Diversity, spam.diversity);
  }
  return r;
}

/// Pure form of apply_reward: returns the breakdown and the successor state.
inline std::pair<RewardBreakdown, ShapingState> compute_reward(const WorldState& prev, const WorldState& next,
                                                                Action action, const EventSet& events,
                                                                ShapingState ss, const RewardConfig& cfg = {},
                                                                const ShapingToggles& toggles = {}) {
  RewardBreakdown r = apply_reward(ss, prev, next, action, events, cfg, toggles);
  return {r, std::move(ss)};
}

}  // namespace pokerl
