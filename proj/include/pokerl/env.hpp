#pragma once

#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "pokerl/assets.hpp"
#include "pokerl/curriculum.hpp"
#include "pokerl/error.hpp"
#include "pokerl/metrics.hpp"
#include "pokerl/observation.hpp"
#include "pokerl/shaping.hpp"
#include "pokerl/text.hpp"
#include "pokerl/world.hpp"

namespace pokerl {

struct EnvConfig {
  int sequence = 1;
  std::uint64_t seed = 0;
  RewardConfig reward;
  ShapingToggles shaping;
  bool visited_mask_in_obs = true;
  std::optional<std::uint64_t> step_limit;
  bool render = true;  // false skips frame rendering (observations stay zero)

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

struct StepInfo {
  MemoryView memory;
  EpisodeOutcome outcome = EpisodeOutcome::Running;
  EventSet events;
  std::uint64_t step_count = 0;
};

struct ResetResult {
  ObservationStack observation;
  StepInfo info;
};

struct StepResult {
  ObservationStack observation;
  double reward = 0.0;
  RewardBreakdown breakdown;
  bool terminated = false;  // Success or Loss
  bool truncated = false;   // Timeout
  StepInfo info;
};

/// reset/step loop over world-sim, shaping, observation, and curriculum.
///
/// One instance runs one episode at a time and is not thread-safe; run
/// independent instances for parallel rollouts.
class Env {
 public:
  explicit Env(const Assets& assets = default_assets()) : assets_(&assets) {}

  ResetResult reset(const EnvConfig& config) {
    // Validate before touching the running episode.
    SequenceSpec spec = assets_->sequence(config.sequence);  // UnknownSequence
    if (config.step_limit) {
      if (*config.step_limit == 0) throw ConfigError("step_limit must be positive");
      spec.step_limit = *config.step_limit;
    }
    spec_ = spec;
    config_ = config;
    state_ = initial_state(spec_, config.seed, assets_->battle);
    shaping_ = ShapingState::start(state_);
    masks_ = {};
    update_visited(masks_, state_);
    frames_.clear();
    push_frames();
    outcome_ = EpisodeOutcome::Running;
    log_ = {};
    log_.sequence = config.sequence;
    log_.seed = config.seed;
    log_.start = state_.tile();
    started_ = true;

    ResetResult r;
    r.observation = observation();
    r.info = info({});
    return r;
  }

  StepResult step(Action action) {
    if (!started_ || outcome_ != EpisodeOutcome::Running) throw SteppedTerminalEpisode();
    const WorldState prev = state_;
    const std::uint64_t pattern_before = shaping_.pattern_hits;
    const std::uint64_t loop_before = shaping_.loop_hits;

    Transition t = step_world(assets_->maps, state_, action, assets_->battle);
    state_ = std::move(t.state);
    update_visited(masks_, state_);
    RewardBreakdown breakdown = apply_reward(shaping_, prev, state_, action, t.events, config_.reward, config_.shaping);
    push_frames();
    outcome_ = check_termination(spec_, state_, t.events, state_.step_count);

    StepRecord rec;
    rec.step = log_.steps.size();
    rec.action = action;
    rec.tile = state_.tile();
    rec.reward = breakdown;
    rec.pattern_hits_delta = shaping_.pattern_hits - pattern_before;
    rec.loop_hits_delta = shaping_.loop_hits - loop_before;
    rec.events = t.events;
    rec.outcome = outcome_;
    log_.steps.push_back(rec);

    StepResult r;
    r.observation = observation();
    r.reward = breakdown.total();
    r.breakdown = breakdown;
    r.terminated = outcome_ == EpisodeOutcome::Success || outcome_ == EpisodeOutcome::Loss;
    r.truncated = outcome_ == EpisodeOutcome::Timeout;
    r.info = info(t.events);
    return r;
  }

  /// Current stacked observation.
  ObservationStack observation() const { return stack(std::span<const FramePair>(frames_.data(), frames_.size())); }

  const FramePair& latest_frames() const { return frames_.back(); }
  const WorldState& state() const noexcept { return state_; }
  const ShapingState& shaping() const noexcept { return shaping_; }
  const VisitedMaskStore& masks() const noexcept { return masks_; }
  const EpisodeLog& log() const noexcept { return log_; }
  const EnvConfig& config() const noexcept { return config_; }
  const SequenceSpec& sequence() const noexcept { return spec_; }
  const Assets& assets() const noexcept { return *assets_; }
  EpisodeOutcome outcome() const noexcept { return outcome_; }
  bool done() const noexcept { return outcome_ != EpisodeOutcome::Running; }

 private:
  void push_frames() {
    FramePair p;
    if (config_.render) {
      p.gray = render_frame(state_, assets_->maps);
      if (config_.visited_mask_in_obs) p.mask = rasterize_mask(masks_, state_);
    }
    if (frames_.size() == kStackDepth) frames_.erase(frames_.begin());
    frames_.push_back(p);
  }

  StepInfo info(const EventSet& events) const {
    return {memory_view(state_), outcome_, events, state_.step_count};
  }

  const Assets* assets_;
  EnvConfig config_;
  SequenceSpec spec_;
  WorldState state_;
  ShapingState shaping_;
  VisitedMaskStore masks_;
  std::vector<FramePair> frames_;
  EpisodeOutcome outcome_ = EpisodeOutcome::Running;
  EpisodeLog log_;
  bool started_ = false;
};

// ---------------------------------------------------------------------------
// Text persistence: one self-describing record per line.

inline text::Record config_record(const EnvConfig& c) {
  text::Record r{"config", {}};
  r.add("sequence", std::to_string(c.sequence));
  r.add("seed", std::to_string(c.seed));
  r.add("anti_loop", c.shaping.anti_loop ? "1" : "0");
  r.add("anti_spam", c.shaping.anti_spam ? "1" : "0");
  r.add("mask", c.visited_mask_in_obs ? "1" : "0");
  r.add("step_limit", c.step_limit ? std::to_string(*c.step_limit) : "-");
  for (const auto& [k, v] : config_entries(c.reward)) r.add("reward." + k, text::format_double(v));
  return r;
}

inline EnvConfig config_from_record(const text::Record& r) {
  EnvConfig c;
  c.sequence = r.get_int<int>("sequence");
  c.seed = r.get_int<std::uint64_t>("seed");
  c.shaping.anti_loop = r.get_bool("anti_loop");
  c.shaping.anti_spam = r.get_bool("anti_spam");
  c.visited_mask_in_obs = r.get_bool("mask");
  if (r.get("step_limit") != "-") c.step_limit = r.get_int<std::uint64_t>("step_limit");
  for (const auto& [k, v] : r.fields) {
    if (!k.starts_with("reward.")) continue;
    auto d = text::parse_double(v);
    if (!d || !set_config_entry(c.reward, std::string_view(k).substr(7), *d))
      throw ParseError("bad reward field '" + k + "'");
  }
  return c;
}

inline text::Record step_record(const StepRecord& s) {
  text::Record r{"step", {}};
  r.add("i", std::to_string(s.step));
  r.add("action", std::to_string(index_of(s.action)));
  r.add("map", std::to_string(s.tile.map));
  r.add("x", std::to_string(s.tile.x));
  r.add("y", std::to_string(s.tile.y));
  r.add("outcome", std::string(outcome_name(s.outcome)));
  r.add("pattern_hits", std::to_string(s.pattern_hits_delta));
  r.add("loop_hits", std::to_string(s.loop_hits_delta));
  const EventSet& e = s.events;
  r.add("ev.moved", e.moved ? "1" : "0");
  r.add("ev.new_tile", e.new_tile ? "1" : "0");
  r.add("ev.entered_map", e.entered_map ? std::to_string(*e.entered_map) : "-");
  r.add("ev.first_map_entry", e.first_map_entry ? "1" : "0");
  r.add("ev.grass", e.entered_grass ? "1" : "0");
  r.add("ev.battle_started", e.battle_started ? "1" : "0");
  r.add("ev.battle_won", e.battle_won ? "1" : "0");
  r.add("ev.battle_lost", e.battle_lost ? "1" : "0");
  r.add("ev.scripted", e.scripted_event ? std::to_string(*e.scripted_event) : "-");
  r.add("ev.distance", text::format_double(e.distance_moved));
  for (const auto& [name, v] : s.reward.entries()) r.add("r." + std::string(name), text::format_double(v));
  r.add("total", text::format_double(s.reward.total()));
  return r;
}

inline StepRecord step_from_record(const text::Record& r) {
  StepRecord s;
  s.step = r.get_int<std::uint64_t>("i");
  auto a = action_from_index(r.get_int<int>("action"));
  if (!a) throw ParseError("bad action in step record");
  s.action = *a;
  s.tile = {static_cast<MapId>(r.get_int<int>("map")), r.get_int<int>("x"), r.get_int<int>("y")};
  auto o = parse_outcome(r.get("outcome"));
  if (!o) throw ParseError("bad outcome in step record");
  s.outcome = *o;
  s.pattern_hits_delta = r.get_int<std::uint64_t>("pattern_hits");
  s.loop_hits_delta = r.get_int<std::uint64_t>("loop_hits");
  EventSet& e = s.events;
  e.moved = r.get_bool("ev.moved");
  e.new_tile = r.get_bool("ev.new_tile");
  if (r.get("ev.entered_map") != "-") e.entered_map = static_cast<MapId>(r.get_int<int>("ev.entered_map"));
  e.first_map_entry = r.get_bool("ev.first_map_entry");
  e.entered_grass = r.get_bool("ev.grass");
  e.battle_started = r.get_bool("ev.battle_started");
  e.battle_won = r.get_bool("ev.battle_won");
  e.battle_lost = r.get_bool("ev.battle_lost");
  if (r.get("ev.scripted") != "-") e.scripted_event = r.get_int<int>("ev.scripted");
  e.distance_moved = r.get_double("ev.distance");
  for (const auto& [k, v] : r.fields) {
    if (!k.starts_with("r.")) continue;
    auto c = component_from_name(std::string_view(k).substr(2));
    auto d = text::parse_double(v);
    if (!c || !d) throw ParseError("bad reward component '" + k + "'");
    s.reward.add(*c, *d);
  }
  return s;
}

/// Writes `config`, `episode`, then one `step` line per transition.
inline void write_episode_log(std::ostream& out, const EnvConfig& config, const EpisodeLog& log) {
  out << config_record(config).str() << '\n';
  text::Record ep{"episode", {}};
  ep.add("sequence", std::to_string(log.sequence));
  ep.add("seed", std::to_string(log.seed));
  ep.add("start_map", std::to_string(log.start.map));
  ep.add("start_x", std::to_string(log.start.x));
  ep.add("start_y", std::to_string(log.start.y));
  ep.add("steps", std::to_string(log.steps.size()));
  out << ep.str() << '\n';
  for (const auto& s : log.steps) out << step_record(s).str() << '\n';
}

struct PersistedEpisode {
  EnvConfig config;
  EpisodeLog log;
};

inline PersistedEpisode read_episode_log(std::istream& in) {
  PersistedEpisode p;
  bool has_config = false, has_episode = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const text::Record r = text::parse_record(line);
    if (r.tag == "config") {
      p.config = config_from_record(r);
      has_config = true;
    } else if (r.tag == "episode") {
      p.log.sequence = r.get_int<int>("sequence");
      p.log.seed = r.get_int<std::uint64_t>("seed");
      p.log.start = {static_cast<MapId>(r.get_int<int>("start_map")), r.get_int<int>("start_x"),
                     r.get_int<int>("start_y")};
      has_episode = true;
    } else if (r.tag == "step") {
      p.log.steps.push_back(step_from_record(r));
    } else {
      throw ParseError("unknown record '" + r.tag + "'");
    }
  }
  if (!has_config || !has_episode) throw ParseError("episode log needs a config and an episode line");
  return p;
}

/// Runs the logged actions through a fresh environment and returns the new log.
inline EpisodeLog replay(const PersistedEpisode& p, const Assets& assets = default_assets()) {
  Env env(assets);
  EnvConfig cfg = p.config;
  cfg.render = false;
  env.reset(cfg);
  for (const auto& s : p.log.steps) {
    if (env.done()) break;
    env.step(s.action);
  }
  return env.log();
}

}  // namespace pokerl
