#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pokerl/env.hpp"
#include "pokerl/error.hpp"
#include "pokerl/metrics.hpp"
#include "pokerl/rng.hpp"
#include "pokerl/rollout.hpp"

namespace pokerl {

/// Discretized state: position and facing, plus the battle menu when in battle.
struct StateKey {
  std::uint8_t map = 0;
  std::uint8_t x = 0;
  std::uint8_t y = 0;
  std::uint8_t facing = 0;
  std::uint8_t phase = 0;  // 0 overworld, 1 choosing a move, 2 reading text
  std::uint8_t cursor = 0;

  friend auto operator<=>(const StateKey&, const StateKey&) = default;
};

inline StateKey state_key(const WorldState& s) {
  StateKey k;
  k.map = s.map_id;
  k.x = static_cast<std::uint8_t>(s.pos.x);
  k.y = static_cast<std::uint8_t>(s.pos.y);
  k.facing = static_cast<std::uint8_t>(s.facing);
  if (s.battle) {
    k.phase = s.battle->phase == BattlePhase::ChooseMove ? 1 : 2;
    k.cursor = static_cast<std::uint8_t>(s.battle->cursor);
  }
  return k;
}

struct QEntry {
  std::array<double, kNumActions> q{};
  std::uint32_t visits = 0;
  friend bool operator==(const QEntry&, const QEntry&) = default;
};

/// Highest-valued action; ties go to the lowest action index.
inline Action greedy_action(const std::array<double, kNumActions>& q) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return static_cast<Action>(best);
}

class QTable {
 public:
  QTable() = default;
  explicit QTable(int sequence) : sequence_(sequence) {}

  int sequence() const noexcept { return sequence_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<StateKey, QEntry>& entries() const noexcept { return entries_; }

  /// Values for a key; unseen keys read as all zeros.
  std::array<double, kNumActions> values(const StateKey& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? std::array<double, kNumActions>{} : it->second.q;
  }
  double max_value(const StateKey& k) const {
    const auto v = values(k);
    return *std::max_element(v.begin(), v.end());
  }
  Action greedy(const StateKey& k) const { return greedy_action(values(k)); }
  QEntry& entry(const StateKey& k) { return entries_[k]; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  int sequence_ = 1;
  std::map<StateKey, QEntry> entries_;
};

/// One-step Q-learning backup: Q += alpha * (r + gamma * max Q(s') - Q), without
/// the bootstrap term when the transition ended the episode.
inline void q_update(QEntry& e, Action a, double reward, double next_max, bool terminal, double alpha, double gamma) {
  double& q = e.q[static_cast<std::size_t>(index_of(a))];
  const double target = reward + (terminal ? 0.0 : gamma * next_max);
  q += alpha * (target - q);
  ++e.visits;
}

struct LearnerConfig {
  double alpha = 0.1;
  double gamma = 0.999;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double decay_fraction = 0.6;  // epsilon reaches epsilon_end after this share of episodes
  std::uint64_t episodes = 5000;
  std::uint64_t window = 100;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
    if (episodes == 0) throw ConfigError("episodes must be positive");
    if (window == 0) throw ConfigError("window must be positive");
  }

  double epsilon(std::uint64_t episode) const {
    const double horizon = decay_fraction * static_cast<double>(episodes);
    if (horizon <= 0.0) return epsilon_end;
    const double frac = std::min(1.0, static_cast<double>(episode) / horizon);
    return epsilon_start + (epsilon_end - epsilon_start) * frac;
  }
};

struct TrainingWindow {
  std::uint64_t first_episode = 0;
  std::uint64_t episodes = 0;
  double success_rate = 0.0;
  double mean_entropy = 0.0;
  double loop_fraction = 0.0;
  double mean_return = 0.0;
  double epsilon = 0.0;  // at the window's last episode
};

struct TrainingReport {
  int sequence = 1;
  std::uint64_t seed = 0;
  LearnerConfig learner;
  EnvConfig env;
  std::vector<TrainingWindow> windows;
  std::vector<EpisodeMetrics> episodes;

  const TrainingWindow& final_window() const { return windows.back(); }

  /// Loop-episode fraction over the last `n` training episodes.
  double tail_loop_fraction(std::size_t n) const {
    n = std::min(n, episodes.size());
    if (n == 0) return 0.0;
    double loops = 0.0;
    for (std::size_t i = episodes.size() - n; i < episodes.size(); ++i) loops += episodes[i].loop_episode ? 1.0 : 0.0;
    return loops / static_cast<double>(n);
  }
};

inline nlohmann::json to_json(const TrainingReport& r) {
  nlohmann::json j;
  j["sequence"] = r.sequence;
  j["seed"] = r.seed;
  j["learner"] = {{"alpha", r.learner.alpha},
                  {"gamma", r.learner.gamma},
                  {"epsilon_start", r.learner.epsilon_start},
                  {"epsilon_end", r.learner.epsilon_end},
                  {"decay_fraction", r.learner.decay_fraction},
                  {"episodes", r.learner.episodes},
                  {"window", r.learner.window}};
  nlohmann::json env;
  for (const auto& [k, v] : config_record(r.env).fields) env[k] = v;
  j["env"] = env;
  auto& w = j["windows"] = nlohmann::json::array();
  for (const auto& x : r.windows)
    w.push_back({{"first_episode", x.first_episode},
                 {"episodes", x.episodes},
                 {"success_rate", x.success_rate},
                 {"mean_H_bits", x.mean_entropy},
                 {"loop_fraction", x.loop_fraction},
                 {"mean_return", x.mean_return},
                 {"epsilon", x.epsilon}});
  // Trailing moving average of success, one point per episode.
  auto& curve = j["success_curve"] = nlohmann::json::array();
  double in_window = 0.0;
  for (std::size_t i = 0; i < r.episodes.size(); ++i) {
    in_window += r.episodes[i].outcome == EpisodeOutcome::Success ? 1.0 : 0.0;
    if (i >= r.learner.window && r.episodes[i - r.learner.window].outcome == EpisodeOutcome::Success) in_window -= 1.0;
    curve.push_back(in_window / static_cast<double>(std::min<std::size_t>(i + 1, r.learner.window)));
  }
  if (!r.windows.empty()) {
    j["final_success_rate"] = r.final_window().success_rate;
    j["final_loop_fraction"] = r.final_window().loop_fraction;
  }
  return j;
}

struct TrainResult {
  QTable table;
  TrainingReport report;
};

/// Tabular epsilon-greedy Q-learning on the shaped reward.
///
/// Episode i uses environment seed env.seed + i; exploration draws come from
/// their own stream keyed by env.seed, so runs are fully reproducible.
inline TrainResult train(const LearnerConfig& learner, EnvConfig env_config, const Assets& assets = default_assets()) {
  learner.validate();
  env_config.render = false;
  TrainResult out{QTable(env_config.sequence), {}};
  out.report.sequence = env_config.sequence;
  out.report.seed = env_config.seed;
  out.report.learner = learner;
  out.report.env = env_config;

  Env env(assets);
  SplitMix64 explore = SplitMix64::seeded(env_config.seed, 0x51EA7ULL);
  const std::uint64_t base_seed = env_config.seed;

  for (std::uint64_t ep = 0; ep < learner.episodes; ++ep) {
    EnvConfig cfg = env_config;
    cfg.seed = base_seed + ep;
    env.reset(cfg);
    const double eps = learner.epsilon(ep);
    StateKey key = state_key(env.state());
    while (!env.done()) {
      const Action a = explore.uniform() < eps ? static_cast<Action>(explore.below(kNumActions))
                                               : out.table.greedy(key);
      const StepResult r = env.step(a);
      const StateKey next = state_key(env.state());
      q_update(out.table.entry(key), a, r.reward, out.table.max_value(next), r.terminated, learner.alpha,
               learner.gamma);
      key = next;
    }
    out.report.episodes.push_back(episode_metrics(ep, env.log(), assets.maps));
  }

  const auto& eps = out.report.episodes;
  for (std::uint64_t start = 0; start < eps.size(); start += learner.window) {
    const std::uint64_t end = std::min<std::uint64_t>(start + learner.window, eps.size());
    std::vector<EpisodeMetrics> slice(eps.begin() + static_cast<std::ptrdiff_t>(start),
                                      eps.begin() + static_cast<std::ptrdiff_t>(end));
    const RolloutSummary s = summarize(slice);
    out.report.windows.push_back(
        {start, end - start, s.success_rate, s.mean_entropy, s.loop_fraction, s.mean_return, learner.epsilon(end - 1)});
  }
  return out;
}

struct EvalResult {
  double success_rate = 0.0;
  std::vector<EpisodeMetrics> rows;
};

/// Greedy (epsilon = 0) rollouts of a trained table.
inline EvalResult evaluate(const QTable& table, int sequence, std::uint64_t episodes, std::uint64_t seed,
                           EnvConfig env_config = {}, const Assets& assets = default_assets()) {
  if (table.sequence() != sequence) throw SequenceMismatch(table.sequence(), sequence);
  env_config.sequence = sequence;
  env_config.render = false;
  Env env(assets);
  EvalResult out;
  for (std::uint64_t i = 0; i < episodes; ++i) {
    env_config.seed = seed + i;
    env.reset(env_config);
    while (!env.done()) env.step(table.greedy(state_key(env.state())));
    out.rows.push_back(episode_metrics(i, env.log(), assets.maps));
  }
  out.success_rate = summarize(out.rows).success_rate;
  return out;
}

// ---------------------------------------------------------------------------
// Binary format, little-endian:
//   "PKQT" | u16 version | u8 sequence | u8 reserved | u32 count |
//   count x (6 key bytes | u32 visits | 7 x f64 values), sorted by key.

inline constexpr std::array<char, 4> kQTableMagic = {'P', 'K', 'Q', 'T'};
inline constexpr std::uint16_t kQTableVersion = 1;
inline constexpr std::size_t kQTableRecordBytes = 6 + 4 + 8 * kNumActions;

namespace detail {

inline void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_le(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw ParseError("q-table truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace detail

inline void write_qtable(std::ostream& out, const QTable& t) {
  out.write(kQTableMagic.data(), kQTableMagic.size());
  detail::put_le(out, kQTableVersion, 2);
  detail::put_le(out, static_cast<std::uint64_t>(t.sequence()), 1);
  detail::put_le(out, 0, 1);
  detail::put_le(out, t.size(), 4);
  for (const auto& [k, e] : t.entries()) {
    for (std::uint8_t b : {k.map, k.x, k.y, k.facing, k.phase, k.cursor}) out.put(static_cast<char>(b));
    detail::put_le(out, e.visits, 4);
    for (double v : e.q) detail::put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  }
}

inline QTable read_qtable(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kQTableMagic) throw ParseError("not a q-table file (bad magic)");
  const auto version = detail::get_le(in, 2);
  if (version != kQTableVersion) throw ParseError("unsupported q-table version " + std::to_string(version));
  QTable t(static_cast<int>(detail::get_le(in, 1)));
  detail::get_le(in, 1);
  const auto count = detail::get_le(in, 4);
  for (std::uint64_t i = 0; i < count; ++i) {
    StateKey k;
    for (std::uint8_t* b : {&k.map, &k.x, &k.y, &k.facing, &k.phase, &k.cursor})
      *b = static_cast<std::uint8_t>(detail::get_le(in, 1));
    QEntry& e = t.entry(k);
    e.visits = static_cast<std::uint32_t>(detail::get_le(in, 4));
    for (double& v : e.q) {
      v = std::bit_cast<double>(detail::get_le(in, 8));
      if (!std::isfinite(v)) throw ParseError("q-table holds a non-finite value");
    }
  }
  return t;
}

inline void save_qtable(const std::filesystem::path& path, const QTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_qtable(out, t);
  if (!out) throw IoError("write failed: " + path.string());
}

inline QTable load_qtable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_qtable(in);
}

}  // namespace pokerl
