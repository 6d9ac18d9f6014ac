#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "pokerl/env.hpp"
#include "pokerl/metrics.hpp"
#include "pokerl/policies.hpp"
#include "pokerl/text.hpp"

namespace pokerl {

/// One CSV row of per-episode metrics.
struct EpisodeMetrics {
  std::uint64_t episode_id = 0;
  int sequence = 1;
  std::uint64_t seed = 0;
  EpisodeOutcome outcome = EpisodeOutcome::Running;
  double total_reward = 0.0;
  std::uint64_t steps = 0;
  double entropy_bits = 0.0;
  bool loop_episode = false;
  ExplorationStats exploration;
  ActionCounts counts{};
};

inline EpisodeMetrics episode_metrics(std::uint64_t episode_id, const EpisodeLog& log, const MapSet& maps) {
  EpisodeMetrics m;
  m.episode_id = episode_id;
  m.sequence = log.sequence;
  m.seed = log.seed;
  m.outcome = log.outcome();
  m.total_reward = log.total_reward();
  m.steps = log.steps.size();
  m.counts = action_counts(log);
  m.entropy_bits = m.steps > 0 ? shannon_entropy(m.counts) : 0.0;
  m.loop_episode = classify_loop_episode(log);
  m.exploration = exploration_stats(log, maps);
  return m;
}

inline std::string csv_header() {
  std::string h =
      "episode_id,sequence,seed,outcome,total_reward,steps,H_bits,loop_episode,unique_positions,revisit_ratio,"
      "exploration_ratio";
  for (auto name : kActionNames) h += ",count_" + std::string(name);
  return h;
}

inline std::string csv_row(const EpisodeMetrics& m) {
  std::string r = std::to_string(m.episode_id) + "," + std::to_string(m.sequence) + "," + std::to_string(m.seed) +
                  "," + std::string(outcome_name(m.outcome)) + "," + text::format_double(m.total_reward) + "," +
                  std::to_string(m.steps) + "," + text::format_double(m.entropy_bits) + "," +
                  (m.loop_episode ? "1" : "0") + "," + std::to_string(m.exploration.unique_positions) + "," +
                  text::format_double(m.exploration.revisit_ratio) + "," +
                  text::format_double(m.exploration.exploration_ratio);
  for (auto c : m.counts) r += "," + std::to_string(c);
  return r;
}

/// Runs one episode to termination with a scripted policy.
inline const EpisodeLog& run_episode(Env& env, const EnvConfig& config, const ScriptedPolicy& policy) {
  env.reset(config);
  std::uint64_t t = 0;
  while (!env.done()) env.step(policy.act(t++, env.state(), env.assets(), env.sequence()));
  return env.log();
}

struct RolloutSummary {
  std::uint64_t episodes = 0;
  double mean_entropy = 0.0;
  double pooled_entropy = 0.0;  // entropy of the action counts summed over episodes
  double loop_fraction = 0.0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  double mean_steps = 0.0;
  ActionCounts counts{};
};

inline RolloutSummary summarize(const std::vector<EpisodeMetrics>& rows) {
  RolloutSummary s;
  s.episodes = rows.size();
  if (rows.empty()) return s;
  for (const auto& m : rows) {
    s.mean_entropy += m.entropy_bits;
    s.loop_fraction += m.loop_episode ? 1.0 : 0.0;
    s.success_rate += m.outcome == EpisodeOutcome::Success ? 1.0 : 0.0;
    s.mean_return += m.total_reward;
    s.mean_steps += static_cast<double>(m.steps);
    for (std::size_t i = 0; i < s.counts.size(); ++i) s.counts[i] += m.counts[i];
  }
  const auto n = static_cast<double>(rows.size());
  s.mean_entropy /= n;
  s.loop_fraction /= n;
  s.success_rate /= n;
  s.mean_return /= n;
  s.mean_steps /= n;
  bool any = false;
  for (auto c : s.counts) any = any || c > 0;
  s.pooled_entropy = any ? shannon_entropy(s.counts) : 0.0;
  return s;
}

/// Episodes use seeds seed, seed+1, ..., seed+n-1.
inline std::vector<EpisodeMetrics> rollout(const ScriptedPolicy& policy, EnvConfig config, std::uint64_t episodes,
                                           const Assets& assets = default_assets()) {
  Env env(assets);
  config.render = false;
  const std::uint64_t base = config.seed;
  std::vector<EpisodeMetrics> rows;
  rows.reserve(episodes);
  for (std::uint64_t i = 0; i < episodes; ++i) {
    config.seed = base + i;
    ScriptedPolicy p = policy;
    p.seed = policy.seed + i;
    rows.push_back(episode_metrics(i, run_episode(env, config, p), assets.maps));
  }
  return rows;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<EpisodeMetrics>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_row(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

/// Flat key=value report: summary numbers, then the run and reward configuration.
inline void write_summary(std::ostream& out, const RolloutSummary& s, const EnvConfig& config,
                          std::string_view policy) {
  out << "policy=" << policy << '\n'
      << "episodes=" << s.episodes << '\n'
      << "success_rate=" << text::format_double(s.success_rate) << '\n'
      << "mean_return=" << text::format_double(s.mean_return) << '\n'
      << "mean_steps=" << text::format_double(s.mean_steps) << '\n'
      << "mean_H_bits=" << text::format_double(s.mean_entropy) << '\n'
      << "pooled_H_bits=" << text::format_double(s.pooled_entropy) << '\n'
      << "loop_episode_fraction=" << text::format_double(s.loop_fraction) << '\n';
  for (const auto& [k, v] : config_record(config).fields) out << k << '=' << v << '\n';
}

}  // namespace pokerl
