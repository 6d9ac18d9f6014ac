#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pokerl/pokerl.hpp"

namespace fs = std::filesystem;
using namespace pokerl;

namespace {

struct Common {
  std::string assets_dir;
  std::optional<Assets> loaded;

  const Assets& assets() {
    if (assets_dir.empty()) return default_assets();
    if (!loaded) loaded = load_assets(assets_dir);
    return *loaded;
  }
};

struct ShapingFlags {
  bool no_anti_loop = false;
  bool no_anti_spam = false;
  bool no_mask = false;
  std::vector<std::string> reward;  // KEY=VALUE

  void add_to(CLI::App* cmd) {
    cmd->add_flag("--no-anti-loop", no_anti_loop, "Disable anti-loop penalties");
    cmd->add_flag("--no-anti-spam", no_anti_spam, "Disable anti-spam penalties");
    cmd->add_flag("--no-mask", no_mask, "Zero the visited-mask channels");
    cmd->add_option("--reward", reward, "Reward override KEY=VALUE (repeatable)");
  }

  void apply(EnvConfig& c) const {
    c.shaping.anti_loop = !no_anti_loop;
    c.shaping.anti_spam = !no_anti_spam;
    c.visited_mask_in_obs = !no_mask;
    for (const auto& kv : reward) {
      const auto eq = kv.find('=');
      const auto v = eq == std::string::npos ? std::nullopt : text::parse_double(std::string_view(kv).substr(eq + 1));
      if (!v || !set_config_entry(c.reward, std::string_view(kv).substr(0, eq), *v))
        throw ConfigError("bad --reward '" + kv + "'");
    }
  }
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

std::vector<Action> read_actions(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot read " + p.string());
  std::vector<Action> out;
  std::string tok;
  while (in >> tok) {
    if (tok.front() == '#') {
      std::getline(in, tok);
      continue;
    }
    std::optional<Action> a;
    if (auto n = text::parse_int<int>(tok)) a = action_from_index(*n);
    for (std::size_t i = 0; !a && i < kActionNames.size(); ++i)
      if (kActionNames[i] == tok) a = kAllActions[i];
    if (!a) throw ParseError("unknown action '" + tok + "' in " + p.string());
    out.push_back(*a);
  }
  return out;
}

void print_metrics(std::ostream& out, const EpisodeMetrics& m) {
  out << "outcome=" << outcome_name(m.outcome) << '\n'
      << "total_reward=" << text::format_double(m.total_reward) << '\n'
      << "steps=" << m.steps << '\n'
      << "H_bits=" << text::format_double(m.entropy_bits) << '\n'
      << "loop_episode=" << (m.loop_episode ? 1 : 0) << '\n'
      << "unique_positions=" << m.exploration.unique_positions << '\n'
      << "revisit_ratio=" << text::format_double(m.exploration.revisit_ratio) << '\n'
      << "exploration_ratio=" << text::format_double(m.exploration.exploration_ratio) << '\n';
  for (std::size_t i = 0; i < kNumActions; ++i) out << "count_" << kActionNames[i] << '=' << m.counts[i] << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tile-world reinforcement-learning environment"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (TOML/INI); command-line flags take precedence");
  Common common;
  app.add_option("--assets", common.assets_dir, "Directory with maps/*.map and sequences.cfg")
      ->check(CLI::ExistingDirectory);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the line protocol over stdio or TCP");
  std::optional<int> tcp_port;
  bool stdio = false;
  auto* tcp_opt = serve->add_option("--tcp", tcp_port, "Listen on 127.0.0.1:PORT (0 = ephemeral)")
                      ->check(CLI::Range(0, 65535));
  serve->add_flag("--stdio", stdio, "Serve one session on stdin/stdout (default)")->excludes(tcp_opt);

  // rollout
  auto* roll = app.add_subcommand("rollout", "Run a scripted policy and write per-episode metrics");
  std::string policy_name = "random";
  int roll_seq = 1;
  std::uint64_t roll_eps = 100, roll_seed = 0;
  std::string roll_csv, roll_log;
  ShapingFlags roll_flags;
  roll->add_option("--policy", policy_name, "random|spam_a|spam_noop|pacer|diverse_random|solver");
  roll->add_option("--sequence", roll_seq, "Curriculum sequence id");
  roll->add_option("--episodes", roll_eps, "Number of episodes")->check(CLI::PositiveNumber);
  roll->add_option("--seed", roll_seed, "Base seed; episode i uses seed+i");
  roll->add_option("--csv", roll_csv, "Per-episode metrics CSV")->required();
  roll->add_option("--log", roll_log, "Also write the first episode's step log here");
  roll_flags.add_to(roll);

  // train-q
  auto* trainq = app.add_subcommand("train-q", "Train the tabular Q-learner");
  int tq_seq = 1;
  std::uint64_t tq_seed = 0;
  std::string tq_out, tq_report;
  LearnerConfig learner;
  ShapingFlags tq_flags;
  trainq->add_option("--sequence", tq_seq, "Curriculum sequence id");
  trainq->add_option("--episodes", learner.episodes, "Training episodes")->check(CLI::PositiveNumber);
  trainq->add_option("--seed", tq_seed, "Base seed");
  trainq->add_option("--out", tq_out, "Q-table output path")->required();
  trainq->add_option("--report", tq_report, "Training report (JSON)")->required();
  trainq->add_option("--alpha", learner.alpha, "Learning rate");
  trainq->add_option("--gamma", learner.gamma, "Discount");
  tq_flags.add_to(trainq);

  // eval
  auto* eval = app.add_subcommand("eval", "Greedy rollouts of a saved Q-table");
  std::string ev_table, ev_csv;
  std::uint64_t ev_eps = 200, ev_seed = 0;
  std::optional<int> ev_seq;
  eval->add_option("--qtable", ev_table, "Q-table file")->required()->check(CLI::ExistingFile);
  eval->add_option("--episodes", ev_eps, "Number of episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", ev_seed, "Base seed");
  eval->add_option("--sequence", ev_seq, "Expected sequence (defaults to the table's)");
  eval->add_option("--csv", ev_csv, "Per-episode metrics CSV")->required();

  // render
  auto* render = app.add_subcommand("render", "Replay an action file and dump frames as PGM");
  int rd_seq = 1;
  std::uint64_t rd_seed = 0;
  std::string rd_actions, rd_dir;
  render->add_option("--sequence", rd_seq, "Curriculum sequence id");
  render->add_option("--seed", rd_seed, "Episode seed");
  render->add_option("--actions", rd_actions, "Whitespace-separated action names or indices 0..6")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--out-dir", rd_dir, "Output directory")->required();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Compute metrics for a saved episode log");
  std::string mt_log;
  metrics->add_option("--log", mt_log, "Episode log")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const Assets& assets = common.assets();

    if (*serve) {
      if (tcp_port) {
        protocol::TcpServer server(static_cast<std::uint16_t>(*tcp_port), assets);
        std::cerr << "listening on 127.0.0.1:" << server.port() << std::endl;
        server.run();
      } else {
        protocol::serve_stream(std::cin, std::cout, assets);
      }
      return 0;
    }

    if (*roll) {
      const auto kind = parse_policy(policy_name);
      if (!kind) throw ConfigError("unknown policy '" + policy_name + "'");
      EnvConfig cfg;
      cfg.sequence = roll_seq;
      cfg.seed = roll_seed;
      roll_flags.apply(cfg);
      const ScriptedPolicy policy{*kind, roll_seed};
      const auto rows = rollout(policy, cfg, roll_eps, assets);
      write_csv(roll_csv, rows);
      if (!roll_log.empty()) {
        Env env(assets);
        EnvConfig first = cfg;
        first.render = false;
        auto out = open_out(roll_log);
        write_episode_log(out, first, run_episode(env, first, policy));
      }
      write_summary(std::cout, summarize(rows), cfg, policy_name);
      return 0;
    }

    if (*trainq) {
      EnvConfig cfg;
      cfg.sequence = tq_seq;
      cfg.seed = tq_seed;
      tq_flags.apply(cfg);
      const TrainResult r = train(learner, cfg, assets);
      save_qtable(tq_out, r.table);
      auto out = open_out(tq_report);
      out << to_json(r.report).dump(2) << '\n';
      std::cout << "final_success_rate=" << text::format_double(r.report.final_window().success_rate) << '\n'
                << "final_loop_fraction=" << text::format_double(r.report.final_window().loop_fraction) << '\n'
                << "states=" << r.table.size() << '\n';
      return 0;
    }

    if (*eval) {
      const QTable table = load_qtable(ev_table);
      const EvalResult r = evaluate(table, ev_seq.value_or(table.sequence()), ev_eps, ev_seed, {}, assets);
      write_csv(ev_csv, r.rows);
      std::cout << "success_rate=" << text::format_double(r.success_rate) << '\n';
      return 0;
    }

    if (*render) {
      const auto actions = read_actions(rd_actions);
      fs::create_directories(rd_dir);
      Env env(assets);
      EnvConfig cfg;
      cfg.sequence = rd_seq;
      cfg.seed = rd_seed;
      env.reset(cfg);
      auto dump = [&](std::size_t i) {
        char name[32];
        std::snprintf(name, sizeof name, "%04zu", i);
        save_pgm(fs::path(rd_dir) / ("frame_" + std::string(name) + ".pgm"), env.latest_frames().gray);
        save_pgm(fs::path(rd_dir) / ("mask_" + std::string(name) + ".pgm"), env.latest_frames().mask);
      };
      dump(0);
      std::size_t i = 0;
      for (; i < actions.size() && !env.done(); ++i) {
        env.step(actions[i]);
        dump(i + 1);
      }
      auto log = open_out(fs::path(rd_dir) / "episode.log");
      write_episode_log(log, cfg, env.log());
      std::cout << "frames=" << i + 1 << '\n' << "outcome=" << outcome_name(env.outcome()) << '\n';
      if (i < actions.size()) std::cout << "ignored_actions=" << actions.size() - i << '\n';
      return 0;
    }

    if (*metrics) {
      std::ifstream in(mt_log);
      if (!in) throw IoError("cannot read " + mt_log);
      const PersistedEpisode p = read_episode_log(in);
      const EpisodeLog replayed = replay(p, assets);
      print_metrics(std::cout, episode_metrics(0, p.log, assets.maps));
      std::cout << "replay_consistent=" << (replayed.steps == p.log.steps ? 1 : 0) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
