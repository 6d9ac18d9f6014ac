#pragma once

// Random protocol messages and a scripted two-connection TCP check.

#include <string>
#include <vector>

#include "pokerl/pokerl.hpp"

namespace gen {

using namespace pokerl;
using namespace pokerl::protocol;

inline std::vector<std::uint8_t> bytes(SplitMix64& r, std::size_t max_len) {
  std::vector<std::uint8_t> v(r.below(static_cast<std::uint32_t>(max_len + 1)));
  for (auto& b : v) b = static_cast<std::uint8_t>(r.below(256));
  return v;
}

inline double real(SplitMix64& r) {
  switch (r.below(4)) {
    case 0: return 0.0;
    case 1: return -0.3 * r.below(10);
    case 2: return r.uniform() * 1e6 - 5e5;
    default: return 1.0 / (1.0 + r.below(1000));
  }
}

inline Info info(SplitMix64& r) {
  Info i;
  for (std::uint16_t a : {0xD35E, 0xD361, 0xD362, 0xD057, 0xD16C, 0xCFE6})
    if (r.below(4)) i.memory[a] = static_cast<std::uint8_t>(r.below(256));
  i.outcome = static_cast<EpisodeOutcome>(r.below(4));
  i.step = r.next();
  i.events.moved = r.below(2);
  i.events.new_tile = r.below(2);
  if (r.below(2)) i.events.entered_map = static_cast<MapId>(r.below(256));
  i.events.first_map_entry = r.below(2);
  i.events.entered_grass = r.below(2);
  i.events.battle_started = r.below(2);
  i.events.battle_won = r.below(2);
  i.events.battle_lost = r.below(2);
  if (r.below(2)) i.events.scripted_event = static_cast<int>(r.below(100));
  i.events.distance_moved = real(r);
  return i;
}

inline Request request(SplitMix64& r) {
  switch (r.below(5)) {
    case 0: {
      ResetRequest q;
      q.sequence = 1 + static_cast<int>(r.below(3));
      q.seed = r.next();
      q.anti_loop = r.below(2);
      q.anti_spam = r.below(2);
      q.mask = r.below(2);
      if (r.below(2)) q.step_limit = 1 + r.below(5000);
      return q;
    }
    case 1: return StepRequest{static_cast<Action>(r.below(kNumActions))};
    case 2: return RenderRequest{};
    case 3: return MemoryRequest{};
    default: return CloseRequest{};
  }
}

inline Reply reply(SplitMix64& r) {
  switch (r.below(6)) {
    case 0: return ResetReply{bytes(r, 300), info(r)};
    case 1: {
      StepReply s;
      s.obs = bytes(r, 300);
      s.reward = real(r);
      s.terminated = r.below(2);
      s.truncated = !s.terminated && r.below(2);
      for (std::size_t k = 0; k < kNumComponents; ++k)
        if (r.below(3) == 0) s.breakdown.emplace_back(std::string(kComponentNames[k]), real(r));
      s.info = info(r);
      return s;
    }
    case 2: return RenderReply{bytes(r, 100), bytes(r, 100)};
    case 3: return MemoryReply{info(r).memory};
    case 4: return CloseReply{};
    default: {
      std::string reason;
      for (auto b : bytes(r, 40)) reason += static_cast<char>(32 + b % 95);
      return ErrorReply{reason};
    }
  }
}

/// Lines that must produce an error reply, never a dropped connection.
inline const std::vector<std::string>& malformed_lines() {
  static const std::vector<std::string> lines = {
      "not json",
      "{",
      "[]",
      "42",
      "{}",
      R"({"cmd":7})",
      R"({"cmd":"fly"})",
      R"({"cmd":"step"})",
      R"({"cmd":"step","action":9})",
      R"({"cmd":"step","action":-1})",
      R"({"cmd":"step","action":"up"})",
      R"({"cmd":"step","action":1.5})",
      R"({"cmd":"reset","sequence":"one"})",
      R"({"cmd":"reset","sequence":7})",
      R"({"cmd":"reset","step_limit":0})",
  };
  return lines;
}

/// Drives two sessions over separate TCP connections with interleaved requests
/// and compares each transcript with an in-process session fed the same lines.
struct InterleaveResult {
  bool independent = true;
  bool deterministic = true;
  bool survived_errors = true;
  std::size_t steps = 0;
};

inline InterleaveResult interleaved_tcp(std::uint64_t seed, std::size_t steps) {
  TcpServer server(0);
  server.start();
  TcpClient c1(server.port()), c2(server.port());
  Session ref1, ref2;
  InterleaveResult out;

  auto both = [&](TcpClient& c, Session& ref, const std::string& line) {
    const std::string got = c.request(line);
    const std::string want = ref.handle(line).response;
    if (got != want) out.deterministic = false;
    return got;
  };
  both(c1, ref1, encode(Request{ResetRequest{1, seed, true, true, true, std::nullopt}}));
  both(c2, ref2, encode(Request{ResetRequest{3, seed + 1, true, true, true, std::nullopt}}));

  auto rng = SplitMix64::seeded(seed, 99);
  for (std::size_t i = 0; i < steps; ++i) {
    auto [c, ref] = i % 2 ? std::tie(c2, ref2) : std::tie(c1, ref1);
    if (ref.env().done()) {
      both(c, ref, encode(Request{ResetRequest{i % 2 ? 3 : 1, seed + i, true, true, true, std::nullopt}}));
      continue;
    }
    if (i % 37 == 5) {
      const auto& bad = malformed_lines()[i % malformed_lines().size()];
      if (!std::holds_alternative<ErrorReply>(decode_reply(both(c, ref, bad)))) out.survived_errors = false;
    }
    both(c, ref, encode(Request{StepRequest{static_cast<Action>(rng.below(kNumActions))}}));
    ++out.steps;
  }
  // Each connection's environment only saw its own traffic.
  const auto m1 = std::get<MemoryReply>(c1.call(MemoryRequest{})).memory;
  const auto m2 = std::get<MemoryReply>(c2.call(MemoryRequest{})).memory;
  if (m1 != memory_view(ref1.env().state()) || m2 != memory_view(ref2.env().state())) out.independent = false;
  if (ref1.env().log().sequence == ref2.env().log().sequence) out.independent = false;
  c1.request(encode(Request{CloseRequest{}}));
  c2.request(encode(Request{CloseRequest{}}));
  server.stop();
  return out;
}

}  // namespace gen
