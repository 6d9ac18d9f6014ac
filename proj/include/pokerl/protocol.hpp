#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pokerl/base64.hpp"
#include "pokerl/env.hpp"
#include "pokerl/error.hpp"

// Newline-delimited JSON. Each request line gets exactly one response line.
//
//   {"cmd":"reset","sequence":1,"seed":7}            -> {"status":"ok","cmd":"reset","obs":"<b64>","info":{...}}
//   {"cmd":"step","action":4}                        -> {"status":"ok","cmd":"step","obs":...,"reward":...,
//                                                        "terminated":...,"truncated":...,"breakdown":{...},"info":{...}}
//   {"cmd":"render"}                                 -> {"status":"ok","cmd":"render","gray":"<b64>","mask":"<b64>",
//                                                        "width":80,"height":72}
//   {"cmd":"memory"}                                 -> {"status":"ok","cmd":"memory","memory":{"0xD35E":38,...}}
//   {"cmd":"close"}                                  -> {"status":"ok","cmd":"close"}
//   anything else                                    -> {"status":"error","reason":"..."}
//
// reset also accepts "anti_loop", "anti_spam", "mask" (booleans) and "step_limit".

namespace pokerl::protocol {

struct ProtocolError : Error {
  using Error::Error;
};

struct ResetRequest {
  int sequence = 1;
  std::uint64_t seed = 0;
  bool anti_loop = true;
  bool anti_spam = true;
  bool mask = true;
  std::optional<std::uint64_t> step_limit;
  friend bool operator==(const ResetRequest&, const ResetRequest&) = default;
};
struct StepRequest {
  Action action = Action::NoOp;
  friend bool operator==(const StepRequest&, const StepRequest&) = default;
};
struct RenderRequest {
  friend bool operator==(const RenderRequest&, const RenderRequest&) = default;
};
struct MemoryRequest {
  friend bool operator==(const MemoryRequest&, const MemoryRequest&) = default;
};
struct CloseRequest {
  friend bool operator==(const CloseRequest&, const CloseRequest&) = default;
};
using Request = std::variant<ResetRequest, StepRequest, RenderRequest, MemoryRequest, CloseRequest>;

struct Info {
  MemoryView memory;
  EpisodeOutcome outcome = EpisodeOutcome::Running;
  std::uint64_t step = 0;
  EventSet events;
  friend bool operator==(const Info&, const Info&) = default;
};
struct ResetReply {
  std::vector<std::uint8_t> obs;
  Info info;
  friend bool operator==(const ResetReply&, const ResetReply&) = default;
};
struct StepReply {
  std::vector<std::uint8_t> obs;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  std::vector<std::pair<std::string, double>> breakdown;  // column order
  Info info;
  friend bool operator==(const StepReply&, const StepReply&) = default;
};
struct RenderReply {
  std::vector<std::uint8_t> gray;
  std::vector<std::uint8_t> mask;
  friend bool operator==(const RenderReply&, const RenderReply&) = default;
};
struct MemoryReply {
  MemoryView memory;
  friend bool operator==(const MemoryReply&, const MemoryReply&) = default;
};
struct CloseReply {
  friend bool operator==(const CloseReply&, const CloseReply&) = default;
};
struct ErrorReply {
  std::string reason;
  friend bool operator==(const ErrorReply&, const ErrorReply&) = default;
};
using Reply = std::variant<ResetReply, StepReply, RenderReply, MemoryReply, CloseReply, ErrorReply>;

namespace detail {

using nlohmann::json;

inline std::string hex_address(std::uint16_t a) {
  static constexpr char digits[] = "0123456789ABCDEF";
  std::string s = "0x";
  for (int shift = 12; shift >= 0; shift -= 4) s += digits[(a >> shift) & 0xF];
  return s;
}

inline json memory_json(const MemoryView& m) {
  json j = json::object();
  for (auto [addr, byte] : m) j[hex_address(addr)] = byte;
  return j;
}

inline MemoryView memory_from_json(const json& j) {
  MemoryView m;
  for (const auto& [k, v] : j.items()) {
    if (k.size() != 6 || k.rfind("0x", 0) != 0) throw ProtocolError("bad memory address '" + k + "'");
    m[static_cast<std::uint16_t>(std::stoul(k.substr(2), nullptr, 16))] = v.get<std::uint8_t>();
  }
  return m;
}

inline json events_json(const EventSet& e) {
  json j;
  j["moved"] = e.moved;
  j["new_tile"] = e.new_tile;
  j["entered_map"] = e.entered_map ? json(*e.entered_map) : json(nullptr);
  j["first_map_entry"] = e.first_map_entry;
  j["entered_grass"] = e.entered_grass;
  j["battle_started"] = e.battle_started;
  j["battle_won"] = e.battle_won;
  j["battle_lost"] = e.battle_lost;
  j["scripted_event"] = e.scripted_event ? json(*e.scripted_event) : json(nullptr);
  j["distance_moved"] = e.distance_moved;
  return j;
}

inline EventSet events_from_json(const json& j) {
  EventSet e;
  e.moved = j.at("moved").get<bool>();
  e.new_tile = j.at("new_tile").get<bool>();
  if (!j.at("entered_map").is_null()) e.entered_map = j.at("entered_map").get<MapId>();
  e.first_map_entry = j.at("first_map_entry").get<bool>();
  e.entered_grass = j.at("entered_grass").get<bool>();
  e.battle_started = j.at("battle_started").get<bool>();
  e.battle_won = j.at("battle_won").get<bool>();
  e.battle_lost = j.at("battle_lost").get<bool>();
  if (!j.at("scripted_event").is_null()) e.scripted_event = j.at("scripted_event").get<int>();
  e.distance_moved = j.at("distance_moved").get<double>();
  return e;
}

inline json info_json(const Info& i) {
  return {{"memory", memory_json(i.memory)},
          {"outcome", std::string(outcome_name(i.outcome))},
          {"step", i.step},
          {"events", events_json(i.events)}};
}

inline Info info_from_json(const json& j) {
  Info i;
  i.memory = memory_from_json(j.at("memory"));
  auto o = parse_outcome(j.at("outcome").get<std::string>());
  if (!o) throw ProtocolError("bad outcome");
  i.outcome = *o;
  i.step = j.at("step").get<std::uint64_t>();
  i.events = events_from_json(j.at("events"));
  return i;
}

inline std::vector<std::uint8_t> bytes_from_b64(const json& j) {
  auto v = base64::decode(j.get<std::string>());
  if (!v) throw ProtocolError("bad base64 payload");
  return *v;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

inline std::string encode(const Request& req) {
  using detail::json;
  json j = std::visit(detail::overloaded{
                          [](const ResetRequest& r) {
                            json j = {{"cmd", "reset"},      {"sequence", r.sequence},   {"seed", r.seed},
                                      {"anti_loop", r.anti_loop}, {"anti_spam", r.anti_spam}, {"mask", r.mask}};
                            if (r.step_limit) j["step_limit"] = *r.step_limit;
                            return j;
                          },
                          [](const StepRequest& r) { return json{{"cmd", "step"}, {"action", index_of(r.action)}}; },
                          [](const RenderRequest&) { return json{{"cmd", "render"}}; },
                          [](const MemoryRequest&) { return json{{"cmd", "memory"}}; },
                          [](const CloseRequest&) { return json{{"cmd", "close"}}; },
                      },
                      req);
  return j.dump();
}

/// Parses one request line. Throws ProtocolError with a client-facing reason.
inline Request decode_request(std::string_view line) {
  using detail::json;
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw ProtocolError("malformed json");
  }
  if (!j.is_object()) throw ProtocolError("request must be a json object");
  if (!j.contains("cmd") || !j["cmd"].is_string()) throw ProtocolError("missing cmd");
  const std::string cmd = j["cmd"].get<std::string>();
  try {
    if (cmd == "reset") {
      ResetRequest r;
      if (j.contains("sequence")) r.sequence = j["sequence"].get<int>();
      if (j.contains("seed")) r.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("anti_loop")) r.anti_loop = j["anti_loop"].get<bool>();
      if (j.contains("anti_spam")) r.anti_spam = j["anti_spam"].get<bool>();
      if (j.contains("mask")) r.mask = j["mask"].get<bool>();
      if (j.contains("step_limit") && !j["step_limit"].is_null()) r.step_limit = j["step_limit"].get<std::uint64_t>();
      return r;
    }
    if (cmd == "step") {
      if (!j.contains("action") || !j["action"].is_number_integer()) throw ProtocolError("action must be an integer 0..6");
      auto a = action_from_index(j["action"].get<long long>());
      if (!a) throw ProtocolError("action must be an integer 0..6");
      return StepRequest{*a};
    }
    if (cmd == "render") return RenderRequest{};
    if (cmd == "memory") return MemoryRequest{};
    if (cmd == "close") return CloseRequest{};
  } catch (const json::exception& e) {
    throw ProtocolError("bad field for " + cmd + ": " + e.what());
  }
  throw ProtocolError("unknown cmd");
}

inline std::string encode(const Reply& reply) {
  using detail::json;
  json j = std::visit(
      detail::overloaded{
          [](const ResetReply& r) {
            return json{{"status", "ok"}, {"cmd", "reset"}, {"obs", base64::encode(r.obs)}, {"info", detail::info_json(r.info)}};
          },
          [](const StepReply& r) {
            json bd = json::object();
            for (const auto& [k, v] : r.breakdown) bd[k] = v;
            return json{{"status", "ok"},         {"cmd", "step"},        {"obs", base64::encode(r.obs)},
                        {"reward", r.reward},     {"terminated", r.terminated}, {"truncated", r.truncated},
                        {"breakdown", bd},        {"info", detail::info_json(r.info)}};
          },
          [](const RenderReply& r) {
            return json{{"status", "ok"},   {"cmd", "render"}, {"gray", base64::encode(r.gray)},
                        {"mask", base64::encode(r.mask)}, {"width", kFrameCols}, {"height", kFrameRows}};
          },
          [](const MemoryReply& r) {
            return json{{"status", "ok"}, {"cmd", "memory"}, {"memory", detail::memory_json(r.memory)}};
          },
          [](const CloseReply&) { return json{{"status", "ok"}, {"cmd", "close"}}; },
          [](const ErrorReply& r) { return json{{"status", "error"}, {"reason", r.reason}}; },
      },
      reply);
  return j.dump();
}

/// Client-side parse of a reply line.
inline Reply decode_reply(std::string_view line) {
  using detail::json;
  try {
    const json j = json::parse(line);
    const std::string status = j.at("status").get<std::string>();
    if (status == "error") return ErrorReply{j.at("reason").get<std::string>()};
    if (status != "ok") throw ProtocolError("bad status");
    const std::string cmd = j.at("cmd").get<std::string>();
    if (cmd == "reset") return ResetReply{detail::bytes_from_b64(j.at("obs")), detail::info_from_json(j.at("info"))};
    if (cmd == "step") {
      StepReply r;
      r.obs = detail::bytes_from_b64(j.at("obs"));
      r.reward = j.at("reward").get<double>();
      r.terminated = j.at("terminated").get<bool>();
      r.truncated = j.at("truncated").get<bool>();
      // json objects iterate in key order; restore column order.
      for (std::size_t k = 0; k < kNumComponents; ++k) {
        const std::string name(kComponentNames[k]);
        if (j.at("breakdown").contains(name)) r.breakdown.emplace_back(name, j.at("breakdown").at(name).get<double>());
      }
      r.info = detail::info_from_json(j.at("info"));
      return r;
    }
    if (cmd == "render") return RenderReply{detail::bytes_from_b64(j.at("gray")), detail::bytes_from_b64(j.at("mask"))};
    if (cmd == "memory") return MemoryReply{detail::memory_from_json(j.at("memory"))};
    if (cmd == "close") return CloseReply{};
    throw ProtocolError("unknown reply cmd");
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed reply: ") + e.what());
  }
}

/// One connection's environment. Not shared between connections.
class Session {
 public:
  explicit Session(const Assets& assets = default_assets()) : env_(assets) {}

  struct Outcome {
    std::string response;
    bool close = false;
  };

  Outcome handle(std::string_view line) {
    try {
      const Request req = decode_request(line);
      if (std::holds_alternative<CloseRequest>(req)) return {encode(Reply{CloseReply{}}), true};
      return {encode(dispatch(req)), false};
    } catch (const Error& e) {
      return {encode(Reply{ErrorReply{e.what()}}), false};
    }
  }

  const Env& env() const noexcept { return env_; }

 private:
  Reply dispatch(const Request& req) {
    if (const auto* r = std::get_if<ResetRequest>(&req)) {
      EnvConfig cfg;
      cfg.sequence = r->sequence;
      cfg.seed = r->seed;
      cfg.shaping = {r->anti_loop, r->anti_spam};
      cfg.visited_mask_in_obs = r->mask;
      cfg.step_limit = r->step_limit;
      const ResetResult res = env_.reset(cfg);
      ready_ = true;
      return ResetReply{bytes(res.observation), info(res.info)};
    }
    if (!ready_) throw ProtocolError("no episode; send reset first");
    if (const auto* r = std::get_if<StepRequest>(&req)) {
      const StepResult res = env_.step(r->action);
      StepReply out;
      out.obs = bytes(res.observation);
      out.reward = res.reward;
      out.terminated = res.terminated;
      out.truncated = res.truncated;
      for (const auto& [k, v] : res.breakdown.entries()) out.breakdown.emplace_back(std::string(k), v);
      out.info = info(res.info);
      return out;
    }
    if (std::holds_alternative<RenderRequest>(req)) {
      const FramePair& f = env_.latest_frames();
      return RenderReply{{f.gray.px.begin(), f.gray.px.end()}, {f.mask.px.begin(), f.mask.px.end()}};
    }
    return MemoryReply{memory_view(env_.state())};
  }

  static std::vector<std::uint8_t> bytes(const ObservationStack& o) { return {o.data.begin(), o.data.end()}; }
  static Info info(const StepInfo& i) { return {i.memory, i.outcome, i.step_count, i.events}; }

  Env env_;
  bool ready_ = false;
};

}  // namespace pokerl::protocol
