#include <gtest/gtest.h>

#include <sstream>

#include "protocol_gen.hpp"

using namespace pokerl;
using namespace pokerl::protocol;

TEST(Base64, EdgeCases) {
  EXPECT_EQ(base64::encode({}), "");
  const std::vector<std::uint8_t> one{0xFF}, two{0, 1}, three{1, 2, 3};
  EXPECT_EQ(base64::encode(one), "/w==");
  EXPECT_EQ(base64::encode(two), "AAE=");
  EXPECT_EQ(base64::encode(three), "AQID");
  EXPECT_EQ(*base64::decode("/w=="), one);
  EXPECT_EQ(*base64::decode(""), std::vector<std::uint8_t>{});
  EXPECT_FALSE(base64::decode("abc"));
  EXPECT_FALSE(base64::decode("a*=="));
  auto rng = SplitMix64::seeded(1, 2);
  for (int i = 0; i < 500; ++i) {
    const auto v = gen::bytes(rng, 200);
    ASSERT_EQ(*base64::decode(base64::encode(v)), v);
  }
}

TEST(Codec, RequestRoundTrip) {
  auto rng = SplitMix64::seeded(11, 0);
  for (int i = 0; i < 2000; ++i) {
    const Request r = gen::request(rng);
    const std::string line = encode(r);
    ASSERT_EQ(line.find('\n'), std::string::npos);
    ASSERT_EQ(decode_request(line), r) << line;
  }
}

TEST(Codec, ReplyRoundTrip) {
  auto rng = SplitMix64::seeded(12, 0);
  for (int i = 0; i < 2000; ++i) {
    const Reply r = gen::reply(rng);
    const std::string line = encode(r);
    ASSERT_EQ(line.find('\n'), std::string::npos);
    ASSERT_EQ(decode_reply(line), r) << line;
  }
}

TEST(Codec, RequestDefaults) {
  const auto r = std::get<ResetRequest>(decode_request(R"({"cmd":"reset"})"));
  EXPECT_EQ(r, ResetRequest{});
  EXPECT_EQ(std::get<StepRequest>(decode_request(R"({"cmd":"step","action":6})")).action, Action::NoOp);
}

TEST(Codec, MalformedRequestsThrowProtocolError) {
  const auto reason = [](std::string_view line) {
    try {
      decode_request(line);
    } catch (const ProtocolError& e) {
      return std::string(e.what());
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(reason("not json"), "malformed json");
  EXPECT_EQ(reason("{}"), "missing cmd");
  EXPECT_EQ(reason(R"({"cmd":"fly"})"), "unknown cmd");
  EXPECT_EQ(reason(R"({"cmd":"step","action":7})"), "action must be an integer 0..6");
  EXPECT_EQ(reason(R"({"cmd":"step","action":2.5})"), "action must be an integer 0..6");
}

TEST(Session, ErrorsKeepSessionAlive) {
  Session s;
  const auto first = decode_reply(s.handle(R"({"cmd":"step","action":0})").response);
  ASSERT_TRUE(std::holds_alternative<ErrorReply>(first));
  EXPECT_EQ(std::get<ErrorReply>(first).reason, "no episode; send reset first");

  ASSERT_TRUE(std::holds_alternative<ResetReply>(decode_reply(s.handle(R"({"cmd":"reset","seed":3})").response)));
  for (const auto& line : gen::malformed_lines()) {
    const auto o = s.handle(line);
    EXPECT_FALSE(o.close) << line;
    EXPECT_TRUE(std::holds_alternative<ErrorReply>(decode_reply(o.response))) << line;
  }
  // A rejected reset leaves the running episode untouched.
  EXPECT_EQ(s.env().sequence().id, 1);
  const auto step = decode_reply(s.handle(R"({"cmd":"step","action":3})").response);
  ASSERT_TRUE(std::holds_alternative<StepReply>(step));
  EXPECT_EQ(std::get<StepReply>(step).obs.size(), 46080u);
  EXPECT_EQ(std::get<StepReply>(step).info.step, 1u);
  EXPECT_TRUE(s.handle(R"({"cmd":"close"})").close);
}

TEST(Session, StepAfterTerminalIsAnError) {
  Session s;
  s.handle(R"({"cmd":"reset","step_limit":1})");
  const auto last = std::get<StepReply>(decode_reply(s.handle(R"({"cmd":"step","action":6})").response));
  EXPECT_TRUE(last.truncated);
  const auto again = decode_reply(s.handle(R"({"cmd":"step","action":6})").response);
  EXPECT_TRUE(std::holds_alternative<ErrorReply>(again));
}

TEST(Session, MatchesDirectEnv) {
  Session s;
  Env env;
  EnvConfig cfg;
  cfg.sequence = 2;
  cfg.seed = 5;
  const auto rr = std::get<ResetReply>(decode_reply(s.handle(encode(Request{ResetRequest{2, 5, true, true, true, {}}})).response));
  const auto direct = env.reset(cfg);
  EXPECT_TRUE(std::ranges::equal(rr.obs, direct.observation.data));
  EXPECT_EQ(rr.info.memory, direct.info.memory);
  auto rng = SplitMix64::seeded(5, 5);
  for (int i = 0; i < 200 && !env.done(); ++i) {
    const auto a = static_cast<Action>(rng.below(kNumActions));
    const auto sr = std::get<StepReply>(decode_reply(s.handle(encode(Request{StepRequest{a}})).response));
    const auto d = env.step(a);
    ASSERT_TRUE(std::ranges::equal(sr.obs, d.observation.data));
    ASSERT_EQ(sr.reward, d.reward);
    ASSERT_EQ(sr.terminated, d.terminated);
    ASSERT_EQ(sr.truncated, d.truncated);
    double sum = 0.0;
    for (const auto& [k, v] : sr.breakdown) sum += v;
    ASSERT_DOUBLE_EQ(sum, sr.reward);
  }
  const auto render = std::get<RenderReply>(decode_reply(s.handle(R"({"cmd":"render"})").response));
  EXPECT_EQ(render.gray.size(), kFrameBytes);
  EXPECT_TRUE(std::ranges::equal(render.gray, env.latest_frames().gray.px));
  const auto mem = std::get<MemoryReply>(decode_reply(s.handle(R"({"cmd":"memory"})").response));
  EXPECT_EQ(mem.memory, memory_view(env.state()));
}

TEST(Stdio, ServeStreamAnswersEveryLine) {
  std::stringstream in;
  in << "garbage\n" << R"({"cmd":"reset"})" << "\n\n" << R"({"cmd":"step","action":1})" << "\n"
     << R"({"cmd":"close"})" << "\n" << R"({"cmd":"memory"})" << "\n";
  std::stringstream out;
  serve_stream(in, out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(out, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 4u);  // blank line skipped; nothing read after close
  EXPECT_TRUE(std::holds_alternative<ErrorReply>(decode_reply(lines[0])));
  EXPECT_TRUE(std::holds_alternative<ResetReply>(decode_reply(lines[1])));
  EXPECT_TRUE(std::holds_alternative<StepReply>(decode_reply(lines[2])));
  EXPECT_TRUE(std::holds_alternative<CloseReply>(decode_reply(lines[3])));
}

TEST(Tcp, InterleavedConnectionsAreIndependentAndDeterministic) {
  const auto r = gen::interleaved_tcp(21, 400);
  EXPECT_TRUE(r.deterministic);
  EXPECT_TRUE(r.independent);
  EXPECT_TRUE(r.survived_errors);
  EXPECT_GT(r.steps, 300u);
}

TEST(Tcp, ConnectToClosedPortFails) {
  std::uint16_t port;
  {
    TcpServer s(0);
    port = s.port();
  }
  EXPECT_THROW(TcpClient c(port), IoError);
}
