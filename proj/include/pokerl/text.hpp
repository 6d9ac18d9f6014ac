#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pokerl/error.hpp"
#include "pokerl/tilemap.hpp"

namespace pokerl::text {

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

/// `tag k1=v1 k2=v2 ...`, preserving field order.
struct Record {
  std::string tag;
  std::vector<std::pair<std::string, std::string>> fields;

  const std::string* find(std::string_view key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return &v;
    return nullptr;
  }
  const std::string& get(std::string_view key) const {
    if (const std::string* v = find(key)) return *v;
    throw ParseError("record '" + tag + "' is missing '" + std::string(key) + "'");
  }
  template <class Int>
  Int get_int(std::string_view key) const {
    if (auto v = parse_int<Int>(get(key))) return *v;
    throw ParseError("record '" + tag + "': bad integer for '" + std::string(key) + "'");
  }
  double get_double(std::string_view key) const {
    if (auto v = parse_double(get(key))) return *v;
    throw ParseError("record '" + tag + "': bad number for '" + std::string(key) + "'");
  }
  bool get_bool(std::string_view key) const { return get_int<int>(key) != 0; }

  void add(std::string key, std::string value) { fields.emplace_back(std::move(key), std::move(value)); }

  std::string str() const {
    std::string out = tag;
    for (const auto& [k, v] : fields) out += " " + k + "=" + v;
    return out;
  }
};

inline Record parse_record(std::string_view line) {
  auto f = pokerl::detail::split_ws(line);
  if (f.empty()) throw ParseError("empty record");
  Record r;
  r.tag = std::string(f[0]);
  for (std::size_t i = 1; i < f.size(); ++i) {
    const auto eq = f[i].find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value, got '" + std::string(f[i]) + "'");
    r.add(std::string(f[i].substr(0, eq)), std::string(f[i].substr(eq + 1)));
  }
  return r;
}

}  // namespace pokerl::text
