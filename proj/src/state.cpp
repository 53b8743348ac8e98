#include "eit/state.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "eit/errors.hpp"

namespace eit {
namespace {

int parse_int(std::string_view text, std::string_view context) {
  int value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ConfigError("cannot parse '" + std::string(text) + "' in " + std::string(context));
  }
  return value;
}

}  // namespace

HalfInt HalfInt::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return from_int(parse_int(text, "angular momentum"));
  const int num = parse_int(text.substr(0, slash), "angular momentum");
  if (text.substr(slash + 1) != "2") {
    throw ConfigError("angular momentum denominator must be 2: " + std::string(text));
  }
  if (num % 2 == 0) throw ConfigError("write integer momenta without /2: " + std::string(text));
  return from_twice(num);
}

std::string HalfInt::to_string() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

std::string_view manifold_name(Manifold m) {
  switch (m) {
    case Manifold::S1_2_6: return "6S1/2";
    case Manifold::P1_2_6: return "6P1/2";
    case Manifold::P3_2_6: return "6P3/2";
    case Manifold::S1_2_7: return "7S1/2";
  }
  return "?";
}

Manifold parse_manifold(std::string_view name) {
  for (Manifold m : {Manifold::S1_2_6, Manifold::P1_2_6, Manifold::P3_2_6, Manifold::S1_2_7}) {
    if (manifold_name(m) == name) return m;
  }
  throw ConfigError("unknown manifold '" + std::string(name) + "'");
}

HalfInt manifold_j(Manifold m) {
  return m == Manifold::P3_2_6 ? HalfInt::from_twice(3) : HalfInt::from_twice(1);
}

Tier manifold_tier(Manifold m) {
  switch (m) {
    case Manifold::S1_2_6: return Tier::Ground;
    case Manifold::P1_2_6:
    case Manifold::P3_2_6: return Tier::Intermediate;
    case Manifold::S1_2_7: return Tier::Excited;
  }
  return Tier::Ground;
}

StateLabel StateLabel::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) {
    throw ConfigError("state label must look like 'manifold:F:mF', got '" +
                      std::string(text) + "'");
  }
  StateLabel s{parse_manifold(parts[0]), HalfInt::parse(parts[1]), HalfInt::parse(parts[2])};
  if (s.F.twice() < 0 || std::abs(s.mF.twice()) > s.F.twice() ||
      (s.F.twice() - s.mF.twice()) % 2 != 0) {
    throw ConfigError("invalid sublevel '" + std::string(text) + "'");
  }
  return s;
}

std::string StateLabel::to_string() const {
  return std::string(manifold_name(manifold)) + ":" + F.to_string() + ":" + mF.to_string();
}

}  // namespace eit
