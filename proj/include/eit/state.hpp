#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace eit {

// Angular momentum quantum number stored as twice its value so that
// half-integers are exact.
class HalfInt {
 public:
  constexpr HalfInt() = default;

  static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
  static constexpr HalfInt from_int(int value) { return HalfInt(2 * value); }

  // Parses "3", "-2", "7/2", "-1/2".
  static HalfInt parse(std::string_view text);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }

  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string to_string() const;

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

enum class Manifold : std::uint8_t { S1_2_6, P1_2_6, P3_2_6, S1_2_7 };

// Position of a manifold on the ladder ground -> intermediate -> excited.
enum class Tier : std::uint8_t { Ground, Intermediate, Excited };

std::string_view manifold_name(Manifold m);
Manifold parse_manifold(std::string_view name);
HalfInt manifold_j(Manifold m);
Tier manifold_tier(Manifold m);

// |F, mF> sublevel of one electronic manifold, e.g. "6P3/2:5:5".
struct StateLabel {
  Manifold manifold = Manifold::S1_2_6;
  HalfInt F;
  HalfInt mF;

  static StateLabel parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const StateLabel&) const = default;
};

// Shorthands for the cesium levels used throughout.
inline StateLabel ground(int f, int mf) {
  return {Manifold::S1_2_6, HalfInt::from_int(f), HalfInt::from_int(mf)};
}
inline StateLabel d1(int f, int mf) {
  return {Manifold::P1_2_6, HalfInt::from_int(f), HalfInt::from_int(mf)};
}
inline StateLabel d2(int f, int mf) {
  return {Manifold::P3_2_6, HalfInt::from_int(f), HalfInt::from_int(mf)};
}
inline StateLabel seven_s(int f, int mf) {
  return {Manifold::S1_2_7, HalfInt::from_int(f), HalfInt::from_int(mf)};
}

}  // namespace eit
