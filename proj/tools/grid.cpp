#include "grid.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "eit/errors.hpp"

namespace eitsim {

namespace {

double to_number(const std::string& s, const std::string& grid) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw eit::ConfigError("bad number '" + s + "' in grid '" + grid + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw eit::ConfigError("grid '" + text + "' must be a:b:n or a:b:nlog");
    const double a = to_number(parts[0], text), b = to_number(parts[1], text);
    std::string count = parts[2];
    const bool geometric = count.size() > 3 && count.substr(count.size() - 3) == "log";
    if (geometric) count.resize(count.size() - 3);
    const double nd = to_number(count, text);
    if (nd < 1 || nd != std::floor(nd) || nd > 1e6) {
      throw eit::ConfigError("grid '" + text + "' needs a positive integer count");
    }
    const auto n = static_cast<std::size_t>(nd);
    if (geometric && !(a > 0.0 && b > 0.0)) {
      throw eit::ConfigError("logarithmic grid '" + text + "' needs positive end points");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out[i] = geometric ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a);
    }
    out.front() = a;
    if (n > 1) out.back() = b;
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(to_number(p, text));
  if (out.empty()) throw eit::ConfigError("empty grid");
  return out;
}

}  // namespace eitsim
