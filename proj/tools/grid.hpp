#pragma once

#include <string>
#include <vector>

namespace eitsim {

// "a:b:n" (linear, inclusive), "a:b:nlog" (geometric), "x,y,z" or a single
// value. Throws eit::ConfigError on malformed input.
std::vector<double> parse_grid(const std::string& text);

}  // namespace eitsim
