#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace eit {

using CsvCell = std::variant<double, long long, std::string>;

// Self-describing CSV: "# " + compact resolved-config JSON, a header row,
// then rows. Reals use 9 significant digits in scientific notation.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const nlohmann::json& config, std::vector<std::string> columns);

  void row(const std::vector<CsvCell>& cells);

 private:
  std::ostream& out_;
  std::size_t width_;
};

std::string format_real(double v);

}  // namespace eit
