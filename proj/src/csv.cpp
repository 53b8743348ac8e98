#include "eit/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace eit {

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const nlohmann::json& config,
                     std::vector<std::string> columns)
    : out_(out), width_(columns.size()) {
  out_ << "# " << config.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != width_) throw std::logic_error("CSV row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_real(v);
          } else {
            out_ << v;
          }
        },
        cells[i]);
  }
  out_ << '\n';
}

}  // namespace eit
