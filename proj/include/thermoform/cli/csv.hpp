#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "thermoform/error.hpp"

namespace thermoform::cli {

// Shortest round-trip decimal; +inf is written as `inf`. NaN is never emitted.
inline std::string format_number(double v) {
  if (std::isnan(v)) throw Error("refusing to write NaN to CSV");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // no negative zero
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw Error("CSV row width differs from the header");
    rows.push_back(std::move(row));
  }

  void add_numbers(const std::vector<double>& row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_number(v));
    add(std::move(cells));
  }

  void write(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
      }
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }
};

}  // namespace thermoform::cli
