#include "georelay/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace georelay {

void CsvTable::append(const CsvTable& other) {
  if (header.empty()) header = other.header;
  if (other.header != header) throw std::invalid_argument("cannot append tables with different headers");
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string format_vector(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << csv_field(fields[i]);
    }
    out << "\r\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

}  // namespace georelay
