#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace georelay {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Appends rows of a table with the same header.
  void append(const CsvTable& other);
};

/// Locale-independent "%.12g"; NaN is written as an empty field.
std::string format_number(double x);
std::string format_vector(const std::vector<int>& v);

/// RFC 4180 quoting for one field.
std::string csv_field(const std::string& value);
void write_csv(std::ostream& out, const CsvTable& table);

}  // namespace georelay
