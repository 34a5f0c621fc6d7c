#pragma once

#include <string>
#include <vector>

namespace ssdu {

// Full-precision float formatting for CSV output: %.17g, '.' decimal point.
std::string g17(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  void write(const std::string& path) const;
  static CsvTable read(const std::string& path);
};

}  // namespace ssdu
