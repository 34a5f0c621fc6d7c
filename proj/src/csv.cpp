#include "ssdu/csv.hpp"

#include <cstdio>

#include "ssdu/errors.hpp"

namespace ssdu {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::string out;
  auto join = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  join(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw DataError("csv: row width mismatch");
    join(row);
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  const std::string body = to_string();
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw FormatError("csv: cannot open '" + path + "' for writing");
  const size_t n = std::fwrite(body.data(), 1, body.size(), f);
  const int rc = std::fclose(f);
  if (n != body.size() || rc != 0) throw FormatError("csv: short write to '" + path + "'");
}

CsvTable CsvTable::read(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw FormatError("csv: cannot open '" + path + "'");
  std::string body;
  char buf[4096];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) body.append(buf, got);
  std::fclose(f);

  CsvTable t;
  std::vector<std::string> line;
  std::string cell;
  bool first = true;
  for (char c : body) {
    if (c == ',') {
      line.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      line.push_back(std::move(cell));
      cell.clear();
      if (first) {
        t.header = std::move(line);
        first = false;
      } else {
        t.rows.push_back(std::move(line));
      }
      line.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  if (!cell.empty() || !line.empty()) {
    line.push_back(std::move(cell));
    if (first)
      t.header = std::move(line);
    else
      t.rows.push_back(std::move(line));
  }
  return t;
}

}  // namespace ssdu
