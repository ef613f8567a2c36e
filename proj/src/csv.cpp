#include "fods/experiments/csv.hpp"

#include "fods/types.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fods::experiments {

std::string format_value(double v) { return detail::g17(v); }

std::string to_csv_text(const Table& table) {
  std::string out;
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_value(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const Table& table) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << to_csv_text(table);
  if (!file.flush()) throw IoError("write failed for " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path, size_t line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0')
    throw IoError(path + ":" + std::to_string(line_no) + ": cell \"" + cell +
                  "\" is not a number");
  return v;
}

}  // namespace

Table read_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for reading");
  Table table;
  std::string line;
  if (!std::getline(file, line)) throw IoError(path + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.columns = split_line(line);
  for (const auto& name : table.columns)
    if (name.empty()) throw IoError(path + ": empty column name in header");

  size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.columns.size())
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(table.columns.size()) + " cells, found " +
                    std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_cell(cell, path, line_no));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace fods::experiments
