// Column-oriented numeric tables with round-trip-exact CSV serialization.
#pragma once

#include <string>
#include <vector>

namespace fods::experiments {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // every row has columns.size() cells
};

// Shortest decimal that reparses to the same double (17 significant digits).
std::string format_value(double v);

// Header line plus one line per row, '\n' separators, no trailing spaces.
std::string to_csv_text(const Table& table);

// Writes to_csv_text(table) to `path`; IoError when the file cannot be written.
void write_csv(const std::string& path, const Table& table);

// Parses a CSV produced by write_csv. IoError on unreadable files, ragged
// rows, or cells that do not parse as finite-or-infinite doubles.
Table read_csv(const std::string& path);

}  // namespace fods::experiments
