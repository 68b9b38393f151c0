#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace isotropy::harness {

/// Empty | integer | unsigned | real | text | flag
using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string, bool>;

/// Result rows with a fixed header. CSV: comma separated, LF line ends,
/// reals with 17 significant digits, empty cells for missing values.
/// JSON: an array of objects keyed by the same column names.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;
};

std::string cell_to_csv(const Cell& cell);
void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);

std::string to_csv(const Table& table);

}  // namespace isotropy::harness
