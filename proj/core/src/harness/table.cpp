#include "isotropy/harness/table.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "isotropy/format.hpp"

namespace isotropy::harness {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error("Table::add_row: expected " + std::to_string(columns.size()) + " cells, got " +
                           std::to_string(row.size()));
  rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("Table: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string cell_to_csv(const Cell& cell) {
  return std::visit(Overloaded{
                        [](std::monostate) { return std::string(); },
                        [](std::int64_t v) { return std::to_string(v); },
                        [](std::uint64_t v) { return std::to_string(v); },
                        [](double v) { return format_double(v); },
                        [](const std::string& v) { return csv_escape(v); },
                        [](bool v) { return std::string(v ? "true" : "false"); },
                    },
                    cell);
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << csv_escape(table.columns[j]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << cell_to_csv(row[j]);
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& table) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::visit(Overloaded{
                     [&](std::monostate) { obj[table.columns[j]] = nullptr; },
                     [&](auto v) { obj[table.columns[j]] = v; },
                 },
                 row[j]);
    }
    doc.push_back(std::move(obj));
  }
  out << doc.dump(2) << '\n';
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

}  // namespace isotropy::harness
