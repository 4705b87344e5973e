#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace corrsense::cli {

using Cell = std::variant<std::int64_t, double, std::string>;

// Column-ordered result table; every command emits one or more of these.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::size_t column_index(std::string_view name) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

enum class Format { Csv, Json };

Format parse_format(std::string_view name);
const char* format_extension(Format format);

// Reals use %.9e; nan and inf print as such in CSV and as null in JSON.
std::string format_real(double value);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);
void write_table(std::ostream& out, const Table& table, Format format);

}  // namespace corrsense::cli
