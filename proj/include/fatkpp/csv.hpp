#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fatkpp/grid.hpp"

namespace fatkpp {

/// Round-trippable decimal form with 17 significant digits.
std::string format_number(double value);

using CsvCell = std::variant<double, std::string>;

/// Streams rows to a CSV file. Throws Error(IoError) when the file cannot be
/// opened or written.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row_cells(const std::vector<CsvCell>& cells);
  void row(const std::vector<double>& values);
  void close();

 private:
  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; Error(ParseError) when absent.
  std::size_t index(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
};

CsvTable read_csv(const std::string& path);

/// Columns x,<value_name>.
void write_field_csv(const std::string& path, const Field& field,
                     const std::string& value_name = "value");
Field read_field_csv(const std::string& path);

}  // namespace fatkpp
