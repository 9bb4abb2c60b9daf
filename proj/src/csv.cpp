#include "fatkpp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "fatkpp/errors.hpp"

namespace fatkpp {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) raise(ErrorKind::IoError, "cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row_cells(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_) {
    raise(ErrorKind::IoError, "row width does not match the header of " + path_);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    if (const auto* d = std::get_if<double>(&cells[i])) {
      out_ << format_number(*d);
    } else {
      out_ << std::get<std::string>(cells[i]);
    }
  }
  out_ << '\n';
  if (!out_) raise(ErrorKind::IoError, "write failed on " + path_);
}

void CsvWriter::row(const std::vector<double>& values) {
  row_cells(std::vector<CsvCell>(values.begin(), values.end()));
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) raise(ErrorKind::IoError, "closing " + path_ + " failed");
}

std::size_t CsvTable::index(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  raise(ErrorKind::ParseError, "missing CSV column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
  const std::size_t col = index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(std::strtod(r.at(col).c_str(), nullptr));
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::IoError, "cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::ParseError, path + " is empty");
  table.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size()) {
      raise(ErrorKind::ParseError, path + ":" + std::to_string(lineno) + ": wrong column count");
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void write_field_csv(const std::string& path, const Field& field, const std::string& value_name) {
  CsvWriter out(path, {"x", value_name});
  for (std::size_t i = 0; i < field.size(); ++i) out.row({field.grid.x(i), field.values[i]});
  out.close();
}

Field read_field_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 2 || table.header[0] != "x") {
    raise(ErrorKind::ParseError, path + " is not a field CSV (x,value)");
  }
  const auto xs = table.numeric_column("x");
  const auto vs = table.numeric_column(table.header[1]);
  if (xs.empty()) raise(ErrorKind::ParseError, path + " has no rows");
  const Grid1D grid = Grid1D::make(-xs.front(), xs.size());
  return Field{grid, vs};
}

}  // namespace fatkpp
