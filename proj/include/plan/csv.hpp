#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace plan {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input table violating the expected column layout; message carries the
/// column diagnostics.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal rendering that parses back to the identical double.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw SchemaError("schema mismatch: " + where + ": expected a number, got '" + text + "'");
  }
  return value;
}

inline long long parse_int(const std::string& text, const std::string& where) {
  long long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw SchemaError("schema mismatch: " + where + ": expected an integer, got '" + text + "'");
  }
  return value;
}

/// Plain comma-separated table, no quoting (no emitted value ever contains a
/// comma). Rows are written with '\n' regardless of platform.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) {
      throw std::logic_error("csv row width does not match header");
    }
    rows_.push_back(std::move(row));
  }

  [[nodiscard]] std::string to_string() const {
    std::ostringstream out;
    write_line(out, header_);
    for (const auto& row : rows_) write_line(out, row);
    return out.str();
  }

 private:
  static void write_line(std::ostringstream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << cells[i];
    }
    out << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws SchemaError naming both the missing
  /// column and the columns present.
  [[nodiscard]] std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    std::string present;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i > 0) present += ",";
      present += header[i];
    }
    throw SchemaError("schema mismatch: missing column '" + name + "' (columns present: " +
                      present + ")");
  }
};

inline CsvTable parse_csv(const std::string& text, const std::string& where) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size()) {
        throw SchemaError("schema mismatch: " + where + ": row has " +
                          std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (first) throw SchemaError("schema mismatch: " + where + ": empty table");
  return table;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace plan
