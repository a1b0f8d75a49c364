#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace tubeint {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// Accumulates `#` metadata lines, one header row and data rows.
class CsvWriter {
 public:
  CsvWriter& meta(std::string_view key, std::string_view value) {
    out_ += "# ";
    out_ += key;
    out_ += ' ';
    out_ += value;
    out_ += '\n';
    return *this;
  }
  CsvWriter& meta(std::string_view key, double value) { return meta(key, format_double(value)); }

  CsvWriter& header(std::initializer_list<std::string_view> columns) {
    return header(std::vector<std::string>(columns.begin(), columns.end()));
  }
  CsvWriter& header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    join(columns);
    return *this;
  }

  CsvWriter& row(std::initializer_list<double> values) {
    return row(std::vector<double>(values));
  }
  CsvWriter& row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    join(cells);
    return *this;
  }

  std::size_t columns() const { return columns_; }
  const std::string& str() const { return out_; }

 private:
  void join(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }

  std::string out_;
  std::size_t columns_ = 0;
};

/// Parsed CSV: metadata key/value pairs, header and numeric rows.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string meta_value(std::string_view key) const {
    for (const auto& [k, v] : meta)
      if (k == key) return v;
    return {};
  }
  int column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      const std::size_t sp = line.find(' ');
      if (sp == std::string_view::npos)
        t.meta.emplace_back(std::string(line), std::string());
      else
        t.meta.emplace_back(std::string(line.substr(0, sp)), std::string(line.substr(sp + 1)));
      continue;
    }
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (t.columns.empty()) {
      for (auto c : cells) t.columns.emplace_back(c);
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) {
      double v = 0.0;
      std::from_chars(c.data(), c.data() + c.size(), v);
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace tubeint
