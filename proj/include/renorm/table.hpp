#pragma once

// Column tables emitted by the command-line tool. Reals are written with 17
// significant digits in the C locale, so reading a file and writing it back
// reproduces it byte for byte.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace renorm {

using Cell = std::variant<std::int64_t, double, std::string>;

enum class TableFormat { Csv, Json };

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("table: row width does not match the header");
    rows.push_back(std::move(row));
  }

  bool operator==(const Table&) const = default;
};

namespace detail {

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  std::string out(buf, res.ptr);
  // Keep integral reals distinguishable from integer cells.
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

inline std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && !s.empty()) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Integers first, then reals (including inf/nan), else text.
inline Cell parse_cell(const std::string& s) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  std::int64_t i = 0;
  auto ri = std::from_chars(begin, end, i);
  if (ri.ec == std::errc() && ri.ptr == end && !s.empty()) return i;
  double d = 0.0;
  auto rd = std::from_chars(begin, end, d, std::chars_format::general);
  if (rd.ec == std::errc() && rd.ptr == end && !s.empty()) return d;
  return s;
}

// Splits one CSV record, honouring quotes. Returns false at end of input.
inline bool read_record(std::istream& in, std::vector<std::string>& fields, std::vector<bool>& quoted) {
  fields.clear();
  quoted.clear();
  int c = in.peek();
  if (c == EOF) return false;
  std::string field;
  bool was_quoted = false;
  bool in_quotes = false;
  while ((c = in.get()) != EOF) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field += static_cast<char>(c);
      }
    } else if (c == '"') {
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      quoted.push_back(was_quoted);
      field.clear();
      was_quoted = false;
    } else if (c == '\n') {
      break;
    } else {
      field += static_cast<char>(c);
    }
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
  fields.push_back(field);
  quoted.push_back(was_quoted);
  return true;
}

}  // namespace detail

inline std::string cell_text(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return detail::format_real(*d);
  return std::get<std::string>(cell);
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << detail::quote_csv(t.columns[c]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "");
      if (std::holds_alternative<std::string>(row[c]))
        out << detail::quote_csv(std::get<std::string>(row[c]));
      else
        out << cell_text(row[c]);
    }
    out << '\n';
  }
}

inline Table read_csv(std::istream& in) {
  Table t;
  std::vector<std::string> fields;
  std::vector<bool> quoted;
  if (!detail::read_record(in, fields, quoted)) throw std::runtime_error("csv: missing header");
  t.columns = fields;
  while (detail::read_record(in, fields, quoted)) {
    if (fields.size() != t.columns.size()) throw std::runtime_error("csv: row width does not match the header");
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(quoted[c] ? Cell(fields[c]) : detail::parse_cell(fields[c]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// {"columns": [...], "rows": [[...], ...]}; reals travel as strings with
// 17 significant digits, tagged by the "types" array.
inline nlohmann::ordered_json table_to_json(const Table& t) {
  nlohmann::ordered_json j;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (const auto* i = std::get_if<std::int64_t>(&cell))
        r.push_back(*i);
      else if (const auto* d = std::get_if<double>(&cell))
        r.push_back({{"real", detail::format_real(*d)}});
      else
        r.push_back(std::get<std::string>(cell));
    }
    j["rows"].push_back(std::move(r));
  }
  return j;
}

inline Table table_from_json(const nlohmann::ordered_json& j) {
  Table t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& cell : r) {
      if (cell.is_number_integer()) {
        row.emplace_back(cell.get<std::int64_t>());
      } else if (cell.is_object()) {
        const auto parsed = detail::parse_cell(cell.at("real").get<std::string>());
        if (std::holds_alternative<std::string>(parsed)) throw std::runtime_error("json table: malformed real");
        row.emplace_back(std::holds_alternative<double>(parsed) ? std::get<double>(parsed)
                                                                : static_cast<double>(std::get<std::int64_t>(parsed)));
      } else {
        row.emplace_back(cell.get<std::string>());
      }
    }
    t.add_row(std::move(row));
  }
  return t;
}

inline void write_table(std::ostream& out, const Table& t, TableFormat format) {
  if (format == TableFormat::Csv)
    write_csv(out, t);
  else
    out << table_to_json(t).dump(1) << '\n';
}

inline Table read_table(std::istream& in, TableFormat format) {
  if (format == TableFormat::Csv) return read_csv(in);
  return table_from_json(nlohmann::ordered_json::parse(in));
}

inline std::string render_table(const Table& t, TableFormat format) {
  std::ostringstream out;
  write_table(out, t, format);
  return out.str();
}

}  // namespace renorm
