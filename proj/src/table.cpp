#include "stratsel/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "stratsel/error.hpp"

namespace stratsel {

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
  rows_ = columns_.empty() ? 0 : columns_.front().cells.size();
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    require(c.cells.size() == rows_, ErrorCode::kLengthMismatch,
            "column '" + c.name + "' has a different row count");
    require(seen.insert(c.name).second, ErrorCode::kBadConfig,
            "duplicate column name '" + c.name + "'");
  }
}

std::optional<std::size_t> Table::find(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j)
    if (columns_[j].name == name) return j;
  return std::nullopt;
}

const Column& Table::column(const std::string& name) const {
  auto j = find(name);
  require(j.has_value(), ErrorCode::kUnknownColumn, "no column named '" + name + "'");
  return columns_[*j];
}

Table Table::select(const std::vector<std::string>& names) const {
  std::vector<Column> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(column(n));
  return Table(std::move(out));
}

Table Table::filter_rows(const std::vector<bool>& keep) const {
  require(keep.size() == rows_, ErrorCode::kLengthMismatch, "row mask length mismatch");
  std::vector<Column> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) {
    Column kept{c.name, {}};
    for (std::size_t i = 0; i < rows_; ++i)
      if (keep[i]) kept.cells.push_back(c.cells[i]);
    out.push_back(std::move(kept));
  }
  return Table(std::move(out));
}

namespace {

// Splits one logical CSV record. Handles quoted fields with doubled quotes
// and embedded delimiters/newlines.
bool read_record(std::istream& in, char delim, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == delim) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

Table read_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::string> fields;
  require(read_record(in, options.delimiter, fields), ErrorCode::kEmptyTable,
          "CSV input has no header row");
  // Strip a UTF-8 byte order mark.
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  std::vector<Column> columns;
  for (auto& name : fields) columns.push_back(Column{name, {}});
  std::size_t line = 1;
  while (read_record(in, options.delimiter, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    require(fields.size() == columns.size(), ErrorCode::kLengthMismatch,
            "CSV line " + std::to_string(line) + " has " + std::to_string(fields.size()) +
                " fields, expected " + std::to_string(columns.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      auto& cell = fields[j];
      if (std::find(options.missing_tokens.begin(), options.missing_tokens.end(), cell) !=
          options.missing_tokens.end())
        cell.clear();
      columns[j].cells.push_back(std::move(cell));
    }
  }
  return Table(std::move(columns));
}

Table read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return read_csv(in, options);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
  const auto& cols = table.columns();
  for (std::size_t j = 0; j < cols.size(); ++j)
    out << (j ? "," : "") << quote_if_needed(cols[j].name);
  out << '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j)
      out << (j ? "," : "") << quote_if_needed(cols[j].cells[i]);
    out << '\n';
  }
}

std::optional<double> parse_number(const std::string& cell) {
  const char* first = cell.data();
  const char* last = first + cell.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
  if (first < last && *first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(value))
    return std::nullopt;
  return value;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<bool> evaluate_filter(const Table& table, const std::string& expression) {
  const std::size_t pos = expression.find_first_of("=!<>");
  require(pos != std::string::npos, ErrorCode::kBadConfig,
          "filter '" + expression + "' has no comparison operator");
  std::string op(1, expression[pos]);
  if (pos + 1 < expression.size() && expression[pos + 1] == '=') op.push_back('=');
  require(op != "=" && op != "!", ErrorCode::kBadConfig,
          "filter '" + expression + "' has an unknown operator");
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return std::string();
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
      s = s.substr(1, s.size() - 2);
    return s;
  };
  const std::string name = trim(expression.substr(0, pos));
  const std::string literal = trim(expression.substr(pos + op.size()));
  require(!name.empty(), ErrorCode::kBadConfig, "filter '" + expression + "' has no column");
  const Column& column = table.column(name);
  const auto literal_num = parse_number(literal);

  std::vector<bool> keep(table.rows(), false);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const std::string& cell = column.cells[i];
    if (cell.empty()) continue;
    int cmp;
    auto cell_num = parse_number(cell);
    if (cell_num && literal_num) {
      cmp = (*cell_num < *literal_num) ? -1 : (*cell_num > *literal_num ? 1 : 0);
    } else {
      cmp = cell.compare(literal);
      cmp = (cmp < 0) ? -1 : (cmp > 0 ? 1 : 0);
    }
    if (op == "==") keep[i] = cmp == 0;
    else if (op == "!=") keep[i] = cmp != 0;
    else if (op == "<") keep[i] = cmp < 0;
    else if (op == "<=") keep[i] = cmp <= 0;
    else if (op == ">") keep[i] = cmp > 0;
    else keep[i] = cmp >= 0;
  }
  return keep;
}

Table preprocess(const Table& table, const std::vector<std::string>& categorical_columns,
                 bool drop_missing) {
  for (const auto& name : categorical_columns) table.column(name);

  Table base = table;
  if (drop_missing) {
    std::vector<bool> keep(table.rows(), true);
    for (const auto& c : table.columns())
      for (std::size_t i = 0; i < table.rows(); ++i)
        if (c.cells[i].empty()) keep[i] = false;
    base = table.filter_rows(keep);
  }
  if (categorical_columns.empty()) return base;

  std::vector<Column> out;
  for (const auto& c : base.columns()) {
    if (std::find(categorical_columns.begin(), categorical_columns.end(), c.name) ==
        categorical_columns.end()) {
      out.push_back(c);
      continue;
    }
    std::set<std::string> levels;
    for (const auto& cell : c.cells)
      if (!cell.empty()) levels.insert(cell);
    for (const auto& level : levels) {
      Column indicator{c.name + "=" + level, {}};
      indicator.cells.reserve(c.cells.size());
      for (const auto& cell : c.cells)
        indicator.cells.push_back(cell.empty() ? std::string() : (cell == level ? "1" : "0"));
      out.push_back(std::move(indicator));
    }
  }
  return Table(std::move(out));
}

std::vector<std::string> expand_encoded_names(const Table& encoded,
                                              const std::vector<std::string>& names,
                                              const std::vector<std::string>& categorical_columns) {
  std::vector<std::string> out;
  for (const auto& name : names) {
    if (std::find(categorical_columns.begin(), categorical_columns.end(), name) ==
        categorical_columns.end()) {
      out.push_back(name);
      continue;
    }
    const std::string prefix = name + "=";
    bool found = false;
    for (const auto& c : encoded.columns()) {
      if (c.name.rfind(prefix, 0) == 0) {
        out.push_back(c.name);
        found = true;
      }
    }
    require(found, ErrorCode::kUnknownColumn, "no indicator columns for '" + name + "'");
  }
  return out;
}

}  // namespace stratsel
