#ifndef STRATSEL_TABLE_HPP_
#define STRATSEL_TABLE_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stratsel {

// Labeled columnar data as read from CSV. Cells are kept as text; an empty
// cell denotes a missing value.
struct Column {
  std::string name;
  std::vector<std::string> cells;
};

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }

  std::optional<std::size_t> find(const std::string& name) const;
  const Column& column(const std::string& name) const;  // throws UnknownColumn

  // Keeps only the named columns, in the given order.
  Table select(const std::vector<std::string>& names) const;
  Table filter_rows(const std::vector<bool>& keep) const;

 private:
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

struct CsvOptions {
  char delimiter = ',';
  // Cells equal to any of these tokens are read as missing.
  std::vector<std::string> missing_tokens = {"NA"};
};

Table read_csv(std::istream& in, const CsvOptions& options = {});
Table read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
void write_csv(std::ostream& out, const Table& table);

// Parses a full cell as a finite double.
std::optional<double> parse_number(const std::string& cell);

// Formats a double with the shortest representation that round-trips.
std::string format_number(double value);

// Row predicate of the form "<column> <op> <literal>", op one of
// == != < <= > >=. Numeric comparison when both sides parse as numbers,
// string comparison otherwise. Missing cells never match.
std::vector<bool> evaluate_filter(const Table& table, const std::string& expression);

// One-hot encodes each categorical column (all levels kept, levels in
// sorted order, indicator columns named "<column>=<level>" placed where the
// source column was) and, when drop_missing is set, first removes every row
// containing a missing cell.
Table preprocess(const Table& table, const std::vector<std::string>& categorical_columns,
                 bool drop_missing);

// Expands raw column names into the names present after preprocess: a
// categorical column becomes its indicator columns.
std::vector<std::string> expand_encoded_names(const Table& encoded,
                                              const std::vector<std::string>& names,
                                              const std::vector<std::string>& categorical_columns);

}  // namespace stratsel

#endif  // STRATSEL_TABLE_HPP_
