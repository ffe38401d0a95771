#include "stratsel/frame.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "stratsel/error.hpp"

namespace stratsel {

PopulationFrame::PopulationFrame(std::vector<double> covariates, std::vector<double> outcome,
                                 std::vector<std::string> covariate_names,
                                 std::string outcome_name)
    : covariates_(std::move(covariates)),
      outcome_(std::move(outcome)),
      names_(std::move(covariate_names)),
      outcome_name_(std::move(outcome_name)) {
  require(!outcome_.empty(), ErrorCode::kEmptyTable, "population has no units");
  require(!names_.empty(), ErrorCode::kPrecondition, "population has no covariates");
  require(covariates_.size() == outcome_.size() * names_.size(), ErrorCode::kLengthMismatch,
          "covariate matrix does not match N x p");
  std::set<std::string> unique(names_.begin(), names_.end());
  require(unique.size() == names_.size(), ErrorCode::kBadConfig, "covariate names are not unique");
  for (double v : covariates_)
    require(std::isfinite(v), ErrorCode::kPrecondition, "non-finite covariate value");
  for (double v : outcome_)
    require(std::isfinite(v), ErrorCode::kPrecondition, "non-finite outcome value");
}

std::vector<double> PopulationFrame::covariate_column(std::size_t col) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = covariate(i, col);
  return out;
}

std::size_t PopulationFrame::covariate_index(const std::string& name) const {
  for (std::size_t j = 0; j < names_.size(); ++j)
    if (names_[j] == name) return j;
  throw Error(ErrorCode::kUnknownColumn, "no covariate named '" + name + "'");
}

namespace {

std::vector<double> numeric_column(const Column& column) {
  std::vector<double> values;
  values.reserve(column.cells.size());
  for (std::size_t i = 0; i < column.cells.size(); ++i) {
    auto v = parse_number(column.cells[i]);
    require(v.has_value(), ErrorCode::kNonNumericColumn,
            "column '" + column.name + "' row " + std::to_string(i + 1) + " is not numeric: '" +
                column.cells[i] + "'");
    values.push_back(*v);
  }
  return values;
}

}  // namespace

PopulationFrame build_frame(const Table& table, const std::string& outcome_column,
                            const std::vector<std::string>& covariate_columns) {
  require(!covariate_columns.empty(), ErrorCode::kPrecondition, "no covariate columns given");
  const Column& y = table.column(outcome_column);
  std::vector<const Column*> xs;
  for (const auto& name : covariate_columns) xs.push_back(&table.column(name));
  require(table.rows() > 0, ErrorCode::kEmptyTable, "table has no rows");

  std::vector<double> outcome = numeric_column(y);
  const std::size_t n = table.rows();
  const std::size_t p = xs.size();
  std::vector<double> covariates(n * p);
  for (std::size_t j = 0; j < p; ++j) {
    auto values = numeric_column(*xs[j]);
    for (std::size_t i = 0; i < n; ++i) covariates[i * p + j] = values[i];
  }
  return PopulationFrame(std::move(covariates), std::move(outcome), covariate_columns,
                         outcome_column);
}

Table frame_to_table(const PopulationFrame& frame) {
  std::vector<Column> columns;
  for (std::size_t j = 0; j < frame.cols(); ++j) {
    Column c{frame.covariate_names()[j], {}};
    c.cells.reserve(frame.rows());
    for (std::size_t i = 0; i < frame.rows(); ++i)
      c.cells.push_back(format_number(frame.covariate(i, j)));
    columns.push_back(std::move(c));
  }
  Column y{frame.outcome_name(), {}};
  for (double v : frame.outcome()) y.cells.push_back(format_number(v));
  columns.push_back(std::move(y));
  return Table(std::move(columns));
}

void write_frame_csv(const std::filesystem::path& path, const PopulationFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot write '" + path.string() + "'");
  write_csv(out, frame_to_table(frame));
  require(out.good(), ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace stratsel
