#ifndef STRATSEL_FRAME_HPP_
#define STRATSEL_FRAME_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stratsel/table.hpp"

namespace stratsel {

// A finite population: N units, p covariates (row-major N x p) and one
// outcome. Immutable after construction; all entries are finite.
class PopulationFrame {
 public:
  PopulationFrame(std::vector<double> covariates, std::vector<double> outcome,
                  std::vector<std::string> covariate_names, std::string outcome_name);

  std::size_t rows() const { return outcome_.size(); }
  std::size_t cols() const { return names_.size(); }

  double covariate(std::size_t row, std::size_t col) const { return covariates_[row * cols() + col]; }
  std::span<const double> row(std::size_t i) const {
    return {covariates_.data() + i * cols(), cols()};
  }
  std::vector<double> covariate_column(std::size_t col) const;

  std::span<const double> covariates() const { return covariates_; }
  std::span<const double> outcome() const { return outcome_; }
  const std::vector<std::string>& covariate_names() const { return names_; }
  const std::string& outcome_name() const { return outcome_name_; }

  // Index of the named covariate; throws UnknownColumn.
  std::size_t covariate_index(const std::string& name) const;

 private:
  std::vector<double> covariates_;
  std::vector<double> outcome_;
  std::vector<std::string> names_;
  std::string outcome_name_;
};

PopulationFrame build_frame(const Table& table, const std::string& outcome_column,
                            const std::vector<std::string>& covariate_columns);

// Covariates first, outcome last.
Table frame_to_table(const PopulationFrame& frame);
void write_frame_csv(const std::filesystem::path& path, const PopulationFrame& frame);

}  // namespace stratsel

#endif  // STRATSEL_FRAME_HPP_
