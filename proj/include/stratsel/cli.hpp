#ifndef STRATSEL_CLI_HPP_
#define STRATSEL_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stratsel/allocation.hpp"
#include "stratsel/eval_harness.hpp"
#include "stratsel/kmeans.hpp"
#include "stratsel/serialize.hpp"

namespace stratsel::cli {

struct SyntheticSource {
  std::size_t n = 0;
  std::size_t p = 20;
  std::string beta;  // "type1" | "type2"
  double snr = 1.0;
  double rho = 0.35;
};

struct DatasetConfig {
  std::string name;
  std::optional<SyntheticSource> synthetic;
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> train_csv;
  std::optional<std::filesystem::path> test_csv;
  std::string train_filter;
  std::string test_filter;
  std::string outcome = "Y";
  std::vector<std::string> covariates;  // empty: every other column
  std::vector<std::string> categorical;
  bool drop_missing = true;
  std::vector<std::string> missing_tokens = {"NA"};
};

// Declarative run configuration. Unknown keys are rejected.
struct RunConfig {
  DatasetConfig dataset;
  int k = 6;
  std::size_t theta = 5;
  std::int64_t n = 0;
  AllocationMethod allocator = AllocationMethod::kProportional;
  std::vector<AllocationMethod> allocators = {AllocationMethod::kProportional};
  std::vector<Method> methods;
  std::string search = "variance";
  std::vector<std::string> features;
  std::optional<std::filesystem::path> selection;
  std::optional<std::filesystem::path> partition;
  std::size_t replications = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  KMeansOptions kmeans;
  std::filesystem::path out_dir = "out";
};

// Relative paths resolve against base_dir. Accepts a plain config or a
// manifest written by a previous run.
RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir);
Json config_to_json(const RunConfig& config);

// Entry point; returns the process exit code (0 ok, 2 validation, 1 runtime).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stratsel::cli

#endif  // STRATSEL_CLI_HPP_
