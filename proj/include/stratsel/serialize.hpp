#ifndef STRATSEL_SERIALIZE_HPP_
#define STRATSEL_SERIALIZE_HPP_

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "stratsel/allocation.hpp"
#include "stratsel/eval_harness.hpp"
#include "stratsel/kmeans.hpp"
#include "stratsel/stats.hpp"
#include "stratsel/subset_search.hpp"

namespace stratsel {

using Json = nlohmann::ordered_json;

Json to_json(const StratumStats& stats);
Json to_json(const AllocationPlan& plan);
Json to_json(const StratumPartition& partition);
// Feature names are resolved from `names` when given.
Json to_json(const SelectionResult& result, const std::vector<std::string>* names = nullptr);
Json to_json(const EvaluationReport& report);

AllocationPlan plan_from_json(const Json& doc);
StratumPartition partition_from_json(const Json& doc);

// One row per method.
void write_report_csv(std::ostream& out, const EvaluationReport& report);

// Stable text form: two-space indent, trailing newline.
std::string dump(const Json& doc);

}  // namespace stratsel

#endif  // STRATSEL_SERIALIZE_HPP_
