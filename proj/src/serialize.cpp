#include "stratsel/serialize.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "stratsel/error.hpp"
#include "stratsel/table.hpp"

namespace stratsel {

namespace {

// JSON has no infinity; +inf metrics are written as null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
T field(const Json& doc, const char* key) {
  require(doc.contains(key), ErrorCode::kBadConfig, std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadConfig, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(const StratumStats& stats) {
  return Json{{"K", stats.strata()},
              {"labels", stats.labels},
              {"sizes", stats.sizes},
              {"means", stats.means},
              {"variances", stats.variances},
              {"overall_mean", stats.overall_mean},
              {"overall_variance", stats.overall_variance}};
}

Json to_json(const AllocationPlan& plan) {
  return Json{{"sizes", plan.sizes},
              {"total", plan.total},
              {"method", std::string(allocation_method_name(plan.method))}};
}

AllocationPlan plan_from_json(const Json& doc) {
  AllocationPlan plan;
  plan.sizes = field<std::vector<std::int64_t>>(doc, "sizes");
  plan.total = field<std::int64_t>(doc, "total");
  plan.method = parse_allocation_method(field<std::string>(doc, "method"));
  std::int64_t sum = 0;
  for (auto s : plan.sizes) sum += s;
  require(sum == plan.total, ErrorCode::kBadConfig, "plan sizes do not sum to total");
  return plan;
}

Json to_json(const StratumPartition& partition) {
  Json centroids = Json::array();
  for (int c = 0; c < partition.k; ++c) {
    auto row = partition.centroid(static_cast<std::size_t>(c));
    centroids.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return Json{{"features", partition.features},
              {"K", partition.k},
              {"seed", partition.seed},
              {"standardizer",
               {{"mean", partition.standardizer.mean}, {"scale", partition.standardizer.scale}}},
              {"centroids", centroids},
              {"kmeans",
               {{"tolerance", partition.options.tolerance},
                {"max_iterations", partition.options.max_iterations},
                {"restarts", partition.options.restarts}}},
              {"iterations", partition.iterations},
              {"converged", partition.converged}};
}

StratumPartition partition_from_json(const Json& doc) {
  StratumPartition p;
  p.features = field<std::vector<std::size_t>>(doc, "features");
  p.k = field<int>(doc, "K");
  p.seed = field<std::uint64_t>(doc, "seed");
  const Json& st = doc.at("standardizer");
  p.standardizer.mean = field<std::vector<double>>(st, "mean");
  p.standardizer.scale = field<std::vector<double>>(st, "scale");
  const auto rows = field<std::vector<std::vector<double>>>(doc, "centroids");
  require(p.k >= 1 && rows.size() == static_cast<std::size_t>(p.k), ErrorCode::kBadConfig,
          "centroid count differs from K");
  require(p.standardizer.mean.size() == p.features.size() &&
              p.standardizer.scale.size() == p.features.size(),
          ErrorCode::kBadConfig, "standardizer does not match features");
  for (double s : p.standardizer.scale)
    require(s > 0.0, ErrorCode::kBadConfig, "standardizer scale must be positive");
  for (const auto& row : rows) {
    require(row.size() == p.features.size(), ErrorCode::kBadConfig, "centroid dimension mismatch");
    p.centroids.insert(p.centroids.end(), row.begin(), row.end());
  }
  if (doc.contains("kmeans")) {
    const Json& km = doc.at("kmeans");
    p.options.tolerance = field<double>(km, "tolerance");
    p.options.max_iterations = field<int>(km, "max_iterations");
    p.options.restarts = field<int>(km, "restarts");
  }
  if (doc.contains("iterations")) p.iterations = field<int>(doc, "iterations");
  if (doc.contains("converged")) p.converged = field<bool>(doc, "converged");
  return p;
}

Json to_json(const SelectionResult& result, const std::vector<std::string>* names) {
  auto name_of = [&](std::size_t f) {
    return names && f < names->size() ? (*names)[f] : std::to_string(f);
  };
  Json trace = Json::array();
  for (const auto& step : result.trace) {
    Json candidates = Json::array();
    for (const auto& c : step.candidates)
      candidates.push_back(Json{{"feature", c.feature},
                                {"name", name_of(c.feature)},
                                {"metric", finite_or_null(c.metric)},
                                {"seed", c.seed}});
    trace.push_back(Json{{"step", step.step},
                         {"candidates", candidates},
                         {"chosen", step.chosen},
                         {"chosen_metric", finite_or_null(step.chosen_metric)},
                         {"accepted", step.accepted},
                         {"metric_after", finite_or_null(step.metric_after)}});
  }
  Json selected_names = Json::array();
  for (auto f : result.selected) selected_names.push_back(name_of(f));
  const auto& cfg = result.config;
  Json config{{"K", cfg.k}, {"theta", cfg.theta}, {"seed", cfg.seed}};
  if (result.metric == SearchMetric::kVariance) {
    config["n"] = cfg.n;
    config["allocator"] = std::string(allocation_method_name(cfg.allocator));
  }
  config["kmeans"] = {{"tolerance", cfg.kmeans.tolerance},
                      {"max_iterations", cfg.kmeans.max_iterations},
                      {"restarts", cfg.kmeans.restarts}};
  return Json{{"metric", result.metric == SearchMetric::kVariance ? "variance" : "wcss"},
              {"selected", result.selected},
              {"selected_names", selected_names},
              {"final_metric", finite_or_null(result.final_metric)},
              {"final_seed", result.final_seed ? Json(*result.final_seed) : Json(nullptr)},
              {"terminated_early", result.terminated_early},
              {"evaluations", result.evaluations},
              {"config", config},
              {"trace", trace}};
}

Json to_json(const EvaluationReport& report) {
  Json methods = Json::array();
  for (const auto& m : report.methods) {
    Json names = Json::array();
    for (auto f : m.features)
      names.push_back(f < report.covariate_names.size() ? report.covariate_names[f] : std::to_string(f));
    Json entry{{"method", std::string(method_name(m.method))},
               {"allocator", m.allocator ? Json(std::string(allocation_method_name(*m.allocator)))
                                         : Json(nullptr)},
               {"variance", m.variance},
               {"variance_reduction_percent", m.variance_reduction_percent},
               {"analytic_variance", m.analytic_variance ? Json(*m.analytic_variance) : Json(nullptr)},
               {"features", m.features},
               {"feature_names", names}};
    if (!m.plan.empty()) entry["plan"] = m.plan;
    methods.push_back(std::move(entry));
  }
  return Json{{"dataset", report.dataset},
              {"replications", report.replications},
              {"n", report.n},
              {"seed", report.seed},
              {"K", report.k},
              {"theta", report.theta},
              {"p", report.p},
              {"N_train", report.n_train},
              {"N_test", report.n_test},
              {"srs_variance", report.srs_variance},
              {"methods", methods}};
}

void write_report_csv(std::ostream& out, const EvaluationReport& report) {
  out << "method,allocator,variance,variance_reduction_percent,analytic_variance,features\n";
  for (const auto& m : report.methods) {
    std::string features;
    for (std::size_t i = 0; i < m.features.size(); ++i) {
      if (i) features += ';';
      const auto f = m.features[i];
      features += f < report.covariate_names.size() ? report.covariate_names[f] : std::to_string(f);
    }
    out << method_name(m.method) << ','
        << (m.allocator ? std::string(allocation_method_name(*m.allocator)) : std::string()) << ','
        << format_number(m.variance) << ',' << format_number(m.variance_reduction_percent) << ','
        << (m.analytic_variance ? format_number(*m.analytic_variance) : std::string()) << ','
        << features << '\n';
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace stratsel
