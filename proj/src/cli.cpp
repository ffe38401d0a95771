#include "stratsel/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "stratsel/error.hpp"
#include "stratsel/frame.hpp"
#include "stratsel/subset_search.hpp"
#include "stratsel/synthgen.hpp"
#include "stratsel/table.hpp"
#include "stratsel/variance.hpp"

namespace stratsel::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kManifestVersion = 1;

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  require(obj.is_object(), ErrorCode::kBadConfig, where + " must be a JSON object");
  std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    require(names.count(item.key()) != 0, ErrorCode::kBadConfig,
            "unknown key '" + item.key() + "' in " + where);
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kBadConfig, std::string("config key '") + key + "' has the wrong type");
  }
}

std::optional<fs::path> path_or_none(const Json& obj, const char* key, const fs::path& base) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  fs::path p = get_or<std::string>(obj, key, "");
  require(!p.empty(), ErrorCode::kBadConfig, std::string("config key '") + key + "' is empty");
  if (p.is_relative()) p = base / p;
  return p.lexically_normal();
}

DatasetConfig parse_dataset(const Json& obj, const fs::path& base) {
  check_keys(obj,
             {"name", "synthetic", "csv", "train_csv", "test_csv", "train_filter", "test_filter",
              "outcome", "covariates", "categorical", "drop_missing", "missing_tokens"},
             "dataset");
  DatasetConfig d;
  d.name = get_or<std::string>(obj, "name", "");
  if (obj.contains("synthetic") && !obj.at("synthetic").is_null()) {
    const Json& s = obj.at("synthetic");
    check_keys(s, {"N", "p", "beta", "snr", "rho"}, "dataset.synthetic");
    SyntheticSource src;
    src.n = get_or<std::size_t>(s, "N", 0);
    src.p = get_or<std::size_t>(s, "p", 20);
    src.beta = get_or<std::string>(s, "beta", "");
    src.snr = get_or<double>(s, "snr", 1.0);
    src.rho = get_or<double>(s, "rho", 0.35);
    require(!src.beta.empty(), ErrorCode::kBadConfig, "dataset.synthetic.beta is required");
    parse_beta_kind(src.beta);
    require(src.n >= 1, ErrorCode::kBadConfig, "dataset.synthetic.N must be at least 1");
    require(src.snr > 0.0, ErrorCode::kBadConfig, "dataset.synthetic.snr must be positive");
    require(src.rho >= 0.0 && src.rho < 1.0, ErrorCode::kBadConfig, "dataset.synthetic.rho must lie in [0, 1)");
    d.synthetic = src;
  }
  d.csv = path_or_none(obj, "csv", base);
  d.train_csv = path_or_none(obj, "train_csv", base);
  d.test_csv = path_or_none(obj, "test_csv", base);
  d.train_filter = get_or<std::string>(obj, "train_filter", "");
  d.test_filter = get_or<std::string>(obj, "test_filter", "");
  d.outcome = get_or<std::string>(obj, "outcome", "Y");
  d.covariates = get_or<std::vector<std::string>>(obj, "covariates", {});
  d.categorical = get_or<std::vector<std::string>>(obj, "categorical", {});
  d.drop_missing = get_or<bool>(obj, "drop_missing", true);
  d.missing_tokens = get_or<std::vector<std::string>>(obj, "missing_tokens", {"NA"});

  const int sources = (d.synthetic ? 1 : 0) + (d.csv ? 1 : 0) + (d.train_csv ? 1 : 0);
  require(sources == 1, ErrorCode::kBadConfig,
          "dataset needs exactly one of 'synthetic', 'csv' or 'train_csv'");
  if (d.csv)
    require(!d.train_filter.empty() && !d.test_filter.empty(), ErrorCode::kBadConfig,
            "dataset.csv needs train_filter and test_filter");
  return d;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

RunConfig parse_config(const Json& doc, const fs::path& base_dir) {
  const Json* cfg = &doc;
  if (doc.is_object() && doc.contains("manifest_version")) {
    require(doc.contains("config"), ErrorCode::kBadConfig, "manifest has no config");
    cfg = &doc.at("config");
  }
  check_keys(*cfg,
             {"dataset", "K", "theta", "n", "allocator", "allocators", "methods", "search",
              "features", "selection", "partition", "replications", "seed", "threads", "kmeans",
              "out_dir"},
             "config");
  RunConfig c;
  require(cfg->contains("dataset"), ErrorCode::kBadConfig, "config.dataset is required");
  c.dataset = parse_dataset(cfg->at("dataset"), base_dir);
  c.k = get_or<int>(*cfg, "K", 6);
  c.theta = get_or<std::size_t>(*cfg, "theta", 5);
  c.n = get_or<std::int64_t>(*cfg, "n", 0);
  c.allocator = parse_allocation_method(get_or<std::string>(*cfg, "allocator", "proportional"));
  c.allocators.clear();
  for (const auto& a : get_or<std::vector<std::string>>(*cfg, "allocators", {"proportional"}))
    c.allocators.push_back(parse_allocation_method(a));
  for (const auto& m : get_or<std::vector<std::string>>(*cfg, "methods", {}))
    c.methods.push_back(parse_method(m));
  c.search = get_or<std::string>(*cfg, "search", "variance");
  require(c.search == "variance" || c.search == "wcss", ErrorCode::kBadConfig,
          "search must be 'variance' or 'wcss'");
  c.features = get_or<std::vector<std::string>>(*cfg, "features", {});
  c.selection = path_or_none(*cfg, "selection", base_dir);
  c.partition = path_or_none(*cfg, "partition", base_dir);
  c.replications = get_or<std::size_t>(*cfg, "replications", 10000);
  c.seed = get_or<std::uint64_t>(*cfg, "seed", 0);
  c.threads = get_or<unsigned>(*cfg, "threads", 0);
  if (cfg->contains("kmeans")) {
    const Json& km = cfg->at("kmeans");
    check_keys(km, {"tolerance", "max_iterations", "restarts"}, "kmeans");
    c.kmeans.tolerance = get_or<double>(km, "tolerance", c.kmeans.tolerance);
    c.kmeans.max_iterations = get_or<int>(km, "max_iterations", c.kmeans.max_iterations);
    c.kmeans.restarts = get_or<int>(km, "restarts", c.kmeans.restarts);
  }
  if (auto out = path_or_none(*cfg, "out_dir", base_dir)) c.out_dir = *out;

  require(c.k >= 1, ErrorCode::kBadConfig, "K must be at least 1");
  require(c.kmeans.tolerance >= 0.0 && c.kmeans.max_iterations >= 1 && c.kmeans.restarts >= 1,
          ErrorCode::kBadConfig, "invalid kmeans options");
  return c;
}

Json config_to_json(const RunConfig& c) {
  const DatasetConfig& d = c.dataset;
  Json dataset = Json::object();
  dataset["name"] = d.name;
  if (d.synthetic)
    dataset["synthetic"] = {{"N", d.synthetic->n},
                            {"p", d.synthetic->p},
                            {"beta", d.synthetic->beta},
                            {"snr", d.synthetic->snr},
                            {"rho", d.synthetic->rho}};
  if (d.csv) dataset["csv"] = fs::absolute(*d.csv).string();
  if (d.train_csv) dataset["train_csv"] = fs::absolute(*d.train_csv).string();
  if (d.test_csv) dataset["test_csv"] = fs::absolute(*d.test_csv).string();
  if (!d.train_filter.empty()) dataset["train_filter"] = d.train_filter;
  if (!d.test_filter.empty()) dataset["test_filter"] = d.test_filter;
  dataset["outcome"] = d.outcome;
  dataset["covariates"] = d.covariates;
  dataset["categorical"] = d.categorical;
  dataset["drop_missing"] = d.drop_missing;
  dataset["missing_tokens"] = d.missing_tokens;

  Json allocators = Json::array();
  for (auto a : c.allocators) allocators.push_back(std::string(allocation_method_name(a)));
  Json methods = Json::array();
  for (auto m : c.methods) methods.push_back(std::string(method_name(m)));
  Json out{{"dataset", dataset},
           {"K", c.k},
           {"theta", c.theta},
           {"n", c.n},
           {"allocator", std::string(allocation_method_name(c.allocator))},
           {"allocators", allocators},
           {"methods", methods},
           {"search", c.search},
           {"features", c.features},
           {"replications", c.replications},
           {"seed", c.seed},
           {"threads", c.threads},
           {"kmeans",
            {{"tolerance", c.kmeans.tolerance},
             {"max_iterations", c.kmeans.max_iterations},
             {"restarts", c.kmeans.restarts}}},
           {"out_dir", fs::absolute(c.out_dir).string()}};
  if (c.selection) out["selection"] = fs::absolute(*c.selection).string();
  if (c.partition) out["partition"] = fs::absolute(*c.partition).string();
  return out;
}

namespace {

struct Dataset {
  std::optional<PopulationFrame> train;
  std::optional<PopulationFrame> test;
};

SynthConfig synth_config(const RunConfig& c) {
  const SyntheticSource& s = *c.dataset.synthetic;
  SynthConfig cfg;
  cfg.n = s.n;
  cfg.beta = beta_pattern(parse_beta_kind(s.beta), s.p);
  cfg.snr = s.snr;
  cfg.rho = s.rho;
  cfg.seed = c.seed;
  return cfg;
}

std::vector<std::string> default_covariates(const Table& table, const DatasetConfig& d,
                                            const std::vector<std::string>& exclude) {
  std::vector<std::string> out;
  for (const auto& col : table.columns())
    if (col.name != d.outcome && std::find(exclude.begin(), exclude.end(), col.name) == exclude.end())
      out.push_back(col.name);
  return out;
}

std::string filter_column(const std::string& expression) {
  const auto pos = expression.find_first_of("=!<>");
  std::string name = expression.substr(0, pos);
  name.erase(0, name.find_first_not_of(" \t"));
  name.erase(name.find_last_not_of(" \t") + 1);
  return name;
}

// Reads one CSV, keeps the columns in use and preprocesses it. Returns the
// encoded table and the encoded covariate names.
std::pair<Table, std::vector<std::string>> load_table(const fs::path& path, const DatasetConfig& d,
                                                      const std::vector<std::string>& extra) {
  CsvOptions options;
  options.missing_tokens = d.missing_tokens;
  Table raw = read_csv(path, options);
  std::vector<std::string> raw_covariates =
      d.covariates.empty() ? default_covariates(raw, d, extra) : d.covariates;
  for (const auto& cat : d.categorical)
    if (std::find(raw_covariates.begin(), raw_covariates.end(), cat) == raw_covariates.end())
      raw_covariates.push_back(cat);
  std::vector<std::string> used = raw_covariates;
  used.push_back(d.outcome);
  for (const auto& e : extra)
    if (std::find(used.begin(), used.end(), e) == used.end()) used.push_back(e);
  Table encoded = preprocess(raw.select(used), d.categorical, d.drop_missing);
  return {encoded, expand_encoded_names(encoded, raw_covariates, d.categorical)};
}

Dataset load_dataset(const RunConfig& c, bool need_test) {
  const DatasetConfig& d = c.dataset;
  Dataset out;
  if (d.synthetic) {
    auto [train, test] = generate_train_test(synth_config(c));
    out.train.emplace(std::move(train));
    out.test.emplace(std::move(test));
    return out;
  }
  if (d.csv) {
    const std::vector<std::string> extra = {filter_column(d.train_filter), filter_column(d.test_filter)};
    auto [table, covariates] = load_table(*d.csv, d, extra);
    const Table train = table.filter_rows(evaluate_filter(table, d.train_filter));
    const Table test = table.filter_rows(evaluate_filter(table, d.test_filter));
    out.train.emplace(build_frame(train, d.outcome, covariates));
    if (need_test) out.test.emplace(build_frame(test, d.outcome, covariates));
    return out;
  }
  auto [train_table, train_covariates] = load_table(*d.train_csv, d, {});
  out.train.emplace(build_frame(train_table, d.outcome, train_covariates));
  if (need_test) {
    require(d.test_csv.has_value(), ErrorCode::kBadConfig, "dataset.test_csv is required");
    auto [test_table, test_covariates] = load_table(*d.test_csv, d, {});
    require(test_covariates == train_covariates, ErrorCode::kBadConfig,
            "train and test covariates differ after encoding");
    out.test.emplace(build_frame(test_table, d.outcome, test_covariates));
  }
  return out;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadConfig, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

struct OutputFile {
  std::string name;
  std::string content;
};

// Writes every file through a temporary name so a failed run leaves no
// partial outputs behind.
void write_outputs(const fs::path& dir, const std::vector<OutputFile>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  std::vector<fs::path> staged;
  for (const auto& f : files) {
    fs::path tmp = dir / (f.name + ".tmp");
    std::ofstream out(tmp, std::ios::binary);
    out << f.content;
    out.close();
    if (!out) {
      for (const auto& s : staged) fs::remove(s, ec);
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kIo, "cannot write '" + tmp.string() + "'");
    }
    staged.push_back(tmp);
  }
  for (std::size_t i = 0; i < files.size(); ++i) fs::rename(staged[i], dir / files[i].name);
}

Json manifest(const std::string& command, const RunConfig& c, Json extra = Json::object()) {
  Json m{{"manifest_version", kManifestVersion},
         {"stratsel_version", STRATSEL_VERSION},
         {"command", command},
         {"config", config_to_json(c)}};
  for (auto& item : extra.items()) m[item.key()] = item.value();
  return m;
}

void check_sizes(const RunConfig& c, const PopulationFrame& train, bool need_theta, bool need_n) {
  require(static_cast<std::size_t>(c.k) <= train.rows(), ErrorCode::kKExceedsPopulation,
          "K exceeds the training population");
  if (need_theta)
    require(c.theta <= train.cols(), ErrorCode::kThetaExceedsP,
            "theta=" + std::to_string(c.theta) + " exceeds p=" + std::to_string(train.cols()));
  if (need_n) {
    require(c.n >= c.k, ErrorCode::kSampleTooSmall, "n must be at least K");
    require(c.n <= static_cast<std::int64_t>(train.rows()), ErrorCode::kSampleExceedsPopulation,
            "n exceeds the training population");
  }
}

SearchConfig search_config(const RunConfig& c) {
  SearchConfig s;
  s.k = c.k;
  s.theta = c.theta;
  s.n = c.n;
  s.allocator = c.allocator;
  s.seed = c.seed;
  s.kmeans = c.kmeans;
  s.threads = c.threads;
  return s;
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  require(c.dataset.synthetic.has_value(), ErrorCode::kBadConfig,
          "generate needs dataset.synthetic");
  const SynthConfig synth = synth_config(c);
  noise_variance(synth);  // validates before any work
  auto [train, test] = generate_train_test(synth);
  auto csv = [](const PopulationFrame& f) {
    std::ostringstream s;
    write_csv(s, frame_to_table(f));
    return s.str();
  };
  Json extra{{"seeds",
              {{"master", c.seed},
               {"train", derive_seed(c.seed, {0x7261696eULL})},
               {"test", derive_seed(c.seed, {0x74657374ULL})}}},
             {"noise_variance", noise_variance(synth)},
             {"signal_variance", signal_variance(synth.beta, synth.rho)}};
  write_outputs(c.out_dir, {{"train.csv", csv(train)},
                            {"test.csv", csv(test)},
                            {"manifest.json", dump(manifest("generate", c, extra))}});
  out << "generated " << train.rows() << " training and " << test.rows() << " test rows ("
      << train.cols() << " covariates) in " << c.out_dir.string() << "\n";
  return 0;
}

int cmd_select(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_dataset(c, false);
  const PopulationFrame& train = *data.train;
  const bool variance = c.search == "variance";
  check_sizes(c, train, true, variance);
  const SearchConfig search = search_config(c);
  const SelectionResult result = variance ? sfs_variance_reduction(train, search) : sfs_wcss(train, search);
  write_outputs(c.out_dir, {{"selection.json", dump(to_json(result, &train.covariate_names()))},
                            {"manifest.json", dump(manifest("select", c))}});
  out << "selected";
  for (auto f : result.selected) out << ' ' << train.covariate_names()[f];
  out << (result.terminated_early ? " (stopped early)" : "") << "\n";
  return 0;
}

int cmd_allocate(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_dataset(c, false);
  const PopulationFrame& train = *data.train;
  check_sizes(c, train, false, true);

  StratumPartition partition;
  std::vector<Label> labels;
  if (c.partition) {
    partition = partition_from_json(read_json(*c.partition));
    labels = kmeans_assign(partition, train);
  } else {
    std::vector<std::size_t> features;
    if (!c.features.empty()) {
      for (const auto& name : c.features) features.push_back(train.covariate_index(name));
    } else if (c.selection) {
      const Json sel = read_json(*c.selection);
      for (const auto& name : sel.at("selected_names")) features.push_back(train.covariate_index(name.get<std::string>()));
      require(!features.empty(), ErrorCode::kBadConfig, "selection file selects no features");
    } else {
      for (std::size_t j = 0; j < train.cols(); ++j) features.push_back(j);
    }
    partition = kmeans_fit(train, features, c.k, derive_seed(c.seed, {0xa11ULL}), c.kmeans);
    labels = partition.train_labels;
  }
  const StratumStats stats = stratum_stats(train, labels);
  const AllocationPlan plan = allocate(stats, c.n, c.allocator);
  Json doc{{"plan", to_json(plan)},
           {"stats", to_json(stats)},
           {"stratified_variance", stratified_variance(stats, plan)},
           {"srs_variance", srs_variance(stats, c.n)}};
  write_outputs(c.out_dir, {{"plan.json", dump(doc)},
                            {"partition.json", dump(to_json(partition))},
                            {"manifest.json", dump(manifest("allocate", c))}});
  out << allocation_method_name(plan.method) << " plan:";
  for (auto s : plan.sizes) out << ' ' << s;
  out << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  require(!c.methods.empty(), ErrorCode::kBadConfig, "evaluate needs at least one method");
  require(c.replications >= 2, ErrorCode::kBadConfig, "replications must be at least 2");
  const Dataset data = load_dataset(c, true);
  const PopulationFrame& train = *data.train;
  const PopulationFrame& test = *data.test;
  require(train.covariate_names() == test.covariate_names(), ErrorCode::kBadConfig,
          "train and test covariates differ");
  const bool stratified = std::any_of(c.methods.begin(), c.methods.end(), is_stratified);
  const bool search = std::any_of(c.methods.begin(), c.methods.end(), [](Method m) {
    return m == Method::kSfsKm || m == Method::kSfsKmV;
  });
  check_sizes(c, train, search, stratified);
  require(c.n >= 1 && c.n <= static_cast<std::int64_t>(test.rows()), ErrorCode::kSampleExceedsPopulation,
          "n must lie in [1, N_test]");
  if (search) require(c.theta >= 1, ErrorCode::kBadConfig, "forward search methods need theta >= 1");

  ExperimentSpec spec;
  spec.methods = c.methods;
  spec.allocators = c.allocators;
  spec.k = c.k;
  spec.theta = c.theta;
  spec.n = c.n;
  spec.replications = c.replications;
  spec.seed = c.seed;
  spec.kmeans = c.kmeans;
  spec.threads = c.threads;
  spec.dataset = c.dataset.name;
  const EvaluationReport report = run_experiment(train, test, spec);
  std::ostringstream csv;
  write_report_csv(csv, report);
  write_outputs(c.out_dir, {{"report.json", dump(to_json(report))},
                            {"report.csv", csv.str()},
                            {"manifest.json", dump(manifest("evaluate", c))}});
  for (const auto& m : report.methods) {
    out << method_name(m.method);
    if (m.allocator) out << " (" << allocation_method_name(*m.allocator) << ")";
    out << ": variance " << m.variance << ", reduction " << m.variance_reduction_percent << "%\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stratification variable selection for online controlled experiments", "stratsel"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> replications;
  std::optional<std::string> methods;
  std::optional<unsigned> threads;
  std::string command;
  const std::pair<const char*, const char*> commands[] = {
      {"generate", "Write synthetic train/test populations as CSV"},
      {"select", "Choose stratification variables by forward search"},
      {"allocate", "Stratify on chosen variables and allocate the sample"},
      {"evaluate", "Monte Carlo comparison of sampling methods"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "JSON config or manifest")->required();
    sub->add_option("--seed", seed, "Master seed override");
    sub->add_option("--out-dir", out_dir, "Output directory override");
    sub->add_option("--replications", replications, "Monte Carlo replications override");
    sub->add_option("--methods", methods, "Comma-separated method list override");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sub->callback([&command, name] { command = name; });
  }

  std::vector<const char*> argv;
  argv.push_back("stratsel");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const fs::path path(config_path);
    RunConfig config = parse_config(read_json(path), path.parent_path());
    const Json doc = read_json(path);
    if (doc.contains("manifest_version"))
      require(doc.value("command", command) == command, ErrorCode::kBadConfig,
              "manifest was written by '" + doc.value("command", std::string()) + "'");
    if (seed) config.seed = *seed;
    if (out_dir) config.out_dir = fs::path(*out_dir);
    if (replications) config.replications = *replications;
    if (threads) config.threads = *threads;
    if (methods) {
      config.methods.clear();
      for (const auto& m : split_list(*methods)) config.methods.push_back(parse_method(m));
    }
    if (command == "generate") return cmd_generate(config, out);
    if (command == "select") return cmd_select(config, out);
    if (command == "allocate") return cmd_allocate(config, out);
    return cmd_evaluate(config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace stratsel::cli
