// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "stratsel/allocation.hpp"
#include "stratsel/baselines.hpp"
#include "stratsel/cli.hpp"
#include "stratsel/eval_harness.hpp"
#include "stratsel/kmeans.hpp"
#include "stratsel/serialize.hpp"
#include "stratsel/stats.hpp"
#include "stratsel/subset_search.hpp"
#include "stratsel/synthgen.hpp"
#include "stratsel/table.hpp"
#include "stratsel/variance.hpp"

namespace fs = std::filesystem;
using namespace stratsel;

namespace {

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool near_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Verdict allocator_exactness() {
  const auto start = Clock::now();
  Rng rng = make_rng(101);
  int checked = 0;
  int mismatches = 0;
  while (checked < 200) {
    const std::size_t K = 1 + uniform_below(rng, 4);
    std::vector<std::int64_t> sizes(K);
    std::vector<double> variances(K);
    AllocationBounds bounds;
    for (std::size_t k = 0; k < K; ++k) {
      sizes[k] = 1 + static_cast<std::int64_t>(uniform_below(rng, 50));
      variances[k] = uniform_below(rng, 4) == 0 ? 0.0 : uniform_unit(rng) * 20.0;
      const auto lo = 1 + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(std::min<std::int64_t>(sizes[k], 8))));
      const auto hi = lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(sizes[k] - lo + 1)));
      bounds.lower.push_back(lo);
      bounds.upper.push_back(hi);
    }
    std::int64_t lo = 0, hi = 0;
    for (std::size_t k = 0; k < K; ++k) {
      lo += bounds.lower[k];
      hi += bounds.upper[k];
    }
    hi = std::min<std::int64_t>(hi, 30);
    if (lo > hi) continue;
    const auto n = lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
    const auto stats = StratumStats::from_moments(sizes, std::vector<double>(K, 0.0), variances);
    const double greedy = allocation_objective(stats, optimal(stats, n, bounds).sizes);
    const double exact = allocation_objective(stats, brute_force_optimal(stats, n, bounds).sizes);
    if (!(greedy == exact || near_rel(greedy, exact, 1e-12))) ++mismatches;
    ++checked;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 10.0 ? Outcome::kPass : Outcome::kFail,
          fmt("%d instances, %d mismatches, %.2f s (limit 10 s)", checked, mismatches, elapsed)};
}

Verdict single_stratum_consistency() {
  Rng rng = make_rng(202);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto N = 2 + static_cast<std::int64_t>(uniform_below(rng, 1'000'000));
    const auto n = 1 + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(N - 1)));
    const double var = 1e-3 + uniform_unit(rng) * 1e3;
    const auto stats = StratumStats::from_moments({N}, {0.0}, {var});
    const double a = stratified_variance(stats, AllocationPlan{{n}, n, AllocationMethod::kManual});
    const double b = srs_variance(stats, n);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
  }
  return {worst <= 1e-12 ? Outcome::kPass : Outcome::kFail,
          fmt("100 triples, max relative error %.3g (limit 1e-12)", worst)};
}

Verdict gap_identity() {
  Rng rng = make_rng(303);
  double worst = 0.0;
  double worst_uncorrected = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t K = 2 + uniform_below(rng, 9);
    std::vector<std::int64_t> sizes(K);
    std::vector<double> means(K), variances(K);
    for (std::size_t k = 0; k < K; ++k) {
      sizes[k] = 2 + static_cast<std::int64_t>(uniform_below(rng, 20000));
      means[k] = (uniform_unit(rng) - 0.5) * 10.0;
      variances[k] = uniform_unit(rng) * 4.0;
    }
    const auto stats = StratumStats::from_moments(sizes, means, variances);
    const std::int64_t N = stats.population();
    const auto n = 1 + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(N - 1)));
    std::vector<double> quotas;
    for (auto s : sizes) quotas.push_back(static_cast<double>(s) * static_cast<double>(n) / static_cast<double>(N));
    const double diff = srs_variance(stats, n) - stratified_variance(stats, quotas);
    const double fpc = 1.0 - static_cast<double>(n) / static_cast<double>(N);
    const double gap = srs_gap(stats, n);
    worst = std::max(worst, std::abs(diff - fpc * gap) / std::abs(fpc * gap));
    worst_uncorrected = std::max(worst_uncorrected, std::abs(diff / gap - fpc));
  }
  const bool ok = worst <= 1e-9 && worst_uncorrected <= 1e-9;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("100 instances, max relative error %.3g (limit 1e-9); uncorrected ratio off fpc by %.3g",
              worst, worst_uncorrected)};
}

SynthConfig desk_config(std::size_t n, BetaKind kind, std::uint64_t seed) {
  SynthConfig c;
  c.n = n;
  c.beta = beta_pattern(kind, 20);
  c.seed = seed;
  return c;
}

Verdict monte_carlo_agreement() {
  const auto start = Clock::now();
  const PopulationFrame frame = generate(desk_config(10000, BetaKind::kType1, 404));
  const auto partition = kmeans_fit(frame, {0, 4, 8}, 6, 11);
  const auto stats = stratum_stats(frame, partition.train_labels);
  const std::int64_t n = 500;
  const StratifiedSampler sampler(frame, partition.train_labels, optimal(stats, n));
  const double strat_mc = estimate_sampling_variance([&](Rng& r) { return sampler.draw(r); }, 10000, 1);
  const double strat_eq = sampler.analytic_variance();
  const double srs_mc = estimate_sampling_variance([&](Rng& r) { return srs_mean(frame, n, r); }, 10000, 2);
  const auto whole = StratumStats::from_moments({static_cast<std::int64_t>(frame.rows())},
                                                {mean_of(frame.outcome())},
                                                {population_variance(frame.outcome())});
  const double srs_eq = srs_variance(whole, n);
  const double e1 = std::abs(strat_mc / strat_eq - 1.0);
  const double e2 = std::abs(srs_mc / srs_eq - 1.0);
  const double elapsed = seconds_since(start);
  const bool ok = e1 < 0.05 && e2 < 0.05 && elapsed < 60.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("stratified rel. error %.2f%%, SRS rel. error %.2f%% (limit 5%%), %.1f s (limit 60 s)", e1 * 100,
              e2 * 100, elapsed)};
}

constexpr std::uint64_t kDeskSeeds[] = {1, 2, 3, 4, 5};

SearchConfig desk_search(std::uint64_t seed, AllocationMethod allocator) {
  SearchConfig c;
  c.k = 6;
  c.theta = 5;
  c.n = 2000;
  c.allocator = allocator;
  c.seed = seed;
  return c;
}

Verdict variable_recovery() {
  const auto start = Clock::now();
  const std::set<std::size_t> truth = {0, 4, 8, 12, 16};
  int good_seeds = 0;
  int cuped_hits = 0;
  std::string picks;
  for (std::uint64_t seed : kDeskSeeds) {
    const auto [train, test] = generate_train_test(desk_config(20000, BetaKind::kType1, seed));
    const auto result = sfs_variance_reduction(train, desk_search(seed, AllocationMethod::kProportional));
    int hits = 0;
    for (auto f : result.selected) hits += truth.count(f) ? 1 : 0;
    good_seeds += hits >= 4 ? 1 : 0;
    picks += (picks.empty() ? "" : " ") + std::to_string(hits) + "/5";
    const auto [train2, test2] = generate_train_test(desk_config(20000, BetaKind::kType2, seed));
    cuped_hits += pick_covariate(train2) == 0 ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  const bool ok = good_seeds >= 4 && cuped_hits == 5 && elapsed < 600.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("true variables recovered per seed [%s], %d/5 seeds with >=4; CUPED picks X1 on %d/5; %.1f s",
              picks.c_str(), good_seeds, cuped_hits, elapsed)};
}

double reduction_of(const EvaluationReport& report, Method method) {
  for (const auto& m : report.methods)
    if (m.method == method) return m.variance_reduction_percent;
  return std::nan("");
}

// Reduction rates are averaged over the master seeds before comparing.
Verdict ordinal_claims() {
  const auto start = Clock::now();
  ExperimentSpec spec;
  spec.methods = {Method::kSrs, Method::kCuped, Method::kSfsKm, Method::kSfsKmV};
  spec.k = 6;
  spec.theta = 5;
  spec.n = 2000;
  spec.replications = 2000;
  const double seeds = static_cast<double>(std::size(kDeskSeeds));
  double v1 = 0.0, w1 = 0.0, c2 = 0.0, v2 = 0.0;
  int b_per_seed = 0;
  std::string detail;
  for (std::uint64_t seed : kDeskSeeds) {
    spec.seed = seed;
    const auto [train1, test1] = generate_train_test(desk_config(20000, BetaKind::kType1, seed));
    const auto r1 = run_experiment(train1, test1, spec);
    const auto [train2, test2] = generate_train_test(desk_config(20000, BetaKind::kType2, seed));
    const auto r2 = run_experiment(train2, test2, spec);
    const double sv1 = reduction_of(r1, Method::kSfsKmV), sw1 = reduction_of(r1, Method::kSfsKm);
    const double sc2 = reduction_of(r2, Method::kCuped), sv2 = reduction_of(r2, Method::kSfsKmV);
    v1 += sv1 / seeds;
    w1 += sw1 / seeds;
    c2 += sc2 / seeds;
    v2 += sv2 / seeds;
    b_per_seed += sc2 >= sv2 - 5.0 ? 1 : 0;
    detail += fmt(" [seed %llu: t1 V=%.1f W=%.1f; t2 CUPED=%.1f V=%.1f]",
                  static_cast<unsigned long long>(seed), sv1, sw1, sc2, sv2);
  }
  const bool a = v1 > w1 && v1 > 0.0;
  const bool b = c2 >= v2 - 5.0;
  return {a && b ? Outcome::kPass : Outcome::kFail,
          fmt("(a) type1 SFS-KM-V %.1f%% vs SFS-KM %.1f%%; (b) type2 CUPED %.1f%% vs SFS-KM-V %.1f%% "
              "(gap %.1f pp, limit 5; per seed %d/5); %.1f s;",
              v1, w1, c2, v2, v2 - c2, b_per_seed, seconds_since(start)) +
              detail};
}

Verdict optimal_dominance() {
  Rng rng = make_rng(707);
  int violations = 0;
  double mean_gain = 0.0;
  for (int t = 0; t < 50; ++t) {
    const PopulationFrame base = generate(desk_config(3000, t % 2 ? BetaKind::kType2 : BetaKind::kType1,
                                                      derive_seed(707, {static_cast<std::uint64_t>(t)})));
    const std::size_t f = uniform_below(rng, 20);
    const int K = 2 + static_cast<int>(uniform_below(rng, 7));
    const auto partition = kmeans_fit(base, {f}, K, derive_seed(708, {static_cast<std::uint64_t>(t)}));
    // Heteroscedastic noise: each stratum gets its own noise scale.
    std::vector<double> scale(static_cast<std::size_t>(K));
    for (auto& s : scale) s = std::exp(2.0 * (uniform_unit(rng) - 0.5) * 2.0);
    std::normal_distribution<double> normal;
    std::vector<double> y(base.outcome().begin(), base.outcome().end());
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += scale[static_cast<std::size_t>(partition.train_labels[i])] * normal(rng);
    const PopulationFrame frame(std::vector<double>(base.covariates().begin(), base.covariates().end()), y,
                                base.covariate_names(), base.outcome_name());
    const auto stats = stratum_stats(frame, partition.train_labels);
    const auto n = static_cast<std::int64_t>(stats.strata()) + static_cast<std::int64_t>(uniform_below(rng, 1000));
    const double vp = stratified_variance(stats, proportional(stats, n));
    const double vo = stratified_variance(stats, optimal(stats, n));
    if (vo > vp) ++violations;
    mean_gain += (1.0 - vo / vp) * 100.0 / 50.0;
  }
  return {violations == 0 ? Outcome::kPass : Outcome::kFail,
          fmt("50 cases, %d violations, mean optimal advantage %.1f%%", violations, mean_gain)};
}

Verdict runtime_bound() {
  const PopulationFrame frame = generate(desk_config(100000, BetaKind::kType1, 808));
  const auto start = Clock::now();
  SearchConfig c = desk_search(808, AllocationMethod::kOptimal);
  c.n = 10000;
  const auto result = sfs_variance_reduction(frame, c);
  const double elapsed = seconds_since(start);
  return {elapsed < 300.0 ? Outcome::kPass : Outcome::kFail,
          fmt("N=1e5, p=20, %zu fits, %.1f s single-threaded (limit 300 s)", result.evaluations, elapsed)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict manifest_determinism() {
  const fs::path root = fs::temp_directory_path() / "stratsel_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const Json dataset = {{"name", "synthetic"}, {"synthetic", {{"N", 2000}, {"p", 20}, {"beta", "type1"}}}};
  const Json base = {{"dataset", dataset}, {"K", 4},       {"theta", 3},
                     {"n", 200},           {"seed", 42},   {"replications", 200},
                     {"allocators", {"proportional", "optimal"}},
                     {"methods", {"SRS", "CUPED", "COSS", "K-means", "SFS-KM", "SFS-KM-V"}}};
  std::ostringstream sink;
  int compared = 0;
  std::string failures;
  for (const char* command : {"generate", "select", "allocate", "evaluate"}) {
    Json cfg = base;
    cfg["out_dir"] = std::string(command) + "_a";
    const fs::path cfg_path = root / (std::string(command) + ".json");
    std::ofstream(cfg_path) << cfg.dump(2);
    const fs::path a = root / (std::string(command) + "_a");
    const fs::path b = root / (std::string(command) + "_b");
    if (cli::run({command, "--config", cfg_path.string()}, sink, sink) != 0 ||
        cli::run({command, "--config", (a / "manifest.json").string(), "--out-dir", b.string()}, sink, sink) != 0) {
      failures += std::string(" ") + command + ":exit";
      continue;
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      if (name == "manifest.json") continue;
      ++compared;
      if (slurp(a / name) != slurp(b / name)) failures += " " + std::string(command) + "/" + name.string();
    }
  }
  fs::remove_all(root);
  return {failures.empty() && compared > 0 ? Outcome::kPass : Outcome::kFail,
          fmt("%d output files compared across 4 commands", compared) +
              (failures.empty() ? std::string() : ", differing:" + failures)};
}

Verdict pm25_pipeline() {
  const char* path = std::getenv("STRATSEL_PM25_CSV");
  if (path == nullptr || !fs::exists(path)) return {Outcome::kSkip, "set STRATSEL_PM25_CSV to a combined five-city CSV"};
  const char* outcome_env = std::getenv("STRATSEL_PM25_OUTCOME");
  const std::string outcome = outcome_env ? outcome_env : "PM2.5";
  const std::vector<std::string> covariates = {"DEWP", "TEMP", "HUMI", "PRES", "Iws", "precipitation",
                                               "Iprec", "city", "season", "cbwd"};
  const std::vector<std::string> categorical = {"city", "season", "cbwd"};
  std::vector<std::string> columns = covariates;
  columns.push_back("year");
  columns.push_back(outcome);
  Table table = preprocess(read_csv(path).select(columns), categorical, true);
  const auto names = expand_encoded_names(table, covariates, categorical);
  const Table train = table.filter_rows(evaluate_filter(table, "year==2014"));
  const Table test = table.filter_rows(evaluate_filter(table, "year==2015"));
  const auto f_train = build_frame(train, outcome, names);
  const auto f_test = build_frame(test, outcome, names);
  const bool ok = f_train.rows() == 43800 && f_test.rows() == 43800 && f_train.cols() == 21;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("train %zu rows, test %zu rows, %zu covariates (expected 43800, 43800, 21)", f_train.rows(),
              f_test.rows(), f_train.cols())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"allocator exactness", allocator_exactness},
      {"single-stratum consistency", single_stratum_consistency},
      {"exact gap identity", gap_identity},
      {"Monte Carlo vs analytic variance", monte_carlo_agreement},
      {"stratification variable recovery", variable_recovery},
      {"ordinal method comparison", ordinal_claims},
      {"optimal beats proportional", optimal_dominance},
      {"runtime bound N=1e5", runtime_bound},
      {"manifest determinism", manifest_determinism},
      {"PM2.5 ingestion", pm25_pipeline},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = v.outcome == Outcome::kPass ? "PASS" : v.outcome == Outcome::kFail ? "FAIL" : "SKIP";
    std::printf("[%s] %2zu %s: %s\n", tag, i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
    failed += v.outcome == Outcome::kFail ? 1 : 0;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
