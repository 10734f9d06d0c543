#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "auditing/baselines.hpp"
#include "auditing/generators.hpp"
#include "auditing/oracle.hpp"
#include "auditing/rectangles.hpp"
#include "auditing/sample_size.hpp"

namespace auditing {

enum class Algorithm {
  audit_realizable_threshold,    // pool of m points, right-to-left scan
  audit_pool_k,                  // pool of m points, stop after k+1 negatives
  binary_search,                 // pool of m points, bisection
  audit_thresholds_agnostic,     // distribution access, eta_max known
  audit_realizable_disjunction,  // pool of m points, per-coordinate scans
  audit_rectangles_agnostic,     // distribution access, eta_min known
  passive_erm,                   // m labeled draws, class ERM
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view name);

// Raised for invalid configurations; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentParams {
  double eta_max = 0.05;
  double eta_min = 0.1;
  double alpha = 0.5;
  double delta = 0.2;
  std::size_t m = 1000;
  std::size_t k = 0;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::audit_realizable_threshold;
  HypothesisClass cls = HypothesisClass::thresholds;
  DistributionSpec distribution;
  ExperimentParams params;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  SampleSizeConfig sizes = SampleSizeConfig::desk();
  std::size_t eval_size = 50000;
  bool with_replacement = true;
  SearchMode search = SearchMode::automatic;
  // Sweeping "eta" also sets eta_max when this is on.
  bool eta_max_follows_eta = false;
  // Slack added to the (1 + alpha) eta success bound.
  double success_slack = 0.0;
  // Swept parameters: m, k, d, eta, eta_max, eta_min, alpha, delta. The grid
  // is the cartesian product in key order, first key slowest.
  std::map<std::string, std::vector<double>> sweep;

  // Throws ConfigError on any out-of-range field, for every grid point.
  void validate() const;
};

// JSON round trip; missing fields take their defaults.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// One fully-resolved grid point.
struct GridPoint {
  std::map<std::string, double> values;  // the swept values, empty without a sweep
  ExperimentConfig config;               // with the values applied
};

std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  CostLedger ledger;
  double heldout_error = 0.0;
  std::optional<double> exact_error;
  std::optional<double> pool_error;
  bool success = false;
  std::vector<std::string> violations;
  std::string hypothesis;  // compact JSON
  std::optional<double> runtime_ms;
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Linear-interpolated quantiles over the sorted values (Hyndman-Fan type 7).
Summary summarize(std::vector<double> values);

struct PointReport {
  GridPoint point;
  std::vector<TrialRecord> trials;
  Summary negative_queries;
  Summary total_queries;
  Summary heldout_error;
  double success_fraction = 0.0;
  std::size_t violations = 0;
};

struct ExperimentReport {
  static constexpr int kSchemaVersion = 1;
  ExperimentConfig config;
  std::vector<PointReport> points;
  std::optional<std::string> created_utc;

  std::size_t violations() const;
};

struct RunOptions {
  std::size_t workers = 0;     // 0 picks the available parallelism
  bool record_timing = false;  // per-trial runtime and a UTC timestamp
};

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Runs one trial of a resolved grid point; seeded by `seed`.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial, std::uint64_t seed);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(std::string_view text);
// One row per grid point with the summary statistics.
std::string report_to_csv(const ExperimentReport& report);

// Aligns reports on their common grid points: one row per (algorithm, point).
// Throws ConfigError for fewer than two reports, different distribution
// kinds, or an empty intersection of grid points.
std::string compare_reports(const std::vector<ExperimentReport>& reports);

}  // namespace auditing
