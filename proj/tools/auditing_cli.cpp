// Command-line harness: pool generation, single audits, greedy planning and
// batched experiments. Exit codes: 0 success, 2 configuration error,
// 3 guarantee violation detected with --assert.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "auditing/baselines.hpp"
#include "auditing/experiment.hpp"
#include "auditing/generators.hpp"
#include "auditing/greedy.hpp"
#include "auditing/metrics.hpp"
#include "auditing/pool_io.hpp"
#include "auditing/rectangles.hpp"
#include "auditing/thresholds.hpp"

namespace {

using namespace auditing;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << text;
}

ordered_json ledger_json(const CostLedger& l) {
  return {{"negative_queries", l.negative_queries}, {"total_queries", l.total_queries}};
}

ordered_json threshold_json(const ThresholdHyp& h) { return {{"kind", "threshold"}, {"a", h.a}}; }

ordered_json disjunction_json(const DisjunctionHyp& h) {
  return {{"kind", "disjunction"},
          {"a", h.a},
          {"polarity",
           h.polarity == Polarity::outside_positive ? "outside-positive" : "outside-negative"}};
}

SearchMode search_mode(const std::string& name) {
  if (name == "automatic") return SearchMode::automatic;
  if (name == "exact") return SearchMode::exact;
  if (name == "heuristic") return SearchMode::heuristic;
  throw ConfigError("unknown search mode '" + name + "'");
}

// Distribution flags shared by several subcommands.
struct DistFlags {
  std::string kind = "noisy-threshold";
  std::vector<double> a_star;
  double eta = 0.0;
  std::size_t d = 0;
  std::size_t m = 8;
  double eps = 0.125;
  std::vector<long long> positives;

  void add(CLI::App* app) {
    app->add_option("--kind", kind,
                    "noisy-threshold | noisy-disjunction | circle-pool | circle-pairs")
        ->capture_default_str();
    app->add_option("--a-star", a_star, "target threshold(s), comma separated")->delimiter(',');
    app->add_option("--eta", eta, "label noise rate")->capture_default_str();
    app->add_option("--d", d, "dimension (disjunctions, circle-pairs)");
    app->add_option("--circle-m", m, "circle-pool size")->capture_default_str();
    app->add_option("--eps", eps, "circle-pairs resolution")->capture_default_str();
    app->add_option("--positives", positives, "positive index per group (-1 for none)")
        ->delimiter(',');
  }

  DistributionSpec spec() const {
    DistributionSpec s;
    try {
      s.kind = distribution_kind_from_string(kind);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    s.eta = eta;
    s.m = m;
    s.eps = eps;
    s.positives = positives;
    if (s.kind == DistributionKind::noisy_disjunction) {
      s.d = d == 0 ? std::max<std::size_t>(a_star.size(), 1) : d;
      s.a_star = a_star.empty() ? std::vector<double>(s.d, 0.5) : a_star;
      if (s.a_star.size() == 1 && s.d > 1) s.a_star.assign(s.d, s.a_star.front());
    } else {
      s.d = d == 0 ? 2 : d;
      s.a_star = a_star.empty() ? std::vector<double>{0.5} : a_star;
    }
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("distribution: ") + e.what());
    }
    return s;
  }
};

int run_gen(const DistFlags& flags, std::size_t n, std::uint64_t seed, const std::string& out,
            const std::string& table_out) {
  const auto spec = flags.spec();
  Pool pool;
  if (spec.kind == DistributionKind::circle_pool && n == 0) {
    // The pool itself, labeled by the requested labeling.
    const auto cp = circle_pool(spec.m);
    const long long pos = spec.positives.empty() ? -1 : spec.positives.front();
    pool = cp.labeled(static_cast<std::size_t>(pos + 1));
    if (!table_out.empty()) {
      std::ostringstream ss;
      write_class_table(ss, cp.table());
      write_output(table_out, ss.str());
    }
  } else {
    if (n == 0) throw ConfigError("--n must be positive");
    Rng rng(seed);
    pool = make_distribution(spec)->draw(n, rng);
  }
  std::ostringstream ss;
  write_pool_csv(ss, pool);
  write_output(out, ss.str());
  return kExitOk;
}

struct AuditFlags {
  DistFlags dist;
  double eta_max = 0.05;
  double eta_min = 0.1;
  double alpha = 0.5;
  double delta = 0.2;
  std::string preset = "desk";
  std::uint64_t seed = 0;
  std::size_t eval_size = 50000;
  std::string search = "automatic";
  std::string trace;
  bool without_replacement = false;
};

int run_audit_thresholds(const AuditFlags& f) {
  auto spec = f.dist.spec();
  if (spec.dim() != 1) throw ConfigError("audit thresholds needs a one-dimensional distribution");
  ThresholdAuditParams p;
  p.eta_max = f.eta_max;
  p.alpha = f.alpha;
  p.delta = f.delta;
  p.sizes = SampleSizeConfig::from_name(f.preset);
  p.with_replacement = !f.without_replacement;
  const auto dist = make_distribution(spec);
  Rng rng(f.seed);
  const auto res = audit_thresholds_agnostic(*dist, p, rng);
  const Pool eval = dist->draw(f.eval_size, rng);

  ordered_json j;
  j["hypothesis"] = threshold_json(res.hypothesis);
  j["coarse_hypothesis"] = threshold_json(res.coarse_hypothesis);
  j["ledger"] = ledger_json(res.ledger);
  ordered_json checkpoints = ordered_json::array();
  for (const auto& c : res.checkpoints) {
    checkpoints.push_back({{"step", c.step}, {"ledger", ledger_json(c.ledger)}});
  }
  j["checkpoints"] = checkpoints;
  j["nu"] = res.nu;
  j["sizes"] = {{"s0", res.s0_size}, {"s", res.s_size},   {"sq", res.sq_size},
                {"s1", res.s1_size}, {"s2", res.s2_size}, {"scan_cap", res.scan_cap}};
  j["heldout_error"] = err_on_sample(eval, res.hypothesis);
  j["exact_error"] = exact_error(spec, res.hypothesis);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int run_audit_rectangles(const AuditFlags& f) {
  auto flags = f.dist;
  if (flags.kind == "noisy-threshold") flags.kind = "noisy-disjunction";
  const auto spec = flags.spec();
  RectangleAuditParams p;
  p.eta_min = f.eta_min;
  p.alpha = f.alpha;
  p.delta = f.delta;
  p.sizes = SampleSizeConfig::from_name(f.preset);
  p.search.mode = search_mode(f.search);
  const auto dist = make_distribution(spec);
  Rng rng(f.seed);
  const auto res = audit_rectangles_agnostic(*dist, p, rng);
  const Pool eval = dist->draw(f.eval_size, rng);

  if (!f.trace.empty()) {
    std::string lines;
    for (const auto& r : res.rounds) lines += round_trace_to_json_line(r) + "\n";
    write_output(f.trace, lines);
  }
  ordered_json j;
  j["hypothesis"] = disjunction_json(res.hypothesis);
  j["ledger"] = ledger_json(res.ledger);
  j["nu"] = res.nu;
  j["rounds"] = res.rounds.size();
  j["heldout_error"] = err_on_sample(eval, res.hypothesis);
  j["exact_error"] = exact_error(spec, res.hypothesis);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int run_audit_pool(const std::string& path, const std::string& method, std::size_t k,
                   bool assert_mode) {
  const Pool pool = load_pool_csv(path);
  if (pool.empty()) throw ConfigError("pool file has no points");
  AuditOracle oracle(pool);
  ordered_json j;
  j["method"] = method;
  std::vector<std::string> violations;
  if (method == "realizable-disjunction") {
    const auto h = audit_realizable_disjunction(oracle);
    j["hypothesis"] = disjunction_json(h);
    j["pool_error"] = err_on_sample(pool, h);
    if (assert_mode && err_on_sample(pool, h) > 0.0) violations.push_back("non-zero pool error");
    if (assert_mode && oracle.ledger().negative_queries > pool.dim()) {
      violations.push_back("more than d negative queries");
    }
  } else {
    if (pool.dim() != 1) throw ConfigError(method + " needs a one-dimensional pool");
    ThresholdHyp h;
    if (method == "realizable-threshold") {
      h = audit_realizable_threshold(oracle);
    } else if (method == "k") {
      h = audit_pool_thresholds_k(oracle, k);
    } else if (method == "binary-search") {
      h = binary_search_active(oracle);
    } else {
      throw ConfigError("unknown pool method '" + method + "'");
    }
    const auto errors = count_errors(pool, h).errors;
    const auto best = threshold_class_errors(pool);
    j["hypothesis"] = threshold_json(h);
    j["pool_error"] = static_cast<double>(errors) / static_cast<double>(pool.size());
    j["pool_optimum"] = static_cast<double>(best) / static_cast<double>(pool.size());
    const std::size_t allowed = method == "k" ? k : 0;
    if (assert_mode && best <= allowed && errors != best) {
      violations.push_back("pool error above the pool optimum");
    }
    if (assert_mode && method != "binary-search" && best <= allowed &&
        oracle.ledger().negative_queries > allowed + 1) {
      violations.push_back("negative queries above k+1");
    }
  }
  j["ledger"] = ledger_json(oracle.ledger());
  j["violations"] = violations;
  std::cout << j.dump(2) << '\n';
  return violations.empty() ? kExitOk : kExitViolation;
}

int run_greedy_plan(const std::string& table_path, const std::string& cost_name,
                    const std::string& truth, bool assert_mode) {
  const auto table = load_class_table(table_path);
  CostSpec cost;
  if (cost_name == "audit") {
    cost = CostSpec::audit();
  } else if (cost_name == "unit") {
    cost = CostSpec::unit();
  } else {
    cost = load_cost_matrix(cost_name, table);
  }
  std::size_t row = 0;
  const auto& ids = table.hypothesis_ids();
  const auto it = std::find(ids.begin(), ids.end(), truth);
  if (it != ids.end()) {
    row = static_cast<std::size_t>(it - ids.begin());
  } else {
    throw ConfigError("unknown hypothesis id '" + truth + "'");
  }
  const auto result = greedy_identify(table, cost, row);

  std::cout << "step,point,label,cost,version_space\n";
  for (std::size_t s = 0; s < result.transcript.entries.size(); ++s) {
    const auto& e = result.transcript.entries[s];
    std::cout << s << ',' << table.point_ids()[e.point] << ',' << e.label << ','
              << format_double(e.cost) << ',' << e.version_space_size << '\n';
  }
  std::cout << "identified," << ids[result.hypothesis] << '\n';
  std::cout << "total_cost," << format_double(result.transcript.total_cost) << '\n';
  const double factor = greedy_bound_factor(table.rows());
  std::cout << "bound_factor," << format_double(factor) << '\n';
  if (table.rows() <= kOptMaxRows && table.cols() <= kOptMaxPoints) {
    const double opt = opt_cost_bruteforce(table, cost);
    const bool holds = result.transcript.total_cost <= factor * opt + 1e-9;
    std::cout << "opt," << format_double(opt) << '\n';
    std::cout << "bound_holds," << (holds ? "true" : "false") << '\n';
    if (assert_mode && !holds) return kExitViolation;
  } else {
    std::cout << "opt,skipped\n";
  }
  return kExitOk;
}

struct ExperimentFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string algorithm;
  std::string cls;
  DistFlags dist;
  bool dist_given = false;
  std::optional<double> eta_max, eta_min, alpha, delta;
  std::optional<std::size_t> m, k, trials, eval_size;
  std::string preset;
  std::string search;
  std::vector<std::string> sweeps;
  bool eta_max_follows_eta = false;
  std::string out;
  std::string csv;
  std::size_t workers = 0;
  bool assert_mode = false;
  bool record_timing = false;
};

ExperimentConfig build_config(const ExperimentFlags& f, CLI::App* app) {
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    c = config_from_json(read_file(f.config_path));
  } else if (f.algorithm.empty()) {
    throw ConfigError("give --config or --algorithm");
  }
  if (!f.algorithm.empty()) {
    c.algorithm = algorithm_from_string(f.algorithm);
    if (f.cls.empty()) {
      const bool thresholds = c.algorithm == Algorithm::audit_realizable_threshold ||
                              c.algorithm == Algorithm::audit_pool_k ||
                              c.algorithm == Algorithm::binary_search ||
                              c.algorithm == Algorithm::audit_thresholds_agnostic;
      c.cls = thresholds ? HypothesisClass::thresholds : HypothesisClass::disjunctions;
    }
  }
  if (!f.cls.empty()) {
    try {
      c.cls = hypothesis_class_from_string(f.cls);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (app->count("--kind") || app->count("--a-star") || app->count("--eta") ||
      app->count("--d") || app->count("--circle-m") || app->count("--eps") ||
      app->count("--positives")) {
    c.distribution = f.dist.spec();
  }
  if (f.eta_max) c.params.eta_max = *f.eta_max;
  if (f.eta_min) c.params.eta_min = *f.eta_min;
  if (f.alpha) c.params.alpha = *f.alpha;
  if (f.delta) c.params.delta = *f.delta;
  if (f.m) c.params.m = *f.m;
  if (f.k) c.params.k = *f.k;
  if (f.trials) c.trials = *f.trials;
  if (f.eval_size) c.eval_size = *f.eval_size;
  if (!f.preset.empty()) c.sizes = SampleSizeConfig::from_name(f.preset);
  if (!f.search.empty()) c.search = search_mode(f.search);
  if (f.eta_max_follows_eta) c.eta_max_follows_eta = true;
  for (const auto& s : f.sweeps) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep expects key=v1,v2,...");
    std::vector<double> values;
    std::stringstream ss(s.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("bad sweep value '" + item + "'");
      }
    }
    c.sweep[s.substr(0, eq)] = values;
  }
  if (!f.seed) throw ConfigError("--seed is required for experiments");
  c.seed = *f.seed;
  c.validate();
  return c;
}

int run_experiment_cmd(const ExperimentFlags& f, CLI::App* app) {
  const auto config = build_config(f, app);
  RunOptions options;
  options.workers = f.workers;
  options.record_timing = f.record_timing;
  const auto report = run_experiment(config, options);
  write_output(f.out, report_to_json(report));
  if (!f.csv.empty()) write_output(f.csv, report_to_csv(report));
  if (f.assert_mode && report.violations() > 0) {
    std::cerr << "guarantee violations: " << report.violations() << '\n';
    return kExitViolation;
  }
  return kExitOk;
}

int run_compare_cmd(const std::vector<std::string>& configs,
                    const std::vector<std::string>& reports, std::optional<std::uint64_t> seed,
                    std::size_t workers, const std::string& out) {
  std::vector<ExperimentReport> all;
  for (const auto& path : reports) all.push_back(report_from_json(read_file(path)));
  if (!configs.empty() && !seed) throw ConfigError("--seed is required for experiments");
  for (const auto& path : configs) {
    auto c = config_from_json(read_file(path));
    c.seed = *seed;
    RunOptions options;
    options.workers = workers;
    all.push_back(run_experiment(c, options));
  }
  write_output(out, compare_reports(all));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auditing: active learning where only negative labels cost"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Materialize a pool from a distribution as CSV");
  DistFlags gen_dist;
  gen_dist.add(gen);
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_table;
  gen->add_option("--n", gen_n, "number of draws (circle-pool: 0 writes the pool itself)");
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output CSV (stdout by default)");
  gen->add_option("--table", gen_table, "circle-pool: also write the labeling table CSV");

  // audit
  auto* audit = app.add_subcommand("audit", "Run a single audit");
  audit->require_subcommand(1);
  AuditFlags af;
  auto* thr = audit->add_subcommand("thresholds", "Agnostic threshold auditing");
  auto* rect = audit->add_subcommand("rectangles", "Agnostic disjunction auditing");
  for (auto* sub : {thr, rect}) {
    af.dist.add(sub);
    sub->add_option("--alpha", af.alpha, "excess error factor")->capture_default_str();
    sub->add_option("--delta", af.delta, "failure probability")->capture_default_str();
    sub->add_option("--preset", af.preset, "sample-size constants: desk | theory")
        ->capture_default_str();
    sub->add_option("--seed", af.seed, "run seed")->capture_default_str();
    sub->add_option("--eval-size", af.eval_size, "held-out sample size")->capture_default_str();
  }
  thr->add_option("--eta-max", af.eta_max, "upper bound on the class error")
      ->capture_default_str();
  thr->add_flag("--without-replacement", af.without_replacement,
                "draw sub-samples without replacement");
  rect->add_option("--eta-min", af.eta_min, "lower bound on the class error")
      ->capture_default_str();
  rect->add_option("--search", af.search, "automatic | exact | heuristic")->capture_default_str();
  rect->add_option("--trace", af.trace, "write the per-round trace as JSON lines");

  auto* pool_cmd = audit->add_subcommand("pool", "Audit a labeled pool file");
  std::string pool_path, pool_method = "realizable-threshold";
  std::size_t pool_k = 0;
  bool pool_assert = false;
  pool_cmd->add_option("--pool", pool_path, "pool CSV")->required();
  pool_cmd->add_option("--method", pool_method,
                       "realizable-threshold | k | binary-search | realizable-disjunction")
      ->capture_default_str();
  pool_cmd->add_option("--k", pool_k, "error budget for --method k")->capture_default_str();
  pool_cmd->add_flag("--assert", pool_assert, "exit 3 when a guarantee is violated");

  // greedy
  auto* greedy = app.add_subcommand("greedy", "Finite-class greedy planning");
  greedy->require_subcommand(1);
  auto* plan = greedy->add_subcommand("plan", "Greedy transcript against one hypothesis");
  std::string table_path, cost_name = "audit", truth;
  bool plan_assert = false;
  plan->add_option("--table", table_path, "hypothesis table CSV")->required();
  plan->add_option("--cost", cost_name, "audit | unit | <cost matrix CSV>")->capture_default_str();
  plan->add_option("--true", truth, "id of the true hypothesis")->required();
  plan->add_flag("--assert", plan_assert, "exit 3 when the greedy bound fails");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Batched experiments");
  exp->require_subcommand(1);
  auto* run = exp->add_subcommand("run", "Run an experiment and write its report");
  ExperimentFlags ef;
  run->add_option("--config", ef.config_path, "JSON config; flags override its fields");
  run->add_option("--seed", ef.seed, "base seed; trial i uses seed + i");
  run->add_option("--algorithm", ef.algorithm, "algorithm id");
  run->add_option("--class", ef.cls, "thresholds | disjunctions");
  ef.dist.add(run);
  run->add_option("--eta-max", ef.eta_max, "upper bound on the class error");
  run->add_option("--eta-min", ef.eta_min, "lower bound on the class error");
  run->add_option("--alpha", ef.alpha, "excess error factor");
  run->add_option("--delta", ef.delta, "failure probability");
  run->add_option("--m", ef.m, "pool size or passive sample size");
  run->add_option("--k", ef.k, "error budget for audit-pool-k");
  run->add_option("--trials", ef.trials, "trials per grid point");
  run->add_option("--eval-size", ef.eval_size, "held-out sample size");
  run->add_option("--preset", ef.preset, "desk | theory");
  run->add_option("--search", ef.search, "automatic | exact | heuristic");
  run->add_option("--sweep", ef.sweeps, "key=v1,v2,... (repeatable)");
  run->add_flag("--eta-max-follows-eta", ef.eta_max_follows_eta,
                "sweeping eta also sets eta_max");
  run->add_option("--out", ef.out, "report JSON (stdout by default)");
  run->add_option("--csv", ef.csv, "summary CSV");
  run->add_option("--workers", ef.workers, "worker threads (0: available parallelism)");
  run->add_flag("--assert", ef.assert_mode, "exit 3 when a guarantee is violated");
  run->add_flag("--record-timing", ef.record_timing,
                "add per-trial runtimes and a UTC timestamp (breaks byte-identity)");

  auto* cmp = exp->add_subcommand("compare", "Align several experiments in one CSV");
  std::vector<std::string> cmp_configs, cmp_reports;
  std::optional<std::uint64_t> cmp_seed;
  std::size_t cmp_workers = 0;
  std::string cmp_out;
  cmp->add_option("--config", cmp_configs, "config JSON to run (repeatable)");
  cmp->add_option("--report", cmp_reports, "existing report JSON (repeatable)");
  cmp->add_option("--seed", cmp_seed, "base seed for the configs");
  cmp->add_option("--workers", cmp_workers, "worker threads");
  cmp->add_option("--out", cmp_out, "merged CSV (stdout by default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return run_gen(gen_dist, gen_n, gen_seed, gen_out, gen_table);
    if (thr->parsed()) return run_audit_thresholds(af);
    if (rect->parsed()) return run_audit_rectangles(af);
    if (pool_cmd->parsed()) return run_audit_pool(pool_path, pool_method, pool_k, pool_assert);
    if (plan->parsed()) return run_greedy_plan(table_path, cost_name, truth, plan_assert);
    if (run->parsed()) return run_experiment_cmd(ef, run);
    if (cmp->parsed()) return run_compare_cmd(cmp_configs, cmp_reports, cmp_seed, cmp_workers, cmp_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
