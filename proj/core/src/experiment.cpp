#include "auditing/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "auditing/metrics.hpp"
#include "auditing/thresholds.hpp"
#include "json_util.hpp"

namespace auditing {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::pair<Algorithm, const char*> kAlgorithmNames[] = {
    {Algorithm::audit_realizable_threshold, "audit-realizable-threshold"},
    {Algorithm::audit_pool_k, "audit-pool-k"},
    {Algorithm::binary_search, "binary-search"},
    {Algorithm::audit_thresholds_agnostic, "audit-thresholds-agnostic"},
    {Algorithm::audit_realizable_disjunction, "audit-realizable-disjunction"},
    {Algorithm::audit_rectangles_agnostic, "audit-rectangles-agnostic"},
    {Algorithm::passive_erm, "passive-erm"},
};

constexpr std::pair<SearchMode, const char*> kSearchNames[] = {
    {SearchMode::automatic, "automatic"},
    {SearchMode::exact, "exact"},
    {SearchMode::heuristic, "heuristic"},
};

const std::vector<std::string> kSweepKeys = {"alpha", "d",       "delta", "eta",
                                             "eta_max", "eta_min", "k",     "m"};

bool is_threshold_algorithm(Algorithm a) {
  return a == Algorithm::audit_realizable_threshold || a == Algorithm::audit_pool_k ||
         a == Algorithm::binary_search || a == Algorithm::audit_thresholds_agnostic;
}

bool is_pool_algorithm(Algorithm a) {
  return a == Algorithm::audit_realizable_threshold || a == Algorithm::audit_pool_k ||
         a == Algorithm::binary_search || a == Algorithm::audit_realizable_disjunction;
}

[[noreturn]] void config_error(const std::string& what) { throw ConfigError(what); }

void require(bool ok, const std::string& what) {
  if (!ok) config_error(what);
}

std::size_t as_count(double v, const char* key) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    config_error(std::string("sweep value for ") + key + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

void apply_value(ExperimentConfig& c, const std::string& key, double v) {
  if (key == "m") {
    c.params.m = as_count(v, "m");
  } else if (key == "k") {
    c.params.k = as_count(v, "k");
  } else if (key == "d") {
    const std::size_t d = as_count(v, "d");
    c.distribution.d = d;
    if (c.distribution.kind == DistributionKind::noisy_disjunction &&
        c.distribution.a_star.size() != d && !c.distribution.a_star.empty()) {
      c.distribution.a_star.assign(d, c.distribution.a_star.front());
    }
  } else if (key == "eta") {
    c.distribution.eta = v;
    if (c.eta_max_follows_eta) c.params.eta_max = v;
  } else if (key == "eta_max") {
    c.params.eta_max = v;
  } else if (key == "eta_min") {
    c.params.eta_min = v;
  } else if (key == "alpha") {
    c.params.alpha = v;
  } else if (key == "delta") {
    c.params.delta = v;
  } else {
    config_error("unknown sweep key '" + key + "'");
  }
}

void validate_point(const ExperimentConfig& c) {
  require(c.trials >= 1, "trials must be at least 1");
  require(c.eval_size >= 1, "eval_size must be at least 1");
  require(c.params.m >= 1, "m must be at least 1");
  try {
    c.distribution.validate();
  } catch (const std::invalid_argument& e) {
    config_error(std::string("distribution: ") + e.what());
  }
  const std::size_t dim = c.distribution.dim();
  const auto& p = c.params;
  // Ranges are checked for every algorithm, including ones that ignore a field.
  require(p.delta > 0.0 && p.delta < 1.0, "delta must lie in (0, 1)");
  require(p.alpha > 0.0, "alpha must be positive");
  require(p.eta_max > 0.0 && p.eta_max < 1.0, "eta_max must lie in (0, 1)");
  require(p.eta_min > 0.0 && p.eta_min < 1.0, "eta_min must lie in (0, 1)");
  if (is_threshold_algorithm(c.algorithm)) {
    require(c.cls == HypothesisClass::thresholds,
            to_string(c.algorithm) + " works on the thresholds class");
  } else if (c.algorithm != Algorithm::passive_erm) {
    require(c.cls == HypothesisClass::disjunctions,
            to_string(c.algorithm) + " works on the disjunctions class");
  }
  if (c.cls == HypothesisClass::thresholds) {
    require(dim == 1, "the thresholds class needs a one-dimensional distribution");
  }
  switch (c.algorithm) {
    case Algorithm::audit_thresholds_agnostic:
      require(p.alpha < 1.0, "alpha must lie in (0, 1)");
      require((1.0 + p.alpha / 5.0) * p.eta_max <= 1.0, "(1 + alpha/5) eta_max must not exceed 1");
      break;
    case Algorithm::audit_rectangles_agnostic:
      require(p.alpha <= 1.0, "alpha must lie in (0, 1]");
      break;
    default:
      break;
  }
}

std::string hypothesis_json(const AnyHypothesis& h) {
  ordered_json j;
  if (const auto* t = std::get_if<ThresholdHyp>(&h)) {
    j["kind"] = "threshold";
    j["a"] = t->a;
  } else {
    const auto& d = std::get<DisjunctionHyp>(h);
    j["kind"] = "disjunction";
    j["a"] = d.a;
    j["polarity"] =
        d.polarity == Polarity::outside_positive ? "outside-positive" : "outside-negative";
  }
  return j.dump();
}

template <Hypothesis H>
double pool_error_of(const Pool& pool, const H& h) {
  return err_on_sample(pool, h);
}

double predict_error(const Pool& eval, const AnyHypothesis& h) {
  return std::visit([&](const auto& hyp) { return err_on_sample(eval, hyp); }, h);
}

std::optional<double> exact_error_of(const DistributionSpec& spec, const AnyHypothesis& h) {
  try {
    return std::visit([&](const auto& hyp) { return exact_error(spec, hyp); }, h);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

bool realizable_by_disjunction(const Pool& pool) {
  Pool flipped = pool;
  for (std::size_t i = 0; i < flipped.size(); ++i) flipped.set_label(i, flip(pool.label(i)));
  return fit_outside_negative(flipped).has_value();
}

std::uint64_t ceil_log2(std::uint64_t m) {
  std::uint64_t r = 0;
  while ((std::uint64_t{1} << r) < m) ++r;
  return r;
}

}  // namespace

std::string to_string(Algorithm a) {
  for (const auto& [k, name] : kAlgorithmNames) {
    if (k == a) return name;
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
  for (const auto& [k, n] : kAlgorithmNames) {
    if (name == n) return k;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  for (const auto& [key, values] : sweep) {
    require(std::find(kSweepKeys.begin(), kSweepKeys.end(), key) != kSweepKeys.end(),
            "unknown sweep key '" + key + "'");
    require(!values.empty(), "sweep list for '" + key + "' is empty");
  }
  for (const auto& point : expand_grid(*this)) validate_point(point.config);
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
  std::vector<GridPoint> out;
  GridPoint base;
  base.config = config;
  base.config.sweep.clear();
  out.push_back(base);
  for (const auto& [key, values] : config.sweep) {
    std::vector<GridPoint> next;
    for (const auto& point : out) {
      for (double v : values) {
        GridPoint p = point;
        p.values[key] = v;
        apply_value(p.config, key, v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::string config_to_json(const ExperimentConfig& c) {
  return detail::config_json(c).dump(2);
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return detail::config_from_json_value(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

namespace detail {

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["algorithm"] = to_string(c.algorithm);
  j["class"] = to_string(c.cls);
  ordered_json dist;
  dist["kind"] = to_string(c.distribution.kind);
  dist["a_star"] = c.distribution.a_star;
  dist["eta"] = c.distribution.eta;
  dist["d"] = c.distribution.d;
  dist["m"] = c.distribution.m;
  dist["eps"] = c.distribution.eps;
  dist["positives"] = c.distribution.positives;
  j["distribution"] = dist;
  ordered_json params;
  params["eta_max"] = c.params.eta_max;
  params["eta_min"] = c.params.eta_min;
  params["alpha"] = c.params.alpha;
  params["delta"] = c.params.delta;
  params["m"] = c.params.m;
  params["k"] = c.params.k;
  j["params"] = params;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  ordered_json sizes;
  sizes["preset"] = c.sizes.name();
  sizes["C"] = c.sizes.C;
  sizes["c"] = c.sizes.c;
  j["sizes"] = sizes;
  j["eval_size"] = c.eval_size;
  j["with_replacement"] = c.with_replacement;
  for (const auto& [k, name] : kSearchNames) {
    if (k == c.search) j["search"] = name;
  }
  j["eta_max_follows_eta"] = c.eta_max_follows_eta;
  j["success_slack"] = c.success_slack;
  ordered_json sweep = ordered_json::object();
  for (const auto& [key, values] : c.sweep) sweep[key] = values;
  j["sweep"] = sweep;
  return j;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) config_error(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      config_error(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json_value(const json& j) {
  check_keys(j,
             {"algorithm", "class", "distribution", "params", "trials", "seed", "sizes",
              "eval_size", "with_replacement", "search", "eta_max_follows_eta", "success_slack",
              "sweep"},
             "config");
  ExperimentConfig c;
  std::string name;
  if (!j.contains("algorithm")) config_error("config needs an algorithm");
  read(j, "algorithm", name);
  c.algorithm = algorithm_from_string(name);
  c.cls = is_threshold_algorithm(c.algorithm) ? HypothesisClass::thresholds
                                              : HypothesisClass::disjunctions;
  if (j.contains("class")) {
    read(j, "class", name);
    try {
      c.cls = hypothesis_class_from_string(name);
    } catch (const std::invalid_argument& e) {
      config_error(e.what());
    }
  }
  if (j.contains("distribution")) {
    const auto& d = j.at("distribution");
    check_keys(d, {"kind", "a_star", "eta", "d", "m", "eps", "positives"}, "distribution");
    if (d.contains("kind")) {
      read(d, "kind", name);
      try {
        c.distribution.kind = distribution_kind_from_string(name);
      } catch (const std::invalid_argument& e) {
        config_error(e.what());
      }
    }
    read(d, "a_star", c.distribution.a_star);
    read(d, "eta", c.distribution.eta);
    read(d, "d", c.distribution.d);
    read(d, "m", c.distribution.m);
    read(d, "eps", c.distribution.eps);
    read(d, "positives", c.distribution.positives);
    if (c.distribution.kind == DistributionKind::noisy_disjunction && !d.contains("d")) {
      c.distribution.d = c.distribution.a_star.size();
    }
  }
  if (j.contains("params")) {
    const auto& p = j.at("params");
    check_keys(p, {"eta_max", "eta_min", "alpha", "delta", "m", "k"}, "params");
    read(p, "eta_max", c.params.eta_max);
    read(p, "eta_min", c.params.eta_min);
    read(p, "alpha", c.params.alpha);
    read(p, "delta", c.params.delta);
    read(p, "m", c.params.m);
    read(p, "k", c.params.k);
  }
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  if (j.contains("sizes")) {
    const auto& s = j.at("sizes");
    if (s.is_string()) {
      try {
        c.sizes = SampleSizeConfig::from_name(s.get<std::string>());
      } catch (const std::invalid_argument& e) {
        config_error(e.what());
      }
    } else {
      check_keys(s, {"preset", "C", "c"}, "sizes");
      std::string preset = "custom";
      read(s, "preset", preset);
      if (preset != "custom") {
        try {
          c.sizes = SampleSizeConfig::from_name(preset);
        } catch (const std::invalid_argument& e) {
          config_error(e.what());
        }
      } else {
        c.sizes.preset = SizePreset::custom;
        read(s, "C", c.sizes.C);
        read(s, "c", c.sizes.c);
      }
      if (preset != "custom" && (s.contains("C") || s.contains("c"))) {
        const auto named = c.sizes;
        read(s, "C", c.sizes.C);
        read(s, "c", c.sizes.c);
        require(c.sizes.C == named.C && c.sizes.c == named.c,
                "sizes: C and c contradict the named preset");
      }
      require(c.sizes.C > 0.0 && c.sizes.c > 0.0, "sizes: C and c must be positive");
    }
  }
  read(j, "eval_size", c.eval_size);
  read(j, "with_replacement", c.with_replacement);
  if (j.contains("search")) {
    read(j, "search", name);
    bool found = false;
    for (const auto& [k, n] : kSearchNames) {
      if (name == n) {
        c.search = k;
        found = true;
      }
    }
    require(found, "unknown search mode '" + name + "'");
  }
  read(j, "eta_max_follows_eta", c.eta_max_follows_eta);
  read(j, "success_slack", c.success_slack);
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (!s.is_object()) config_error("sweep must be a JSON object");
    for (const auto& [key, values] : s.items()) {
      std::vector<double> vs;
      try {
        vs = values.get<std::vector<double>>();
      } catch (const json::exception&) {
        config_error("sweep '" + key + "' must be a list of numbers");
      }
      c.sweep[key] = std::move(vs);
    }
  }
  c.validate();
  return c;
}

}  // namespace detail

TrialRecord run_trial(const ExperimentConfig& c, std::size_t trial, std::uint64_t seed) {
  Rng rng(seed);
  const auto dist = make_distribution(c.distribution);
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = seed;
  const auto& p = c.params;
  DisjunctionSearchOptions search;
  search.mode = c.search;
  AnyHypothesis h;
  double eta_ref = c.distribution.eta;

  auto violate = [&](bool ok, const std::string& what) {
    if (!ok) rec.violations.push_back(what);
  };

  if (is_pool_algorithm(c.algorithm)) {
    const Pool pool = dist->draw(p.m, rng);
    AuditOracle oracle(pool);
    const std::uint64_t m = pool.size();
    if (c.algorithm == Algorithm::audit_realizable_disjunction) {
      const auto fit = audit_realizable_disjunction(oracle);
      h = fit;
      rec.pool_error = pool_error_of(pool, fit);
      const bool realizable = realizable_by_disjunction(pool);
      rec.success = !realizable || *rec.pool_error == 0.0;
      if (realizable) {
        violate(oracle.ledger().negative_queries <= pool.dim(), "more than d negative queries");
        violate(*rec.pool_error == 0.0, "non-zero pool error on a realizable pool");
      }
    } else {
      ThresholdHyp fit;
      if (c.algorithm == Algorithm::audit_realizable_threshold) {
        fit = audit_realizable_threshold(oracle);
      } else if (c.algorithm == Algorithm::audit_pool_k) {
        fit = audit_pool_thresholds_k(oracle, p.k);
      } else {
        fit = binary_search_active(oracle);
      }
      h = fit;
      const auto errors = count_errors(pool, fit).errors;
      const auto best = threshold_class_errors(pool);
      rec.pool_error = static_cast<double>(errors) / static_cast<double>(m);
      rec.success = errors == best;
      const auto& ledger = oracle.ledger();
      if (c.algorithm == Algorithm::audit_realizable_threshold && best == 0) {
        violate(ledger.negative_queries <= 1, "more than one negative query");
        violate(errors == 0, "non-zero pool error on a realizable pool");
      } else if (c.algorithm == Algorithm::audit_pool_k && best <= p.k) {
        violate(ledger.negative_queries <= p.k + 1, "more than k+1 negative queries");
        violate(errors == best, "pool error above the pool optimum");
      } else if (c.algorithm == Algorithm::binary_search) {
        violate(ledger.total_queries <= ceil_log2(m) + 1, "more than ceil(log2 m)+1 queries");
        if (best == 0) violate(errors == 0, "non-zero pool error on a realizable pool");
      }
    }
    rec.ledger = oracle.ledger();
  } else if (c.algorithm == Algorithm::audit_thresholds_agnostic) {
    ThresholdAuditParams ap;
    ap.eta_max = p.eta_max;
    ap.alpha = p.alpha;
    ap.delta = p.delta;
    ap.sizes = c.sizes;
    ap.with_replacement = c.with_replacement;
    const auto res = audit_thresholds_agnostic(*dist, ap, rng);
    h = res.hypothesis;
    rec.ledger = res.ledger;
    violate(res.scan_negative_queries <= res.scan_cap, "scan negatives above the stopping count");
    violate(res.ledger.negative_queries <= res.scan_cap + res.s2_size,
            "negative queries above the scan cap plus |S_2|");
  } else if (c.algorithm == Algorithm::audit_rectangles_agnostic) {
    RectangleAuditParams ap;
    ap.eta_min = p.eta_min;
    ap.alpha = p.alpha;
    ap.delta = p.delta;
    ap.sizes = c.sizes;
    ap.search = search;
    const auto res = audit_rectangles_agnostic(*dist, ap, rng);
    h = res.hypothesis;
    rec.ledger = res.ledger;
    for (const auto& round : res.rounds) {
      for (auto neg : round.direction_negatives) {
        violate(neg <= round.scan_cap + 1, "direction scan above its negative cap");
      }
    }
    eta_ref = std::max(eta_ref, p.eta_min);
  } else {
    const auto res = passive_erm(*dist, p.m, c.cls, rng, search);
    h = res.hypothesis;
    rec.ledger = res.ledger;
    violate(res.ledger.total_queries == p.m, "passive ERM did not label exactly n points");
  }

  const Pool eval = dist->draw(c.eval_size, rng);
  rec.heldout_error = predict_error(eval, h);
  rec.exact_error = exact_error_of(c.distribution, h);
  if (!is_pool_algorithm(c.algorithm)) {
    rec.success = rec.heldout_error <= (1.0 + p.alpha) * eta_ref + c.success_slack;
  }
  rec.hypothesis = hypothesis_json(h);
  return rec;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  const auto grid = expand_grid(config);
  for (const auto& point : grid) {
    PointReport pr;
    pr.point = point;
    pr.trials.resize(config.trials);
    report.points.push_back(std::move(pr));
  }

  const std::size_t tasks = grid.size() * config.trials;
  std::size_t workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(tasks, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      const std::size_t pi = t / config.trials;
      const std::size_t ti = t % config.trials;
      try {
        const auto start = std::chrono::steady_clock::now();
        auto rec = run_trial(grid[pi].config, ti, config.seed + ti);
        if (options.record_timing) {
          rec.runtime_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        }
        report.points[pi].trials[ti] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& pr : report.points) detail::aggregate(pr);
  if (options.record_timing) report.created_utc = detail::utc_timestamp();
  return report;
}

}  // namespace auditing
