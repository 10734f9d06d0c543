#include <algorithm>
#include <cmath>
#include <ctime>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "auditing/experiment.hpp"
#include "auditing/pool_io.hpp"
#include "json_util.hpp"

namespace auditing {

using nlohmann::json;
using nlohmann::ordered_json;

Summary summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.median = quantile(0.5);
  s.q10 = quantile(0.1);
  s.q90 = quantile(0.9);
  s.min = values.front();
  s.max = values.back();
  return s;
}

std::size_t ExperimentReport::violations() const {
  std::size_t n = 0;
  for (const auto& p : points) n += p.violations;
  return n;
}

namespace detail {

void aggregate(PointReport& point) {
  std::vector<double> neg;
  std::vector<double> total;
  std::vector<double> err;
  std::size_t successes = 0;
  point.violations = 0;
  for (const auto& t : point.trials) {
    neg.push_back(static_cast<double>(t.ledger.negative_queries));
    total.push_back(static_cast<double>(t.ledger.total_queries));
    err.push_back(t.heldout_error);
    successes += t.success ? 1 : 0;
    point.violations += t.violations.size();
  }
  point.negative_queries = summarize(neg);
  point.total_queries = summarize(total);
  point.heldout_error = summarize(err);
  point.success_fraction =
      point.trials.empty()
          ? 0.0
          : static_cast<double>(successes) / static_cast<double>(point.trials.size());
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

namespace {

ordered_json summary_json(const Summary& s) {
  ordered_json j;
  j["mean"] = s.mean;
  j["median"] = s.median;
  j["q10"] = s.q10;
  j["q90"] = s.q90;
  j["min"] = s.min;
  j["max"] = s.max;
  return j;
}

ordered_json values_json(const std::map<std::string, double>& values) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : values) j[k] = v;
  return j;
}

ordered_json trial_json(const TrialRecord& t) {
  ordered_json j;
  j["trial"] = t.trial;
  j["seed"] = t.seed;
  j["ledger"] = {{"negative_queries", t.ledger.negative_queries},
                 {"total_queries", t.ledger.total_queries}};
  j["heldout_error"] = t.heldout_error;
  if (t.exact_error) j["exact_error"] = *t.exact_error;
  if (t.pool_error) j["pool_error"] = *t.pool_error;
  j["success"] = t.success;
  j["violations"] = t.violations;
  j["hypothesis"] = ordered_json::parse(t.hypothesis);
  if (t.runtime_ms) j["runtime_ms"] = *t.runtime_ms;
  return j;
}

TrialRecord trial_from_json(const ordered_json& j) {
  TrialRecord t;
  t.trial = j.at("trial").get<std::size_t>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.ledger.negative_queries = j.at("ledger").at("negative_queries").get<std::uint64_t>();
  t.ledger.total_queries = j.at("ledger").at("total_queries").get<std::uint64_t>();
  t.heldout_error = j.at("heldout_error").get<double>();
  if (j.contains("exact_error")) t.exact_error = j.at("exact_error").get<double>();
  if (j.contains("pool_error")) t.pool_error = j.at("pool_error").get<double>();
  t.success = j.at("success").get<bool>();
  t.violations = j.at("violations").get<std::vector<std::string>>();
  t.hypothesis = j.at("hypothesis").dump();
  if (j.contains("runtime_ms")) t.runtime_ms = j.at("runtime_ms").get<double>();
  return t;
}

std::string csv_number(double v) { return format_double(v); }

void write_summary_cells(std::ostringstream& out, const PointReport& p) {
  for (const Summary* s : {&p.negative_queries, &p.total_queries, &p.heldout_error}) {
    out << ',' << csv_number(s->mean) << ',' << csv_number(s->median) << ','
        << csv_number(s->q10) << ',' << csv_number(s->q90);
  }
  out << ',' << csv_number(p.success_fraction) << ',' << p.violations;
}

const char* kSummaryHeader =
    "neg_mean,neg_median,neg_q10,neg_q90,total_mean,total_median,total_q10,total_q90,"
    "err_mean,err_median,err_q10,err_q90,success_fraction,violations";

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  ordered_json j;
  j["schema_version"] = ExperimentReport::kSchemaVersion;
  j["config"] = detail::config_json(report.config);
  if (report.created_utc) j["created_utc"] = *report.created_utc;
  ordered_json points = ordered_json::array();
  for (const auto& p : report.points) {
    ordered_json pj;
    pj["values"] = values_json(p.point.values);
    ordered_json summary;
    summary["negative_queries"] = summary_json(p.negative_queries);
    summary["total_queries"] = summary_json(p.total_queries);
    summary["heldout_error"] = summary_json(p.heldout_error);
    summary["success_fraction"] = p.success_fraction;
    summary["violations"] = p.violations;
    pj["summary"] = summary;
    ordered_json trials = ordered_json::array();
    for (const auto& t : p.trials) trials.push_back(trial_json(t));
    pj["trials"] = trials;
    points.push_back(pj);
  }
  j["points"] = points;
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(std::string_view text) {
  // Ordered so that embedded hypotheses keep their key order on rewrite.
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != ExperimentReport::kSchemaVersion) {
      throw ConfigError("unsupported report schema version");
    }
    ExperimentReport report;
    report.config = detail::config_from_json_value(json::parse(j.at("config").dump()));
    if (j.contains("created_utc")) report.created_utc = j.at("created_utc").get<std::string>();
    const auto grid = expand_grid(report.config);
    const auto& points = j.at("points");
    if (points.size() != grid.size()) throw ConfigError("report points do not match its grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      PointReport pr;
      pr.point = grid[i];
      const auto values = points[i].at("values").get<std::map<std::string, double>>();
      if (values != grid[i].values) throw ConfigError("report point values do not match its grid");
      for (const auto& t : points[i].at("trials")) pr.trials.push_back(trial_from_json(t));
      detail::aggregate(pr);
      report.points.push_back(std::move(pr));
    }
    return report;
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "algorithm,class,distribution";
  for (const auto& [key, values] : report.config.sweep) {
    (void)values;
    out << ',' << key;
  }
  out << ",trials," << kSummaryHeader << '\n';
  for (const auto& p : report.points) {
    out << to_string(report.config.algorithm) << ',' << to_string(report.config.cls) << ','
        << to_string(report.config.distribution.kind);
    for (const auto& [key, v] : p.point.values) {
      (void)key;
      out << ',' << csv_number(v);
    }
    out << ',' << p.trials.size();
    write_summary_cells(out, p);
    out << '\n';
  }
  return out.str();
}

std::string compare_reports(const std::vector<ExperimentReport>& reports) {
  if (reports.size() < 2) throw ConfigError("compare needs at least two reports");
  const auto kind = reports.front().config.distribution.kind;
  for (const auto& r : reports) {
    if (r.config.distribution.kind != kind) {
      throw ConfigError("compare needs reports sharing a distribution family");
    }
  }
  // Grid points present in every report, in the first report's order.
  std::vector<std::map<std::string, double>> common;
  for (const auto& p : reports.front().points) {
    const bool everywhere = std::all_of(reports.begin() + 1, reports.end(), [&](const auto& r) {
      return std::any_of(r.points.begin(), r.points.end(),
                         [&](const auto& q) { return q.point.values == p.point.values; });
    });
    if (everywhere) common.push_back(p.point.values);
  }
  if (common.empty()) throw ConfigError("the reports share no parameter point");

  std::ostringstream out;
  out << "algorithm,class,distribution";
  for (const auto& [key, v] : common.front()) {
    (void)v;
    out << ',' << key;
  }
  out << ",trials," << kSummaryHeader << '\n';
  for (const auto& values : common) {
    for (const auto& r : reports) {
      const auto it = std::find_if(r.points.begin(), r.points.end(),
                                   [&](const auto& q) { return q.point.values == values; });
      out << to_string(r.config.algorithm) << ',' << to_string(r.config.cls) << ','
          << to_string(r.config.distribution.kind);
      for (const auto& [key, v] : values) {
        (void)key;
        out << ',' << csv_number(v);
      }
      out << ',' << it->trials.size();
      write_summary_cells(out, *it);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace auditing
