#include "geoctx/evalkit.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "geoctx/error.hpp"
#include "geoctx/georelate.hpp"
#include "geoctx/strutil.hpp"

namespace geoctx {

using json = nlohmann::json;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::map<std::string, std::size_t> bag(std::string_view s) {
  std::map<std::string, std::size_t> out;
  for (auto w : str::split_ws(s)) ++out[str::fold(w)];
  return out;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

SpatialAccuracy spatial_accuracy(const std::vector<GeoPoint>& preds, const std::vector<GeoPoint>& truths,
                                 double earth_radius_m) {
  if (preds.size() != truths.size()) {
    throw Error(ErrorCode::length_mismatch, fmt::format("{} predictions vs {} truths", preds.size(), truths.size()));
  }
  if (preds.empty()) throw Error(ErrorCode::empty_input, "spatial accuracy needs at least one case");
  std::vector<double> err;
  for (std::size_t i = 0; i < preds.size(); ++i) err.push_back(haversine(preds[i], truths[i], earth_radius_m));
  return {mean(err), median(err)};
}

double precision_at_k(const std::vector<std::vector<std::string>>& results,
                      const std::vector<std::vector<std::string>>& truth_sets, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::invalid_n, "k must be at least 1");
  if (results.size() != truth_sets.size()) {
    throw Error(ErrorCode::length_mismatch, fmt::format("{} result lists vs {} truth sets", results.size(), truth_sets.size()));
  }
  if (results.empty()) throw Error(ErrorCode::empty_input, "precision@k needs at least one case");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::set<std::string> truth(truth_sets[i].begin(), truth_sets[i].end());
    const auto top = std::min(k, results[i].size());
    hits += std::any_of(results[i].begin(), results[i].begin() + static_cast<std::ptrdiff_t>(top),
                        [&](const std::string& id) { return truth.contains(id); });
  }
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

double precision_at_k_radius(const std::vector<std::vector<GeoPoint>>& result_points,
                             const std::vector<GeoPoint>& truths, std::size_t k, double radius_m,
                             double earth_radius_m) {
  if (k == 0) throw Error(ErrorCode::invalid_n, "k must be at least 1");
  if (result_points.size() != truths.size()) {
    throw Error(ErrorCode::length_mismatch,
                fmt::format("{} result lists vs {} truths", result_points.size(), truths.size()));
  }
  if (truths.empty()) throw Error(ErrorCode::empty_input, "precision@k needs at least one case");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const auto top = std::min(k, result_points[i].size());
    hits += std::any_of(result_points[i].begin(), result_points[i].begin() + static_cast<std::ptrdiff_t>(top),
                        [&](const GeoPoint& p) { return haversine(p, truths[i], earth_radius_m) <= radius_m; });
  }
  return static_cast<double>(hits) / static_cast<double>(truths.size());
}

double contextual_relevance(std::string_view answer, std::string_view reference) {
  const auto a = bag(answer);
  const auto r = bag(reference);
  if (a.empty() && r.empty()) return 1.0;
  if (a.empty() || r.empty()) return 0.0;
  std::size_t na = 0, nr = 0, overlap = 0;
  for (const auto& [w, c] : a) {
    na += c;
    if (auto it = r.find(w); it != r.end()) overlap += std::min(c, it->second);
  }
  for (const auto& [w, c] : r) nr += c;
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(na);
  const double rec = static_cast<double>(overlap) / static_cast<double>(nr);
  return 2.0 * p * rec / (p + rec);
}

std::vector<EvalCase> parse_dataset(std::string_view text) {
  std::vector<EvalCase> out;
  std::size_t line_no = 0;
  for (auto line : str::split(text, '\n')) {
    ++line_no;
    if (str::trim(line).empty()) continue;
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::dataset_parse_error, fmt::format("dataset line {}: {}", line_no, why), std::nullopt,
                   line_no);
    };
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw fail("not a JSON object");
    EvalCase c;
    try {
      if (!j.contains("query") || !j["query"].is_string()) throw fail("missing string field \"query\"");
      c.query = j["query"].get<std::string>();
      const bool has_lat = j.contains("truth_lat"), has_lon = j.contains("truth_lon");
      if (has_lat != has_lon) throw fail("truth_lat and truth_lon go together");
      if (has_lat) c.truth_point = GeoPoint::make(j["truth_lat"].get<double>(), j["truth_lon"].get<double>());
      if (j.contains("truth_doc_ids")) c.truth_doc_ids = j["truth_doc_ids"].get<std::vector<std::string>>();
      if (j.contains("reference_answer")) c.reference_answer = j["reference_answer"].get<std::string>();
    } catch (const json::exception& e) {
      throw fail(e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::dataset_parse_error) throw;
      throw fail(e.what());
    }
    if (!c.truth_point && c.truth_doc_ids.empty() && !c.reference_answer) {
      throw fail("case needs truth_lat/truth_lon, truth_doc_ids or reference_answer");
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<EvalCase> load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open dataset '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str());
}

EvalReport run_eval(const std::vector<EvalCase>& cases, const Engine& engine, const EvalOptions& options) {
  if (options.k == 0) throw Error(ErrorCode::invalid_n, "k must be at least 1");
  if (cases.empty() && options.strict) throw Error(ErrorCode::dataset_parse_error, "dataset has no cases");
  EvalReport report;
  report.n_cases = cases.size();
  report.k = options.k;

  std::vector<double> errors, relevances;
  std::size_t hit_cases = 0, hits = 0;
  for (const auto& c : cases) {
    EvalRow row;
    row.query = c.query;
    const auto r = engine.query(c.query, options.k);
    row.response = r.response;
    std::vector<GeoPoint> points;
    for (const auto& p : r.context.passages) {
      row.retrieved.push_back(p.doc_id);
      if (auto rec = engine.store().get(p.doc_id); rec && rec->point) points.push_back(*rec->point);
    }
    if (c.truth_point && !points.empty()) {
      row.error_m = haversine(points.front(), *c.truth_point, engine.config().earth_radius_m);
      errors.push_back(*row.error_m);
    }
    if (options.radius_m && c.truth_point) {
      row.hit = precision_at_k_radius({points}, {*c.truth_point}, options.k, *options.radius_m,
                                      engine.config().earth_radius_m) == 1.0;
    } else if (!c.truth_doc_ids.empty()) {
      row.hit = precision_at_k({row.retrieved}, {c.truth_doc_ids}, options.k) == 1.0;
    }
    if (row.hit) {
      ++hit_cases;
      hits += *row.hit;
    }
    if (c.reference_answer) {
      row.relevance = contextual_relevance(r.response, *c.reference_answer);
      relevances.push_back(*row.relevance);
    }
    report.rows.push_back(std::move(row));
  }
  if (!errors.empty()) {
    report.spatial_accuracy_mean_m = mean(errors);
    report.spatial_accuracy_median_m = median(errors);
  }
  if (hit_cases) report.precision_at_k = static_cast<double>(hits) / static_cast<double>(hit_cases);
  if (!relevances.empty()) report.contextual_relevance_mean = mean(relevances);
  return report;
}

EvalReport run_eval(const std::string& dataset_path, const Engine& engine, const EvalOptions& options) {
  return run_eval(load_dataset(dataset_path), engine, options);
}

std::string EvalReport::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows) {
    json hit = r.hit ? json(*r.hit) : json(nullptr);
    rows_j.push_back({{"query", r.query},
                      {"retrieved", r.retrieved},
                      {"error_m", opt(r.error_m)},
                      {"hit", hit},
                      {"relevance", opt(r.relevance)},
                      {"response", r.response}});
  }
  json out = {{"n_cases", n_cases},
              {"k", k},
              {"spatial_accuracy_mean_m", opt(spatial_accuracy_mean_m)},
              {"spatial_accuracy_median_m", opt(spatial_accuracy_median_m)},
              {"precision_at_k", opt(precision_at_k)},
              {"contextual_relevance_mean", opt(contextual_relevance_mean)},
              {"rows", rows_j}};
  return out.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  auto num = [](const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string("n/a"); };
  std::string out;
  out += fmt::format("cases                      {}\n", n_cases);
  out += fmt::format("precision@{:<17}{}\n", k, num(precision_at_k));
  out += fmt::format("spatial error mean (m)     {}\n", num(spatial_accuracy_mean_m));
  out += fmt::format("spatial error median (m)   {}\n", num(spatial_accuracy_median_m));
  out += fmt::format("contextual relevance mean  {}\n", num(contextual_relevance_mean));
  out += "\n#    hit  error_m        relevance  query\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += fmt::format("{:<4} {:<4} {:<14} {:<10} {}\n", i + 1, r.hit ? (*r.hit ? "yes" : "no") : "-",
                       r.error_m ? fmt::format("{:.3f}", *r.error_m) : "-",
                       r.relevance ? fmt::format("{:.4f}", *r.relevance) : "-", r.query);
  }
  return out;
}

}  // namespace geoctx
