#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geoctx/geomodel.hpp"
#include "geoctx/ragctx.hpp"

namespace geoctx {

struct SpatialAccuracy {
  double mean_m = 0.0;
  double median_m = 0.0;
};

/// Haversine error statistics. Throws Error{length_mismatch}, Error{empty_input}.
SpatialAccuracy spatial_accuracy(const std::vector<GeoPoint>& preds, const std::vector<GeoPoint>& truths,
                                 double earth_radius_m = 6371008.8);

/// Fraction of cases whose top-k ids meet the truth set. Throws
/// Error{empty_input}, Error{length_mismatch}, Error{invalid_n} for k = 0.
double precision_at_k(const std::vector<std::vector<std::string>>& results,
                      const std::vector<std::vector<std::string>>& truth_sets, std::size_t k);

/// Radius variant: a case hits when any of its top-k points lies within
/// `radius_m` of the truth point.
double precision_at_k_radius(const std::vector<std::vector<GeoPoint>>& result_points,
                             const std::vector<GeoPoint>& truths, std::size_t k, double radius_m,
                             double earth_radius_m = 6371008.8);

/// Bag-of-words F1 over whitespace-split, casefolded tokens. Two empty
/// strings score 1, one empty string scores 0.
double contextual_relevance(std::string_view answer, std::string_view reference);

struct EvalCase {
  std::string query;
  std::optional<GeoPoint> truth_point;
  std::vector<std::string> truth_doc_ids;
  std::optional<std::string> reference_answer;
};

/// JSON lines, blank lines skipped. Throws Error{dataset_parse_error} with the line.
std::vector<EvalCase> parse_dataset(std::string_view text);
std::vector<EvalCase> load_dataset(const std::string& path);

struct EvalRow {
  std::string query;
  std::vector<std::string> retrieved;
  std::optional<double> error_m;     // when the case has a truth point and a prediction
  std::optional<bool> hit;           // top-k meets truth_doc_ids
  std::optional<double> relevance;   // against reference_answer
  std::string response;
};

struct EvalReport {
  std::size_t n_cases = 0;
  std::size_t k = 1;
  std::optional<double> spatial_accuracy_mean_m;
  std::optional<double> spatial_accuracy_median_m;
  std::optional<double> precision_at_k;
  std::optional<double> contextual_relevance_mean;
  std::vector<EvalRow> rows;

  std::string to_json() const;
  std::string to_table() const;
};

struct EvalOptions {
  std::size_t k = 1;
  bool strict = false;  // an empty dataset is an error instead of a zero-case report
  std::optional<double> radius_m;  // radius variant of precision@k
};

/// Runs each case through the engine and aggregates. The predicted point of a
/// case is the point of its top retrieved record.
EvalReport run_eval(const std::vector<EvalCase>& cases, const Engine& engine, const EvalOptions& options = {});
EvalReport run_eval(const std::string& dataset_path, const Engine& engine, const EvalOptions& options = {});

}  // namespace geoctx
