#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctgaze/multimatch.hpp"

namespace ctgaze {

/// Per-pair metric values; absent entries were not requested or failed.
struct MetricReport {
  std::string case_id;
  std::optional<double> scanmatch_nodur;
  std::optional<double> scanmatch_dur;
  std::optional<MultiMatchScores> mm;
  std::optional<double> sed;
  std::optional<double> cc;
  std::optional<double> nss;
  std::optional<double> kldiv;

  /// Flattened (name, value) pairs in a fixed metric order.
  std::vector<std::pair<std::string, double>> values() const;
};

/// Fixed metric names in report and table order.
const std::vector<std::string>& metric_names();

struct Aggregate {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;         // sample standard deviation (n - 1)
  double ci95 = 0.0;        // half-width: t_{0.975, n-1} * std / sqrt(n)
  bool has_ci = false;      // false when n < 2
};

/// Two-sided 97.5% Student-t quantile. Tabulated for df <= 30 (standard
/// statistical tables, rounded to 6 digits); larger df use boost.math.
double t_quantile_975(std::size_t df);

Aggregate aggregate(std::span<const double> values);

/// Shuffled partition into k folds whose sizes differ by at most one; the
/// first n mod k folds get the extra element.
std::vector<std::vector<std::string>> kfold(const std::vector<std::string>& ids, int k,
                                            std::uint64_t seed);

enum class CiGrouping { folds, cases };

struct AggregateSummary {
  CiGrouping grouping = CiGrouping::folds;
  std::size_t cases = 0;
  std::map<std::string, Aggregate> metrics;
};

/// Over `cases`: one sample per report. Over `folds`: one sample per fold
/// mean, with `fold_of` mapping case ids to fold indices.
AggregateSummary summarize_reports(const std::vector<MetricReport>& reports, CiGrouping grouping,
                                   const std::map<std::string, int>& fold_of = {});

std::string report_to_json_line(const MetricReport& r);
MetricReport report_from_json_line(const std::string& line);
std::string summary_to_json(const AggregateSummary& s);
/// Aligned metric x (mean, +-ci95, n) table.
std::string summary_to_table(const AggregateSummary& s);

}  // namespace ctgaze
