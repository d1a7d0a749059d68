#pragma once

// Batch workflows behind the CLI: corpus evaluation and simplification.
// Cases run in parallel on a worker pool; results are collected by case id
// so output does not depend on the worker count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctgaze/io.hpp"
#include "ctgaze/multimatch.hpp"
#include "ctgaze/stats.hpp"
#include "ctgaze/strmetrics.hpp"

namespace ctgaze {

enum class Metric { scanmatch, sed, multimatch, cc, nss, kldiv };

std::set<Metric> all_metrics();
/// Parses "scanmatch,sed,mm,cc,nss,kldiv" (or "all").
std::set<Metric> parse_metrics(const std::string& list);

/// How the prediction's saliency volume S is formed for CC, NSS and KLDiv.
/// `fixation` uses the predicted fixation map itself (binary, already in
/// [0,1]), so evaluating a scanpath against itself scores CC 1 and KLDiv 0.
/// `rendered` blurs the predicted fixations with render_saliency.
enum class SaliencySource { fixation, rendered };

SaliencySource parse_saliency_source(const std::string& name);

struct EvalConfig {
  std::set<Metric> metrics = all_metrics();
  GridSpec grid{};
  double temporal_bin_ms = kDefaultTemporalBinMs;
  double gap_penalty = kDefaultGapPenalty;
  double sigma_xy_deg = 1.0;
  double sigma_z_slices = 1.0;
  SaliencySource saliency = SaliencySource::fixation;
  std::optional<double> ppd_override;
  int workers = 1;
  std::uint64_t seed = 0;
  int folds = 5;
  CiGrouping grouping = CiGrouping::folds;

  void validate() const;
};

struct CaseError {
  std::string case_id;
  std::string code;
  std::string message;
};

/// All selected metrics for one (ground truth, prediction) pair.
MetricReport evaluate_pair(const std::string& case_id, const Scanpath& gt, const Scanpath& pred,
                           const VolumeGeometry& g, const EvalConfig& cfg,
                           const SubstitutionMatrix& sub);

struct EvalResult {
  std::vector<MetricReport> reports;  // sorted by case id
  std::vector<CaseError> errors;      // sorted by case id
  std::map<std::string, int> fold_of;
  std::optional<AggregateSummary> summary;
};

/// Throws InvalidArgument on an empty manifest or an entry without pred_path.
EvalResult evaluate_manifest(const io::Manifest& manifest, const EvalConfig& cfg);

/// reports.jsonl, errors.jsonl, summary.json and summary.txt under `out_dir`.
void write_evaluation(const EvalResult& r, const std::filesystem::path& out_dir);

struct SimplifyOutcome {
  std::string case_id;
  std::size_t original_count = 0;
  std::size_t simplified_count = 0;
  double reduction_pct = 0.0;
  MultiMatchScores fidelity;  // MultiMatch(original, simplified)
};

struct SimplifyJob {
  std::string case_id;
  std::filesystem::path input;
};

struct SimplifyResult {
  std::vector<SimplifyOutcome> outcomes;
  std::vector<CaseError> errors;
};

SimplifyOutcome simplify_case(const std::string& case_id, const Scanpath& sp,
                              const VolumeGeometry& g, const SimplifyParams& p,
                              Scanpath* simplified_out = nullptr);

/// Writes each simplified scanpath to `out_dir/<input filename>` plus
/// fidelity.jsonl and fidelity_summary.json.
SimplifyResult simplify_files(const std::vector<SimplifyJob>& jobs,
                              const std::filesystem::path& out_dir, const SimplifyParams& p,
                              int workers);

std::string case_error_to_json_line(const CaseError& e);

}  // namespace ctgaze
