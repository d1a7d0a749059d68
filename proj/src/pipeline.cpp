#include "ctgaze/pipeline.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

#include "ctgaze/error.hpp"
#include "ctgaze/saliency.hpp"
#include "json.hpp"

namespace ctgaze {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

using GeometryKey = std::tuple<int, int, int, double>;

GeometryKey key_of(const VolumeGeometry& g) {
  return {g.width(), g.height(), g.depth(), g.pixels_per_degree()};
}

CaseError to_case_error(const std::string& id, const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return {id, std::string(to_string(err->code())), err->what()};
  }
  return {id, "Exception", e.what()};
}

template <typename T>
void sort_by_case(std::vector<T>& v) {
  std::sort(v.begin(), v.end(), [](const T& a, const T& b) { return a.case_id < b.case_id; });
}

}  // namespace

std::set<Metric> all_metrics() {
  return {Metric::scanmatch, Metric::sed, Metric::multimatch, Metric::cc, Metric::nss, Metric::kldiv};
}

std::set<Metric> parse_metrics(const std::string& list) {
  std::set<Metric> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    item = first == std::string::npos ? "" : item.substr(first, item.find_last_not_of(" \t") - first + 1);
    if (item == "all") {
      out = all_metrics();
    } else if (item == "scanmatch" || item == "sm") {
      out.insert(Metric::scanmatch);
    } else if (item == "sed") {
      out.insert(Metric::sed);
    } else if (item == "mm" || item == "multimatch") {
      out.insert(Metric::multimatch);
    } else if (item == "cc") {
      out.insert(Metric::cc);
    } else if (item == "nss") {
      out.insert(Metric::nss);
    } else if (item == "kldiv") {
      out.insert(Metric::kldiv);
    } else if (!item.empty()) {
      throw Error(ErrorCode::InvalidArgument, "unknown metric '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no metrics selected");
  return out;
}

SaliencySource parse_saliency_source(const std::string& name) {
  if (name == "fixation") return SaliencySource::fixation;
  if (name == "rendered") return SaliencySource::rendered;
  throw Error(ErrorCode::InvalidArgument, "saliency source must be fixation or rendered, got '" + name + "'");
}

void EvalConfig::validate() const {
  if (metrics.empty()) throw Error(ErrorCode::InvalidArgument, "no metrics selected");
  GridSpec(grid.nx, grid.ny, grid.nz);
  if (!(temporal_bin_ms > 0.0)) throw Error(ErrorCode::InvalidArgument, "temporal bin must be > 0");
  if (!std::isfinite(gap_penalty)) throw Error(ErrorCode::InvalidArgument, "gap penalty must be finite");
  if (!(sigma_xy_deg > 0.0)) throw Error(ErrorCode::InvalidSigma, "sigma must be > 0 degrees");
  if (!(sigma_z_slices >= 0.0)) throw Error(ErrorCode::InvalidSigma, "sigma_z must be >= 0");
  if (ppd_override && !(*ppd_override > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "pixels per degree must be > 0");
  }
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  if (folds < 2) throw Error(ErrorCode::BadK, "folds must be >= 2");
}

MetricReport evaluate_pair(const std::string& case_id, const Scanpath& gt, const Scanpath& pred,
                           const VolumeGeometry& g, const EvalConfig& cfg,
                           const SubstitutionMatrix& sub) {
  MetricReport r;
  r.case_id = case_id;
  const auto& m = cfg.metrics;
  if (m.count(Metric::scanmatch)) {
    ScanMatchParams p{false, cfg.temporal_bin_ms, cfg.gap_penalty};
    r.scanmatch_nodur = scanmatch(pred, gt, g, sub, p);
    p.with_duration = true;
    r.scanmatch_dur = scanmatch(pred, gt, g, sub, p);
  }
  if (m.count(Metric::sed)) r.sed = static_cast<double>(sed(pred, gt, g, sub.grid()));
  if (m.count(Metric::multimatch)) r.mm = mm_scores(pred, gt, g);
  if (m.count(Metric::cc) || m.count(Metric::nss) || m.count(Metric::kldiv)) {
    // Inside the case-level worker pool these kernels run single-threaded.
    const FixationVolume f = fixation_volume(gt, g);
    ScalarVolume s(dims_of(g));
    if (cfg.saliency == SaliencySource::rendered) {
      s = render_saliency(pred, g, cfg.sigma_xy_deg, cfg.sigma_z_slices);
    } else {
      const FixationVolume fp = fixation_volume(pred, g);
      std::copy(fp.values().begin(), fp.values().end(), s.values().begin());
    }
    if (m.count(Metric::cc)) r.cc = cc(s, f);
    if (m.count(Metric::nss)) r.nss = nss(s, f, gt.size());
    if (m.count(Metric::kldiv)) r.kldiv = kldiv(s, f);
  }
  return r;
}

EvalResult evaluate_manifest(const io::Manifest& manifest, const EvalConfig& cfg) {
  cfg.validate();
  if (manifest.entries.empty()) throw Error(ErrorCode::InvalidArgument, "no cases in manifest");
  std::vector<const io::ManifestEntry*> entries;
  for (const auto& e : manifest.entries) {
    if (!e.pred_path) {
      throw Error(ErrorCode::InvalidArgument, "case '" + e.case_id + "' has no pred_path");
    }
    entries.push_back(&e);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto* a, const auto* b) { return a->case_id < b->case_id; });

  auto geometry_for = [&](const io::ManifestEntry& e) {
    if (!cfg.ppd_override) return e.geometry;
    return VolumeGeometry(e.geometry.width(), e.geometry.height(), e.geometry.depth(),
                          *cfg.ppd_override);
  };
  std::map<GeometryKey, SubstitutionMatrix> subs;
  if (cfg.metrics.count(Metric::scanmatch) || cfg.metrics.count(Metric::sed)) {
    for (const auto* e : entries) {
      const VolumeGeometry g = geometry_for(*e);
      if (!subs.count(key_of(g))) subs.emplace(key_of(g), substitution_matrix(g, cfg.grid));
    }
  }
  const SubstitutionMatrix unused(GridSpec(1, 1, 1), {0.0}, 0.0);

  const auto n = static_cast<long long>(entries.size());
  std::vector<std::optional<MetricReport>> reports(entries.size());
  std::vector<std::optional<CaseError>> errors(entries.size());
#pragma omp parallel for num_threads(cfg.workers) schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    const auto& e = *entries[static_cast<std::size_t>(i)];
    try {
      const VolumeGeometry g = geometry_for(e);
      const auto gt = io::read_scanpath(e.gt_path);
      const auto pred = io::read_scanpath(*e.pred_path);
      auto it = subs.find(key_of(g));
      const SubstitutionMatrix& sub = it != subs.end() ? it->second : unused;
      reports[static_cast<std::size_t>(i)] =
          evaluate_pair(e.case_id, gt.scanpath, pred.scanpath, g, cfg, sub);
    } catch (const std::exception& ex) {
      errors[static_cast<std::size_t>(i)] = to_case_error(e.case_id, ex);
    }
  }

  EvalResult result;
  for (auto& r : reports) {
    if (r) result.reports.push_back(std::move(*r));
  }
  for (auto& err : errors) {
    if (err) result.errors.push_back(std::move(*err));
  }
  if (result.reports.empty()) return result;

  bool manifest_folds = true;
  for (const auto& r : result.reports) {
    if (!manifest.fold.count(r.case_id)) manifest_folds = false;
  }
  if (manifest_folds) {
    for (const auto& r : result.reports) result.fold_of[r.case_id] = manifest.fold.at(r.case_id);
  } else if (result.reports.size() >= static_cast<std::size_t>(cfg.folds)) {
    std::vector<std::string> ids;
    for (const auto& r : result.reports) ids.push_back(r.case_id);
    const auto folds = kfold(ids, cfg.folds, cfg.seed);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      for (const auto& id : folds[f]) result.fold_of[id] = static_cast<int>(f);
    }
  }
  CiGrouping grouping = cfg.grouping;
  if (grouping == CiGrouping::folds && result.fold_of.empty()) grouping = CiGrouping::cases;
  result.summary = summarize_reports(result.reports, grouping, result.fold_of);
  return result;
}

std::string case_error_to_json_line(const CaseError& e) {
  ojson j;
  j["case_id"] = e.case_id;
  j["code"] = e.code;
  j["message"] = e.message;
  return j.dump();
}

void write_evaluation(const EvalResult& r, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::string reports, errors;
  for (const auto& rep : r.reports) reports += report_to_json_line(rep) + "\n";
  for (const auto& err : r.errors) errors += case_error_to_json_line(err) + "\n";
  io::write_text(out_dir / "reports.jsonl", reports);
  io::write_text(out_dir / "errors.jsonl", errors);
  if (r.summary) {
    io::write_text(out_dir / "summary.json", summary_to_json(*r.summary));
    io::write_text(out_dir / "summary.txt", summary_to_table(*r.summary));
  }
}

SimplifyOutcome simplify_case(const std::string& case_id, const Scanpath& sp,
                              const VolumeGeometry& g, const SimplifyParams& p,
                              Scanpath* simplified_out) {
  Scanpath s = simplify(sp, g, p);
  SimplifyOutcome o;
  o.case_id = case_id;
  o.original_count = sp.size();
  o.simplified_count = s.size();
  o.reduction_pct = 100.0 * static_cast<double>(sp.size() - s.size()) / static_cast<double>(sp.size());
  o.fidelity = mm_scores(sp, s, g);
  if (simplified_out) *simplified_out = std::move(s);
  return o;
}

SimplifyResult simplify_files(const std::vector<SimplifyJob>& jobs, const fs::path& out_dir,
                              const SimplifyParams& p, int workers) {
  p.validate();
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  if (jobs.empty()) throw Error(ErrorCode::InvalidArgument, "no cases to simplify");
  fs::create_directories(out_dir);
  const auto n = static_cast<long long>(jobs.size());
  std::vector<std::optional<SimplifyOutcome>> outcomes(jobs.size());
  std::vector<std::optional<CaseError>> errors(jobs.size());
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    try {
      const auto rec = io::read_scanpath(job.input);
      Scanpath simplified = rec.scanpath;
      outcomes[static_cast<std::size_t>(i)] =
          simplify_case(job.case_id, rec.scanpath, rec.geometry, p, &simplified);
      io::write_scanpath(out_dir / job.input.filename(), simplified, rec.geometry);
    } catch (const std::exception& ex) {
      errors[static_cast<std::size_t>(i)] = to_case_error(job.case_id, ex);
    }
  }
  SimplifyResult result;
  for (auto& o : outcomes) {
    if (o) result.outcomes.push_back(std::move(*o));
  }
  for (auto& e : errors) {
    if (e) result.errors.push_back(std::move(*e));
  }
  sort_by_case(result.outcomes);
  sort_by_case(result.errors);

  std::string lines, err_lines;
  std::size_t before = 0, after = 0;
  MultiMatchScores mean{};
  double mean_reduction = 0.0;
  for (const auto& o : result.outcomes) {
    ojson j;
    j["case_id"] = o.case_id;
    j["original"] = o.original_count;
    j["simplified"] = o.simplified_count;
    j["reduction_pct"] = o.reduction_pct;
    j["mm"] = {{"vector", o.fidelity.vector},
               {"direction", o.fidelity.direction},
               {"length", o.fidelity.length},
               {"position", o.fidelity.position},
               {"shape_average", o.fidelity.shape_average()}};
    lines += j.dump() + "\n";
    before += o.original_count;
    after += o.simplified_count;
    mean.vector += o.fidelity.vector;
    mean.direction += o.fidelity.direction;
    mean.length += o.fidelity.length;
    mean.position += o.fidelity.position;
    mean_reduction += o.reduction_pct;
  }
  for (const auto& e : result.errors) err_lines += case_error_to_json_line(e) + "\n";
  const double k = std::max<std::size_t>(result.outcomes.size(), 1);
  mean.vector /= k;
  mean.direction /= k;
  mean.length /= k;
  mean.position /= k;
  ojson summary;
  summary["cases"] = result.outcomes.size();
  summary["errors"] = result.errors.size();
  summary["fixations_original"] = before;
  summary["fixations_simplified"] = after;
  summary["total_reduction_pct"] =
      before ? 100.0 * static_cast<double>(before - after) / static_cast<double>(before) : 0.0;
  summary["mean_case_reduction_pct"] = mean_reduction / k;
  summary["mm"] = {{"vector", mean.vector},
                   {"direction", mean.direction},
                   {"length", mean.length},
                   {"position", mean.position},
                   {"shape_average", mean.shape_average()}};
  io::write_text(out_dir / "fidelity.jsonl", lines);
  io::write_text(out_dir / "fidelity_errors.jsonl", err_lines);
  io::write_text(out_dir / "fidelity_summary.json", summary.dump(2) + "\n");
  return result;
}

}  // namespace ctgaze
