// Batch front-end: evaluate, simplify, synth, heatmap, split, posenc, stats.
//
// Exit codes: 0 success, 1 some cases failed (see the error ledger in the
// output directory), 2 configuration or usage error.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <omp.h>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "ctgaze/error.hpp"
#include "ctgaze/io.hpp"
#include "ctgaze/pipeline.hpp"
#include "ctgaze/posenc.hpp"
#include "ctgaze/saliency.hpp"
#include "ctgaze/stats.hpp"
#include "ctgaze/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ctgaze;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

/// Thrown for invalid configuration detected before any work starts.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

template <std::size_t N>
std::array<double, N> parse_reals(const std::string& s, const std::string& flag) {
  const auto parts = split_csv(s);
  if (parts.size() != N) throw ConfigError(flag + " expects " + std::to_string(N) + " comma-separated values");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    try {
      std::size_t used = 0;
      out[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::logic_error&) {
      throw ConfigError(flag + ": '" + parts[i] + "' is not a number");
    }
  }
  return out;
}

std::array<int, 3> parse_triple(const std::string& s, const std::string& flag) {
  const auto r = parse_reals<3>(s, flag);
  std::array<int, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (r[i] != std::floor(r[i]) || r[i] < 1 || r[i] > 1e9) {
      throw ConfigError(flag + " expects three positive integers");
    }
    out[i] = static_cast<int>(r[i]);
  }
  return out;
}

CiGrouping parse_grouping(const std::string& s) {
  if (s == "folds") return CiGrouping::folds;
  if (s == "cases") return CiGrouping::cases;
  throw ConfigError("--ci-over must be folds or cases");
}

/// Every long flag can also be set through CTGAZE_<FLAG_NAME>.
void add_env_overrides(CLI::App& app) {
  for (CLI::App* sub : app.get_subcommands({})) {
    for (CLI::Option* opt : sub->get_options({})) {
      std::string name = opt->get_single_name();
      if (opt->get_positional() || name.empty() || name == "help") continue;
      std::string env = "CTGAZE_";
      for (char c : name) env += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      opt->envname(env);
    }
  }
}

std::string json_lines(const std::vector<CaseError>& errors) {
  std::string out;
  for (const auto& e : errors) out += case_error_to_json_line(e) + "\n";
  return out;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string manifest;
  std::string out;
  std::string metrics = "all";
  std::string grid = "8,8,4";
  double temporal_bin_ms = kDefaultTemporalBinMs;
  double gap_penalty = kDefaultGapPenalty;
  double sigma_deg = kDefaultSigmaXyDeg;
  double sigma_z = kDefaultSigmaZSlices;
  std::string saliency = "fixation";
  std::optional<double> ppd;
  std::uint64_t seed = 0;
  int workers = 1;
  int folds = 5;
  std::string ci_over = "folds";
};

int run_evaluate(const EvaluateOptions& o) {
  EvalConfig cfg;
  try {
    cfg.metrics = parse_metrics(o.metrics);
    const auto g = parse_triple(o.grid, "--grid");
    cfg.grid = GridSpec(g[0], g[1], g[2]);
    cfg.temporal_bin_ms = o.temporal_bin_ms;
    cfg.gap_penalty = o.gap_penalty;
    cfg.sigma_xy_deg = o.sigma_deg;
    cfg.sigma_z_slices = o.sigma_z;
    cfg.saliency = parse_saliency_source(o.saliency);
    cfg.ppd_override = o.ppd;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.folds = o.folds;
    cfg.grouping = parse_grouping(o.ci_over);
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  io::Manifest manifest;
  try {
    manifest = io::read_manifest(o.manifest);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (manifest.entries.empty()) throw ConfigError("no cases in manifest " + o.manifest);
  for (const auto& e : manifest.entries) {
    if (!e.pred_path) throw ConfigError("case '" + e.case_id + "' has no pred_path");
  }

  const EvalResult r = evaluate_manifest(manifest, cfg);
  write_evaluation(r, o.out);
  if (r.summary) std::cout << summary_to_table(*r.summary);
  std::cout << r.reports.size() << " evaluated, " << r.errors.size() << " failed; results in "
            << o.out << "\n";
  for (const auto& e : r.errors) std::cerr << "error: " << e.case_id << ": " << e.message << "\n";
  return r.errors.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- simplify

struct SimplifyOptions {
  std::string manifest;
  std::vector<std::string> inputs;
  std::string out;
  double angle_thresh = 45.0;
  double amp_thresh = 0.10;
  std::optional<double> duration_ceiling;
  int workers = 1;
};

int run_simplify(const SimplifyOptions& o) {
  SimplifyParams p;
  p.angle_threshold_deg = o.angle_thresh;
  p.amplitude_threshold_fraction = o.amp_thresh;
  p.duration_ceiling_ms = o.duration_ceiling;
  std::vector<SimplifyJob> jobs;
  try {
    p.validate();
    if (o.workers < 1) throw ConfigError("--workers must be >= 1");
    if (!o.manifest.empty()) {
      for (const auto& e : io::read_manifest(o.manifest).entries) jobs.push_back({e.case_id, e.gt_path});
    }
    for (const auto& in : o.inputs) jobs.push_back({fs::path(in).stem().string(), in});
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (jobs.empty()) throw ConfigError("no cases to simplify (give --manifest or input files)");
  std::set<std::string> names;
  for (const auto& j : jobs) {
    if (!names.insert(j.input.filename().string()).second) {
      throw ConfigError("two inputs share the file name " + j.input.filename().string());
    }
  }

  const auto r = simplify_files(jobs, o.out, p, o.workers);
  std::cout << r.outcomes.size() << " simplified, " << r.errors.size() << " failed; results in "
            << o.out << "\n";
  for (const auto& e : r.errors) std::cerr << "error: " << e.case_id << ": " << e.message << "\n";
  return r.errors.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::vector<std::string> inputs;
  std::string out;
  std::string geometry;
  double ppd = 1.0;
  double sigma_deg = 1.0;
  int epochs = 0;
  std::uint64_t seed = 0;
};

int run_synth(const SynthOptions& o) {
  const auto dims = parse_triple(o.geometry, "--geometry");
  std::optional<VolumeGeometry> g;
  try {
    g.emplace(dims[0], dims[1], dims[2], o.ppd);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(o.sigma_deg >= 0.0)) throw ConfigError("--sigma-deg must be >= 0");
  if (o.epochs < 0) throw ConfigError("--epochs must be >= 0");

  std::vector<CaseError> errors;
  std::size_t written = 0;
  for (const auto& in : o.inputs) {
    const std::string stem = fs::path(in).stem().string();
    try {
      const auto rec = io::read_scanpath2d(in);
      const Scanpath lifted = lift_2d_to_3d(rec.id, rec.fixations);
      io::write_scanpath(fs::path(o.out) / (stem + ".json"), lifted, *g);
      ++written;
      for (int epoch = 0; epoch < o.epochs; ++epoch) {
        const JitterParams jp{o.sigma_deg, o.ppd,
                              jitter_seed(o.seed, rec.id, static_cast<std::uint64_t>(epoch))};
        io::write_scanpath(fs::path(o.out) / (stem + "_e" + std::to_string(epoch) + ".json"),
                           jitter(lifted, *g, jp), *g);
      }
    } catch (const std::exception& e) {
      const auto* err = dynamic_cast<const Error*>(&e);
      errors.push_back({stem, err ? std::string(to_string(err->code())) : "Exception", e.what()});
      std::cerr << "error: " << in << ": " << e.what() << "\n";
    }
  }
  if (!errors.empty()) io::write_text(fs::path(o.out) / "errors.jsonl", json_lines(errors));
  std::cout << written << " lifted, " << errors.size() << " failed; results in " << o.out << "\n";
  return errors.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- heatmap

struct HeatmapOptions {
  std::string input;
  std::string out;
  double sigma_deg = kDefaultSigmaXyDeg;
  double sigma_z = kDefaultSigmaZSlices;
  std::optional<double> ppd;
  bool fixations_only = false;
  int workers = 1;
};

int run_heatmap(const HeatmapOptions& o) {
  if (o.workers < 1) throw ConfigError("--workers must be >= 1");
  if (!(o.sigma_deg > 0.0) || !(o.sigma_z >= 0.0)) throw ConfigError("sigmas must be positive");
  if (o.ppd && !(*o.ppd > 0.0)) throw ConfigError("--ppd must be > 0");
  const auto rec = io::read_scanpath(o.input);
  const VolumeGeometry g = o.ppd ? VolumeGeometry(rec.geometry.width(), rec.geometry.height(),
                                                  rec.geometry.depth(), *o.ppd)
                                 : rec.geometry;
  ScalarVolume v(dims_of(g));
  if (o.fixations_only) {
    const auto f = fixation_volume(rec.scanpath, g);
    std::copy(f.values().begin(), f.values().end(), v.values().begin());
  } else {
    const Exec exec = o.workers > 1 ? Exec::parallel : Exec::serial;
    omp_set_num_threads(o.workers);
    v = render_saliency(rec.scanpath, g, o.sigma_deg, o.sigma_z, exec);
  }
  io::write_volume(v, o.out);
  std::cout << "wrote " << o.out << " (" << g.width() << "x" << g.height() << "x" << g.depth()
            << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- split

struct SplitOptions {
  std::string manifest;
  std::string ids;
  std::string out;
  std::string ratios = "0.7,0.1,0.2";
  std::uint64_t seed = 0;
};

int run_split(const SplitOptions& o) {
  std::vector<std::string> ids;
  if (!o.manifest.empty() == !o.ids.empty()) throw ConfigError("give exactly one of --manifest or --ids");
  try {
    if (!o.manifest.empty()) {
      for (const auto& e : io::read_manifest(o.manifest, false).entries) ids.push_back(e.case_id);
    } else {
      std::stringstream ss(io::read_text(o.ids));
      std::string line;
      while (std::getline(ss, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        if (!line.empty()) ids.push_back(line);
      }
    }
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  io::SplitAssignment s;
  try {
    s = io::split_dataset(ids, parse_reals<3>(o.ratios, "--ratios"), o.seed);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  nlohmann::ordered_json doc;
  doc["schema_version"] = io::kSchemaVersion;
  doc["seed"] = o.seed;
  doc["train"] = s.train;
  doc["val"] = s.val;
  doc["test"] = s.test;
  io::write_text(o.out, doc.dump(2) + "\n");
  std::cout << "train " << s.train.size() << ", val " << s.val.size() << ", test "
            << s.test.size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- posenc

struct PosencOptions {
  std::string out;
  int d_model = 96;
  double temperature = kDefaultTemperature;
  std::string lattice = "16,16,16";
  std::string scale = "inclusive";
};

int run_posenc(const PosencOptions& o) {
  PosEncParams p;
  p.d_model = o.d_model;
  p.temperature = o.temperature;
  p.axis_lengths = parse_triple(o.lattice, "--lattice");
  if (o.scale == "inclusive") {
    p.scale = PositionScale::endpoint_inclusive;
  } else if (o.scale == "exclusive") {
    p.scale = PositionScale::endpoint_exclusive;
  } else {
    throw ConfigError("--scale must be inclusive or exclusive");
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const auto t = encode_lattice(p);
  const std::vector<std::int64_t> dims{p.d_model, p.axis_lengths[0], p.axis_lengths[1],
                                       p.axis_lengths[2]};
  io::write_raw(o.out, dims, t);
  std::cout << "wrote " << o.out << " (" << p.d_model << " x " << p.axis_lengths[0] << "x"
            << p.axis_lengths[1] << "x" << p.axis_lengths[2] << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- stats

struct StatsOptions {
  std::string reports;
  std::string manifest;
  std::string out;
  int folds = 5;
  std::uint64_t seed = 0;
  std::string ci_over = "folds";
};

int run_stats(const StatsOptions& o) {
  const CiGrouping grouping = parse_grouping(o.ci_over);
  if (o.folds < 2) throw ConfigError("--folds must be >= 2");
  std::vector<MetricReport> reports;
  std::map<std::string, int> fold_of;
  try {
    std::stringstream ss(io::read_text(o.reports));
    std::string line;
    while (std::getline(ss, line)) {
      if (!line.empty()) reports.push_back(report_from_json_line(line));
    }
    if (!o.manifest.empty()) fold_of = io::read_manifest(o.manifest, false).fold;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (reports.empty()) throw ConfigError("no reports in " + o.reports);
  std::sort(reports.begin(), reports.end(),
            [](const auto& a, const auto& b) { return a.case_id < b.case_id; });
  if (grouping == CiGrouping::folds) {
    const bool complete = std::all_of(reports.begin(), reports.end(),
                                      [&](const auto& r) { return fold_of.count(r.case_id) > 0; });
    if (!complete) {
      fold_of.clear();
      if (reports.size() < static_cast<std::size_t>(o.folds)) {
        throw ConfigError("fewer reports than --folds");
      }
      std::vector<std::string> ids;
      for (const auto& r : reports) ids.push_back(r.case_id);
      const auto folds = kfold(ids, o.folds, o.seed);
      for (std::size_t f = 0; f < folds.size(); ++f) {
        for (const auto& id : folds[f]) fold_of[id] = static_cast<int>(f);
      }
    }
  }
  const auto summary = summarize_reports(reports, grouping, fold_of);
  std::cout << summary_to_table(summary);
  if (!o.out.empty()) {
    io::write_text(fs::path(o.out) / "summary.json", summary_to_json(summary));
    io::write_text(fs::path(o.out) / "summary.txt", summary_to_table(summary));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ctgaze: volumetric gaze scanpath analysis"};
  app.require_subcommand(1);

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score predicted scanpaths against ground truth");
  evaluate->add_option("--manifest", ev.manifest, "Manifest JSON")->required();
  evaluate->add_option("--out", ev.out, "Output directory")->required();
  evaluate->add_option("--metrics", ev.metrics, "scanmatch,sed,mm,cc,nss,kldiv or all")->capture_default_str();
  evaluate->add_option("--grid", ev.grid, "ScanMatch/SED grid NX,NY,NZ")->capture_default_str();
  evaluate->add_option("--temporal-bin-ms", ev.temporal_bin_ms, "ScanMatch duration bin")->capture_default_str();
  evaluate->add_option("--gap-penalty", ev.gap_penalty, "ScanMatch gap penalty")->capture_default_str();
  evaluate->add_option("--sigma-deg", ev.sigma_deg, "In-plane saliency sigma in degrees")->capture_default_str();
  evaluate->add_option("--sigma-z", ev.sigma_z, "Depth saliency sigma in slices")->capture_default_str();
  evaluate->add_option("--saliency", ev.saliency, "Prediction saliency: fixation or rendered")->capture_default_str();
  evaluate->add_option("--ppd", ev.ppd, "Override pixels per degree");
  evaluate->add_option("--seed", ev.seed, "Fold assignment seed")->capture_default_str();
  evaluate->add_option("--workers", ev.workers, "Parallel cases")->capture_default_str();
  evaluate->add_option("--folds", ev.folds, "Cross-validation folds")->capture_default_str();
  evaluate->add_option("--ci-over", ev.ci_over, "Confidence intervals over folds or cases")->capture_default_str();

  SimplifyOptions si;
  auto* simplify = app.add_subcommand("simplify", "Merge fixations along straight and short saccades");
  simplify->add_option("inputs", si.inputs, "Scanpath JSON files");
  simplify->add_option("--manifest", si.manifest, "Simplify every ground-truth scanpath in a manifest");
  simplify->add_option("--out", si.out, "Output directory")->required();
  simplify->add_option("--angle-thresh", si.angle_thresh, "Direction threshold in degrees")->capture_default_str();
  simplify->add_option("--amp-thresh", si.amp_thresh, "Amplitude threshold as a fraction of the diagonal")->capture_default_str();
  simplify->add_option("--duration-ceiling", si.duration_ceiling, "Keep fixations longer than this (ms)");
  simplify->add_option("--workers", si.workers, "Parallel cases")->capture_default_str();

  SynthOptions sy;
  auto* synth = app.add_subcommand("synth", "Lift 2D scanpaths into the volume and jitter copies");
  synth->add_option("inputs", sy.inputs, "2D scanpath JSON files")->required();
  synth->add_option("--out", sy.out, "Output directory")->required();
  synth->add_option("--geometry", sy.geometry, "Target volume W,H,D")->required();
  synth->add_option("--ppd", sy.ppd, "Pixels per degree of the target volume")->capture_default_str();
  synth->add_option("--sigma-deg", sy.sigma_deg, "Jitter sigma in degrees")->capture_default_str();
  synth->add_option("--epochs", sy.epochs, "Jittered copies per scanpath, one seed per epoch")->capture_default_str();
  synth->add_option("--seed", sy.seed, "Base jitter seed")->capture_default_str();

  HeatmapOptions hm;
  auto* heatmap = app.add_subcommand("heatmap", "Render a saliency volume from a scanpath");
  heatmap->add_option("input", hm.input, "Scanpath JSON")->required();
  heatmap->add_option("--out", hm.out, "Raw volume path")->required();
  heatmap->add_option("--sigma-deg", hm.sigma_deg, "In-plane sigma in degrees")->capture_default_str();
  heatmap->add_option("--sigma-z", hm.sigma_z, "Depth sigma in slices")->capture_default_str();
  heatmap->add_option("--ppd", hm.ppd, "Override pixels per degree");
  heatmap->add_flag("--fixations", hm.fixations_only, "Write the binary fixation map instead");
  heatmap->add_option("--workers", hm.workers, "Threads for rendering")->capture_default_str();

  SplitOptions sp;
  auto* split = app.add_subcommand("split", "Seeded train/val/test split");
  split->add_option("--manifest", sp.manifest, "Take case ids from a manifest");
  split->add_option("--ids", sp.ids, "Text file with one id per line");
  split->add_option("--out", sp.out, "Output JSON")->required();
  split->add_option("--ratios", sp.ratios, "train,val,test")->capture_default_str();
  split->add_option("--seed", sp.seed, "Shuffle seed")->capture_default_str();

  PosencOptions pe;
  auto* posenc = app.add_subcommand("posenc", "Write 3D sinusoidal position encodings");
  posenc->add_option("--out", pe.out, "Raw tensor path")->required();
  posenc->add_option("--d-model", pe.d_model, "Encoding width, divisible by 6")->capture_default_str();
  posenc->add_option("--temperature", pe.temperature, "Frequency base")->capture_default_str();
  posenc->add_option("--lattice", pe.lattice, "Axis lengths X,Y,Z")->capture_default_str();
  posenc->add_option("--scale", pe.scale, "inclusive (2*pi*i/(L-1)) or exclusive (2*pi*i/L)")->capture_default_str();

  StatsOptions st;
  auto* stats = app.add_subcommand("stats", "Aggregate a reports.jsonl into means and 95% CIs");
  stats->add_option("--reports", st.reports, "reports.jsonl")->required();
  stats->add_option("--manifest", st.manifest, "Take fold indices from a manifest");
  stats->add_option("--out", st.out, "Directory for summary.json and summary.txt");
  stats->add_option("--folds", st.folds, "Folds when the manifest has none")->capture_default_str();
  stats->add_option("--seed", st.seed, "Fold assignment seed")->capture_default_str();
  stats->add_option("--ci-over", st.ci_over, "folds or cases")->capture_default_str();

  add_env_overrides(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*evaluate) return run_evaluate(ev);
    if (*simplify) return run_simplify(si);
    if (*synth) return run_synth(sy);
    if (*heatmap) return run_heatmap(hm);
    if (*split) return run_split(sp);
    if (*posenc) return run_posenc(pe);
    if (*stats) return run_stats(st);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitConfig;
}
