#include "ctgaze/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "ctgaze/error.hpp"
#include "ctgaze/rng.hpp"
#include "json.hpp"

namespace ctgaze {

using ojson = nlohmann::ordered_json;

namespace {

// t_{0.975, df} for df = 1..30.
constexpr std::array<double, 30> kT975 = {
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004,
    2.262157,  2.228139, 2.200985, 2.178813, 2.160369, 2.144787, 2.131450, 2.119905,
    2.109816,  2.100922, 2.093024, 2.085963, 2.079614, 2.073873, 2.068658, 2.063899,
    2.059539,  2.055529, 2.051831, 2.048407, 2.045230, 2.042272,
};

const char* grouping_name(CiGrouping g) { return g == CiGrouping::folds ? "folds" : "cases"; }

}  // namespace

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "scanmatch_nodur", "scanmatch_dur", "mm_vector", "mm_direction", "mm_length",
      "mm_position",     "mm_duration",   "sed",       "cc",           "nss",
      "kldiv"};
  return names;
}

std::vector<std::pair<std::string, double>> MetricReport::values() const {
  std::vector<std::pair<std::string, double>> out;
  if (scanmatch_nodur) out.emplace_back("scanmatch_nodur", *scanmatch_nodur);
  if (scanmatch_dur) out.emplace_back("scanmatch_dur", *scanmatch_dur);
  if (mm) {
    out.emplace_back("mm_vector", mm->vector);
    out.emplace_back("mm_direction", mm->direction);
    out.emplace_back("mm_length", mm->length);
    out.emplace_back("mm_position", mm->position);
    out.emplace_back("mm_duration", mm->duration);
  }
  if (sed) out.emplace_back("sed", *sed);
  if (cc) out.emplace_back("cc", *cc);
  if (nss) out.emplace_back("nss", *nss);
  if (kldiv) out.emplace_back("kldiv", *kldiv);
  return out;
}

double t_quantile_975(std::size_t df) {
  if (df == 0) throw Error(ErrorCode::TooFewValues, "t quantile needs df >= 1");
  if (df <= kT975.size()) return kT975[df - 1];
  boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, 0.975);
}

Aggregate aggregate(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::TooFewValues, "aggregate needs >= 2 values, got " +
                                             std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "aggregate input is not finite");
  }
  // Sorting first makes the sums independent of input order.
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  Aggregate a;
  a.n = v.size();
  a.mean = mean;
  a.std = std::sqrt(ss / (n - 1.0));
  a.ci95 = t_quantile_975(v.size() - 1) * a.std / std::sqrt(n);
  a.has_ci = true;
  return a;
}

std::vector<std::vector<std::string>> kfold(const std::vector<std::string>& ids, int k,
                                            std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::BadK, "k must be >= 2");
  if (ids.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::BadK, "need at least k ids");
  }
  std::vector<std::string> order = ids;
  PortableRng rng(seed);
  portable_shuffle(order, rng);
  const std::size_t kk = static_cast<std::size_t>(k);
  const std::size_t base = order.size() / kk, extra = order.size() % kk;
  std::vector<std::vector<std::string>> folds(kk);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < kk; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return folds;
}

AggregateSummary summarize_reports(const std::vector<MetricReport>& reports, CiGrouping grouping,
                                   const std::map<std::string, int>& fold_of) {
  AggregateSummary s;
  s.grouping = grouping;
  s.cases = reports.size();
  // metric -> group -> values; groups are single cases or fold indices.
  std::map<std::string, std::map<long long, std::vector<double>>> samples;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    long long group = static_cast<long long>(i);
    if (grouping == CiGrouping::folds) {
      auto it = fold_of.find(reports[i].case_id);
      if (it == fold_of.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    "case '" + reports[i].case_id + "' has no fold assignment");
      }
      group = it->second;
    }
    for (const auto& [name, value] : reports[i].values()) samples[name][group].push_back(value);
  }
  for (const auto& name : metric_names()) {
    auto it = samples.find(name);
    if (it == samples.end()) continue;
    std::vector<double> points;
    for (const auto& [group, vals] : it->second) {
      double sum = 0.0;
      for (double v : vals) sum += v;
      points.push_back(sum / static_cast<double>(vals.size()));
    }
    if (points.size() >= 2) {
      s.metrics[name] = aggregate(points);
    } else {
      s.metrics[name] = Aggregate{1, points.front(), 0.0, 0.0, false};
    }
  }
  return s;
}

std::string report_to_json_line(const MetricReport& r) {
  ojson j;
  j["case_id"] = r.case_id;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("scanmatch_nodur", r.scanmatch_nodur);
  put("scanmatch_dur", r.scanmatch_dur);
  if (r.mm) {
    j["mm"] = {{"vector", r.mm->vector},
               {"direction", r.mm->direction},
               {"length", r.mm->length},
               {"position", r.mm->position},
               {"duration", r.mm->duration}};
  }
  put("sed", r.sed);
  put("cc", r.cc);
  put("nss", r.nss);
  put("kldiv", r.kldiv);
  return j.dump();
}

MetricReport report_from_json_line(const std::string& line) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const ojson::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.is_object() || !j.contains("case_id") || !j["case_id"].is_string()) {
    throw Error(ErrorCode::ParseError, "report line lacks a string case_id");
  }
  MetricReport r;
  r.case_id = j["case_id"].get<std::string>();
  auto get = [&](const char* key, std::optional<double>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw Error(ErrorCode::ParseError, std::string(key) + " is not a number");
    out = j[key].get<double>();
  };
  get("scanmatch_nodur", r.scanmatch_nodur);
  get("scanmatch_dur", r.scanmatch_dur);
  if (j.contains("mm")) {
    const auto& m = j["mm"];
    try {
      r.mm = MultiMatchScores{m.at("vector").get<double>(), m.at("direction").get<double>(),
                              m.at("length").get<double>(), m.at("position").get<double>(),
                              m.at("duration").get<double>()};
    } catch (const ojson::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("mm: ") + e.what());
    }
  }
  get("sed", r.sed);
  get("cc", r.cc);
  get("nss", r.nss);
  get("kldiv", r.kldiv);
  return r;
}

std::string summary_to_json(const AggregateSummary& s) {
  ojson j;
  j["schema_version"] = "1.0";
  j["ci_grouping"] = grouping_name(s.grouping);
  j["cases"] = s.cases;
  ojson m = ojson::object();
  for (const auto& name : metric_names()) {
    auto it = s.metrics.find(name);
    if (it == s.metrics.end()) continue;
    const Aggregate& a = it->second;
    ojson e;
    e["mean"] = a.mean;
    e["std"] = a.std;
    e["ci95"] = a.has_ci ? ojson(a.ci95) : ojson(nullptr);
    e["n"] = a.n;
    m[name] = std::move(e);
  }
  j["metrics"] = std::move(m);
  return j.dump(2) + "\n";
}

std::string summary_to_table(const AggregateSummary& s) {
  std::ostringstream os;
  os << std::left << std::setw(18) << "metric" << std::right << std::setw(12) << "mean"
     << std::setw(12) << "+-ci95" << std::setw(6) << "n" << "\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& name : metric_names()) {
    auto it = s.metrics.find(name);
    if (it == s.metrics.end()) continue;
    const Aggregate& a = it->second;
    os << std::left << std::setw(18) << name << std::right << std::setw(12) << a.mean;
    if (a.has_ci) {
      os << std::setw(12) << a.ci95;
    } else {
      os << std::setw(12) << "-";
    }
    os << std::setw(6) << a.n << "\n";
  }
  os << "(ci over " << grouping_name(s.grouping) << ", " << s.cases << " cases)\n";
  return os.str();
}

}  // namespace ctgaze
