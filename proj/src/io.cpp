#include "ctgaze/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ctgaze/error.hpp"
#include "ctgaze/rng.hpp"

namespace ctgaze::io {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& origin, const std::string& what) {
  throw Error(ErrorCode::ParseError, origin + ": " + what);
}

ojson parse(const std::string& text, const std::string& origin) {
  try {
    return ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    parse_fail(origin, e.what());
  }
}

const ojson& field(const ojson& obj, const char* key, const std::string& where,
                   const std::string& origin) {
  if (!obj.is_object()) parse_fail(origin, where + " is not an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(origin, "missing field " + where + "." + key);
  return *it;
}

double number(const ojson& obj, const char* key, const std::string& where,
              const std::string& origin) {
  const ojson& v = field(obj, key, where, origin);
  if (!v.is_number()) parse_fail(origin, where + "." + key + " is not a number");
  return v.get<double>();
}

int integer(const ojson& obj, const char* key, const std::string& where,
            const std::string& origin) {
  const ojson& v = field(obj, key, where, origin);
  if (!v.is_number_integer()) parse_fail(origin, where + "." + key + " is not an integer");
  return v.get<int>();
}

std::string string_field(const ojson& obj, const char* key, const std::string& where,
                         const std::string& origin) {
  const ojson& v = field(obj, key, where, origin);
  if (!v.is_string()) parse_fail(origin, where + "." + key + " is not a string");
  return v.get<std::string>();
}

void check_schema(const ojson& doc, const std::string& origin) {
  const std::string version = string_field(doc, "schema_version", "$", origin);
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::SchemaVersionError,
                origin + ": unsupported schema_version '" + version + "'");
  }
}

// Re-raises invariant failures with the file they came from.
template <typename F>
auto with_origin(const std::string& origin, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvariantViolation) {
      throw Error(ErrorCode::InvariantViolation,
                  origin + ": " + std::string(e.what()).substr(sizeof("InvariantViolation: ") - 1));
    }
    throw;
  }
}

ojson geometry_json(const VolumeGeometry& g) {
  ojson j;
  j["width"] = g.width();
  j["height"] = g.height();
  j["depth"] = g.depth();
  j["pixels_per_degree"] = g.pixels_per_degree();
  return j;
}

VolumeGeometry geometry_from(const ojson& j, const std::string& where, const std::string& origin) {
  return with_origin(origin, [&] {
    return VolumeGeometry(integer(j, "width", where, origin), integer(j, "height", where, origin),
                          integer(j, "depth", where, origin),
                          number(j, "pixels_per_degree", where, origin));
  });
}

const ojson& array_field(const ojson& doc, const char* key, const std::string& origin) {
  const ojson& arr = field(doc, key, "$", origin);
  if (!arr.is_array()) parse_fail(origin, std::string("$.") + key + " is not an array");
  return arr;
}

bool host_is_little_endian() { return std::endian::native == std::endian::little; }

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string scanpath_to_json(const Scanpath& sp, const VolumeGeometry& g) {
  ojson doc;
  doc["schema_version"] = kSchemaVersion;
  doc["id"] = sp.id();
  doc["geometry"] = geometry_json(g);
  ojson fx = ojson::array();
  for (const auto& f : sp.fixations()) {
    fx.push_back({{"x", f.x}, {"y", f.y}, {"z", f.z}, {"t", f.t}});
  }
  doc["fixations"] = std::move(fx);
  return doc.dump(2) + "\n";
}

ScanpathRecord scanpath_from_json(const std::string& text, const std::string& origin) {
  const ojson doc = parse(text, origin);
  check_schema(doc, origin);
  const std::string id = string_field(doc, "id", "$", origin);
  VolumeGeometry g = geometry_from(field(doc, "geometry", "$", origin), "$.geometry", origin);
  const ojson& arr = array_field(doc, "fixations", origin);
  std::vector<Fixation> fixations;
  fixations.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "fixations[" + std::to_string(i) + "]";
    Fixation f{number(arr[i], "x", where, origin), number(arr[i], "y", where, origin),
               number(arr[i], "z", where, origin), number(arr[i], "t", where, origin)};
    fixations.push_back(f);
  }
  return with_origin(origin, [&] {
    return ScanpathRecord{Scanpath(id, std::move(fixations)), g};
  });
}

ScanpathRecord read_scanpath(const fs::path& path) {
  return scanpath_from_json(read_text(path), path.string());
}

void write_scanpath(const fs::path& path, const Scanpath& sp, const VolumeGeometry& g) {
  write_text(path, scanpath_to_json(sp, g));
}

std::string scanpath2d_to_json(const Scanpath2DRecord& r) {
  ojson doc;
  doc["schema_version"] = kSchemaVersion;
  doc["id"] = r.id;
  ojson fx = ojson::array();
  for (const auto& f : r.fixations) fx.push_back({{"x", f.x}, {"y", f.y}, {"t", f.t}});
  doc["fixations"] = std::move(fx);
  return doc.dump(2) + "\n";
}

Scanpath2DRecord scanpath2d_from_json(const std::string& text, const std::string& origin) {
  const ojson doc = parse(text, origin);
  check_schema(doc, origin);
  Scanpath2DRecord r;
  r.id = string_field(doc, "id", "$", origin);
  const ojson& arr = array_field(doc, "fixations", origin);
  if (arr.empty()) throw Error(ErrorCode::InvariantViolation, origin + ": no fixations");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "fixations[" + std::to_string(i) + "]";
    Fixation2D f{number(arr[i], "x", where, origin), number(arr[i], "y", where, origin),
                 number(arr[i], "t", where, origin)};
    with_origin(origin, [&] {
      validate(f, where);
      return 0;
    });
    r.fixations.push_back(f);
  }
  return r;
}

Scanpath2DRecord read_scanpath2d(const fs::path& path) {
  return scanpath2d_from_json(read_text(path), path.string());
}

Manifest read_manifest(const fs::path& path, bool check_files) {
  const std::string origin = path.string();
  const ojson doc = parse(read_text(path), origin);
  check_schema(doc, origin);
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  Manifest m;
  std::set<std::string> seen;
  const ojson& arr = array_field(doc, "entries", origin);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    const ojson& e = arr[i];
    ManifestEntry entry{string_field(e, "case_id", where, origin),
                        geometry_from(field(e, "geometry", where, origin), where + ".geometry",
                                      origin),
                        resolve(string_field(e, "gt_path", where, origin)),
                        std::nullopt,
                        {}};
    if (e.contains("pred_path")) entry.pred_path = resolve(string_field(e, "pred_path", where, origin));
    if (e.contains("tags")) {
      for (const auto& t : e["tags"]) {
        if (!t.is_string()) parse_fail(origin, where + ".tags must hold strings");
        entry.tags.push_back(t.get<std::string>());
      }
    }
    if (!seen.insert(entry.case_id).second) {
      throw Error(ErrorCode::InvariantViolation, origin + ": duplicate case_id '" + entry.case_id + "'");
    }
    if (check_files) {
      if (!fs::exists(entry.gt_path)) {
        throw Error(ErrorCode::IoError, origin + ": " + where + ".gt_path not found: " + entry.gt_path.string());
      }
      if (entry.pred_path && !fs::exists(*entry.pred_path)) {
        throw Error(ErrorCode::IoError, origin + ": " + where + ".pred_path not found: " + entry.pred_path->string());
      }
    }
    m.entries.push_back(std::move(entry));
  }
  if (doc.contains("splits")) {
    const ojson& s = doc["splits"];
    if (!s.is_object()) parse_fail(origin, "$.splits is not an object");
    for (const auto& [id, v] : s.items()) {
      if (!seen.count(id)) parse_fail(origin, "$.splits names unknown case '" + id + "'");
      if (v.is_number_integer()) {
        m.fold[id] = v.get<int>();
      } else if (v.is_string() && (v == "train" || v == "val" || v == "test")) {
        m.split[id] = v.get<std::string>();
      } else {
        parse_fail(origin, "$.splits." + id + " must be train|val|test or a fold index");
      }
    }
  }
  return m;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  ojson doc;
  doc["schema_version"] = kSchemaVersion;
  ojson arr = ojson::array();
  const fs::path base = path.parent_path();
  auto rel = [&](const fs::path& p) {
    return base.empty() ? p.generic_string() : fs::relative(p, base).generic_string();
  };
  for (const auto& e : m.entries) {
    ojson j;
    j["case_id"] = e.case_id;
    j["geometry"] = geometry_json(e.geometry);
    j["gt_path"] = rel(e.gt_path);
    if (e.pred_path) j["pred_path"] = rel(*e.pred_path);
    if (!e.tags.empty()) j["tags"] = e.tags;
    arr.push_back(std::move(j));
  }
  doc["entries"] = std::move(arr);
  if (!m.split.empty() || !m.fold.empty()) {
    ojson s = ojson::object();
    for (const auto& [id, v] : m.split) s[id] = v;
    for (const auto& [id, v] : m.fold) s[id] = v;
    doc["splits"] = std::move(s);
  }
  write_text(path, doc.dump(2) + "\n");
}

fs::path sidecar_path(const fs::path& payload) {
  fs::path p = payload;
  p += ".json";
  return p;
}

void write_raw(const fs::path& path, std::span<const std::int64_t> dims,
               std::span<const float> data) {
  std::int64_t count = 1;
  for (auto d : dims) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "tensor dims must be >= 1");
    count *= d;
  }
  if (static_cast<std::size_t>(count) != data.size()) {
    throw Error(ErrorCode::DimensionMismatch, "payload length does not match dims");
  }
  float peak = data.empty() ? 0.0f : data[0];
  for (float v : data) peak = std::max(peak, v);

  ojson hdr;
  hdr["schema_version"] = kSchemaVersion;
  hdr["dims"] = std::vector<std::int64_t>(dims.begin(), dims.end());
  hdr["dtype"] = "float32";
  hdr["byte_order"] = "little";
  hdr["layout"] = "first-dim-fastest";
  hdr["scale"] = static_cast<double>(peak);

  std::vector<std::uint32_t> words(data.size());
  std::memcpy(words.data(), data.data(), data.size() * sizeof(float));
  if (!host_is_little_endian()) {
    for (auto& w : words) w = byteswap32(w);
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
  write_text(sidecar_path(path), hdr.dump(2) + "\n");
}

RawTensor read_raw(const fs::path& path) {
  const fs::path hdr_path = sidecar_path(path);
  const std::string origin = hdr_path.string();
  const ojson hdr = parse(read_text(hdr_path), origin);
  check_schema(hdr, origin);
  if (string_field(hdr, "dtype", "$", origin) != "float32" ||
      string_field(hdr, "byte_order", "$", origin) != "little") {
    throw Error(ErrorCode::HeaderMismatch, origin + ": only little-endian float32 is supported");
  }
  RawTensor t;
  const ojson& dims = field(hdr, "dims", "$", origin);
  if (!dims.is_array() || dims.empty()) parse_fail(origin, "$.dims must be a non-empty array");
  std::int64_t count = 1;
  for (const auto& d : dims) {
    if (!d.is_number_integer() || d.get<std::int64_t>() < 1) {
      throw Error(ErrorCode::HeaderMismatch, origin + ": dims must be positive integers");
    }
    t.dims.push_back(d.get<std::int64_t>());
    count *= t.dims.back();
  }
  t.scale = number(hdr, "scale", "$", origin);

  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "missing payload " + path.string());
  const auto bytes = fs::file_size(path);
  const auto expected = static_cast<std::uintmax_t>(count) * sizeof(float);
  if (bytes != expected) {
    throw Error(ErrorCode::HeaderMismatch, path.string() + ": payload is " + std::to_string(bytes) +
                                               " bytes, header needs " + std::to_string(expected));
  }
  std::vector<std::uint32_t> words(static_cast<std::size_t>(count));
  std::ifstream in(path, std::ios::binary);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(expected));
  if (!in) throw Error(ErrorCode::IoError, "read failed for " + path.string());
  if (!host_is_little_endian()) {
    for (auto& w : words) w = byteswap32(w);
  }
  t.data.resize(words.size());
  std::memcpy(t.data.data(), words.data(), words.size() * sizeof(float));
  return t;
}

void write_volume(const ScalarVolume& v, const fs::path& path) {
  const std::array<std::int64_t, 3> dims{v.dims().width, v.dims().height, v.dims().depth};
  write_raw(path, dims, v.values());
}

ScalarVolume read_volume(const fs::path& path) {
  RawTensor t = read_raw(path);
  if (t.dims.size() != 3) {
    throw Error(ErrorCode::HeaderMismatch, path.string() + ": volume needs 3 dims");
  }
  return ScalarVolume(Dims{static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]),
                           static_cast<int>(t.dims[2])},
                      std::move(t.data));
}

std::map<std::string, std::string> SplitAssignment::as_map() const {
  std::map<std::string, std::string> m;
  for (const auto& id : train) m[id] = "train";
  for (const auto& id : val) m[id] = "val";
  for (const auto& id : test) m[id] = "test";
  return m;
}

SplitAssignment split_dataset(const std::vector<std::string>& ids,
                              const std::array<double, 3>& ratios, std::uint64_t seed) {
  double total = 0.0;
  for (double r : ratios) {
    if (!std::isfinite(r) || r < 0.0) throw Error(ErrorCode::BadRatios, "ratios must be >= 0");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::BadRatios, "ratios must sum to 1");
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
    throw Error(ErrorCode::InvalidArgument, "ids must be unique");
  }
  std::vector<std::string> order = ids;
  PortableRng rng(seed);
  portable_shuffle(order, rng);

  const double n = static_cast<double>(order.size());
  // The small slack keeps products like 0.7 * 10 from flooring to 6.
  const auto n_train = static_cast<std::size_t>(std::floor(n * ratios[0] + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(n * ratios[1] + 1e-9));
  SplitAssignment s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

}  // namespace ctgaze::io
