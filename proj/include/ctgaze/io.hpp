#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctgaze/core.hpp"
#include "ctgaze/synth.hpp"
#include "ctgaze/volume.hpp"

namespace ctgaze::io {

namespace fs = std::filesystem;

inline constexpr const char* kSchemaVersion = "1.0";

struct ScanpathRecord {
  Scanpath scanpath;
  VolumeGeometry geometry;
};

/// {"schema_version", "id", "geometry": {...}, "fixations": [{"x","y","z","t"}]}.
/// Writing is deterministic (fixed key order, shortest round-trip doubles),
/// so write(read(f)) reproduces a written file byte for byte.
std::string scanpath_to_json(const Scanpath& sp, const VolumeGeometry& g);
ScanpathRecord scanpath_from_json(const std::string& text, const std::string& origin = "<string>");
ScanpathRecord read_scanpath(const fs::path& path);
void write_scanpath(const fs::path& path, const Scanpath& sp, const VolumeGeometry& g);

/// 2D variant: {"schema_version", "id", "fixations": [{"x","y","t"}]}.
struct Scanpath2DRecord {
  std::string id;
  std::vector<Fixation2D> fixations;
};
std::string scanpath2d_to_json(const Scanpath2DRecord& r);
Scanpath2DRecord scanpath2d_from_json(const std::string& text,
                                      const std::string& origin = "<string>");
Scanpath2DRecord read_scanpath2d(const fs::path& path);

struct ManifestEntry {
  std::string case_id;
  VolumeGeometry geometry;
  fs::path gt_path;                  // resolved against the manifest directory
  std::optional<fs::path> pred_path;
  std::vector<std::string> tags;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::map<std::string, std::string> split;  // case_id -> train | val | test
  std::map<std::string, int> fold;           // case_id -> fold index
};

/// Rejects duplicate case ids and missing referenced files.
Manifest read_manifest(const fs::path& path, bool check_files = true);
void write_manifest(const fs::path& path, const Manifest& m);

/// Little-endian float32 payload plus a JSON sidecar at `<path>.json`.
struct RawTensor {
  std::vector<std::int64_t> dims;  // first dimension varies fastest
  std::vector<float> data;
  double scale = 0.0;              // peak value of the payload
};

fs::path sidecar_path(const fs::path& payload);
void write_raw(const fs::path& path, std::span<const std::int64_t> dims,
               std::span<const float> data);
RawTensor read_raw(const fs::path& path);

void write_volume(const ScalarVolume& v, const fs::path& path);
ScalarVolume read_volume(const fs::path& path);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;

  std::map<std::string, std::string> as_map() const;
};

/// Shuffles with `seed`, then sizes are floor(n * r) for train and val and
/// the remainder for test.
SplitAssignment split_dataset(const std::vector<std::string>& ids,
                              const std::array<double, 3>& ratios = {0.70, 0.10, 0.20},
                              std::uint64_t seed = 0);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace ctgaze::io
