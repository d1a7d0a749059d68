#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ctgaze/core.hpp"

namespace ctgaze {

/// Number of cells per axis used to turn positions into symbols.
struct GridSpec {
  int nx = 8;
  int ny = 8;
  int nz = 4;

  GridSpec() = default;
  GridSpec(int nx_, int ny_, int nz_);

  std::size_t cells() const noexcept {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  bool operator==(const GridSpec&) const = default;
};

struct SymbolSequence {
  GridSpec grid;
  std::vector<std::int32_t> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
};

/// Dense K x K score table, K = grid.cells(). score(i, j) = max_score - d(i, j)
/// where d is the voxel-space distance between cell centers.
class SubstitutionMatrix {
 public:
  SubstitutionMatrix(GridSpec grid, std::vector<double> scores, double max_score);

  const GridSpec& grid() const noexcept { return grid_; }
  double max_score() const noexcept { return max_score_; }
  double operator()(std::int32_t a, std::int32_t b) const {
    return scores_[static_cast<std::size_t>(a) * grid_.cells() + static_cast<std::size_t>(b)];
  }

 private:
  GridSpec grid_;
  std::vector<double> scores_;
  double max_score_;
};

inline constexpr double kDefaultTemporalBinMs = 50.0;
inline constexpr double kDefaultGapPenalty = 0.0;

/// Cell id = iz*(nx*ny) + iy*nx + ix with ix = min(floor(x*nx), nx-1).
/// With a temporal bin, each symbol is repeated ceil(t / bin) times.
SymbolSequence quantize(const Scanpath& sp, const VolumeGeometry& g, const GridSpec& grid,
                        std::optional<double> temporal_bin_ms = std::nullopt);

std::size_t levenshtein(const SymbolSequence& a, const SymbolSequence& b);

/// String-edit distance between the one-symbol-per-fixation encodings.
std::size_t sed(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g,
                const GridSpec& grid);

SubstitutionMatrix substitution_matrix(const VolumeGeometry& g, const GridSpec& grid);

/// Best global alignment score; each gap adds `gap_penalty`.
double needleman_wunsch(const SymbolSequence& a, const SymbolSequence& b,
                        const SubstitutionMatrix& sub, double gap_penalty = kDefaultGapPenalty);

struct ScanMatchParams {
  bool with_duration = false;
  double temporal_bin_ms = kDefaultTemporalBinMs;
  double gap_penalty = kDefaultGapPenalty;
};

/// Alignment score normalized by max_score * max(len_a, len_b), in [0, 1].
double scanmatch(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g,
                 const SubstitutionMatrix& sub, const ScanMatchParams& p = {});
double scanmatch(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g,
                 const GridSpec& grid, const ScanMatchParams& p = {});

}  // namespace ctgaze
