#include "ctgaze/strmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ctgaze/error.hpp"

namespace ctgaze {

namespace {

int bin(double v, int n) {
  return std::clamp(static_cast<int>(std::floor(v * n)), 0, n - 1);
}

void require_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "symbol sequences use different grids");
}

// Cell center along one axis, in voxel units.
double center(int idx, int n, int extent) {
  return (idx + 0.5) / n * (extent - 1);
}

}  // namespace

GridSpec::GridSpec(int nx_, int ny_, int nz_) : nx(nx_), ny(ny_), nz(nz_) {
  if (nx < 1 || ny < 1 || nz < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid bin counts must be >= 1");
  }
  const auto limit = static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max());
  if (static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) > limit / static_cast<std::size_t>(nz)) {
    throw Error(ErrorCode::InvalidArgument, "grid has too many cells");
  }
}

SubstitutionMatrix::SubstitutionMatrix(GridSpec grid, std::vector<double> scores,
                                       double max_score)
    : grid_(grid), scores_(std::move(scores)), max_score_(max_score) {
  if (scores_.size() != grid_.cells() * grid_.cells()) {
    throw Error(ErrorCode::DimensionMismatch, "substitution table size does not match grid");
  }
}

SymbolSequence quantize(const Scanpath& sp, const VolumeGeometry&, const GridSpec& grid,
                        std::optional<double> temporal_bin_ms) {
  if (temporal_bin_ms && !(std::isfinite(*temporal_bin_ms) && *temporal_bin_ms > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "temporal bin must be > 0 ms");
  }
  SymbolSequence out{grid, {}};
  out.symbols.reserve(sp.size());
  for (const auto& f : sp.fixations()) {
    const int ix = bin(f.x, grid.nx), iy = bin(f.y, grid.ny), iz = bin(f.z, grid.nz);
    const auto id = static_cast<std::int32_t>(iz * (grid.nx * grid.ny) + iy * grid.nx + ix);
    std::size_t reps = 1;
    if (temporal_bin_ms) reps = static_cast<std::size_t>(std::ceil(f.t / *temporal_bin_ms));
    out.symbols.insert(out.symbols.end(), std::max<std::size_t>(reps, 1), id);
  }
  return out;
}

std::size_t levenshtein(const SymbolSequence& a, const SymbolSequence& b) {
  require_grid(a.grid, b.grid);
  const auto& s = a.symbols;
  const auto& t = b.symbols;
  // Single-row DP; row[j] holds the distance between s[0..i) and t[0..j).
  std::vector<std::size_t> row(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (s[i - 1] == t[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[t.size()];
}

std::size_t sed(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g,
                const GridSpec& grid) {
  return levenshtein(quantize(a, g, grid), quantize(b, g, grid));
}

SubstitutionMatrix substitution_matrix(const VolumeGeometry& g, const GridSpec& grid) {
  const std::size_t k = grid.cells();
  std::vector<double> cx(k), cy(k), cz(k);
  for (int iz = 0; iz < grid.nz; ++iz) {
    for (int iy = 0; iy < grid.ny; ++iy) {
      for (int ix = 0; ix < grid.nx; ++ix) {
        const auto id = static_cast<std::size_t>(iz * grid.nx * grid.ny + iy * grid.nx + ix);
        cx[id] = center(ix, grid.nx, g.width());
        cy[id] = center(iy, grid.ny, g.height());
        cz[id] = center(iz, grid.nz, g.depth());
      }
    }
  }
  std::vector<double> dist(k * k);
  double d_max = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double dx = cx[i] - cx[j], dy = cy[i] - cy[j], dz = cz[i] - cz[j];
      const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
      dist[i * k + j] = d;
      d_max = std::max(d_max, d);
    }
  }
  for (double& d : dist) d = d_max - d;
  return SubstitutionMatrix(grid, std::move(dist), d_max);
}

double needleman_wunsch(const SymbolSequence& a, const SymbolSequence& b,
                        const SubstitutionMatrix& sub, double gap_penalty) {
  require_grid(a.grid, b.grid);
  require_grid(a.grid, sub.grid());
  const auto& s = a.symbols;
  const auto& t = b.symbols;
  std::vector<double> prev(t.size() + 1), cur(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) prev[j] = static_cast<double>(j) * gap_penalty;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    cur[0] = static_cast<double>(i) * gap_penalty;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const double match = prev[j - 1] + sub(s[i - 1], t[j - 1]);
      const double del = prev[j] + gap_penalty;
      const double ins = cur[j - 1] + gap_penalty;
      cur[j] = std::max({match, del, ins});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

double scanmatch(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g,
                 const SubstitutionMatrix& sub, const ScanMatchParams& p) {
  const std::optional<double> bin_ms =
      p.with_duration ? std::optional<double>(p.temporal_bin_ms) : std::nullopt;
  const auto sa = quantize(a, g, sub.grid(), bin_ms);
  const auto sb = quantize(b, g, sub.grid(), bin_ms);
  if (sub.max_score() <= 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "grid cell centers coincide in voxel space; ScanMatch is undefined");
  }
  const double score = needleman_wunsch(sa, sb, sub, p.gap_penalty);
  const double norm = sub.max_score() * static_cast<double>(std::max(sa.size(), sb.size()));
  return std::clamp(score / norm, 0.0, 1.0);
}

double scanmatch(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g,
                 const GridSpec& grid, const ScanMatchParams& p) {
  return scanmatch(a, b, g, substitution_matrix(g, grid), p);
}

}  // namespace ctgaze
