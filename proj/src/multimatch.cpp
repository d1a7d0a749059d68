#include "ctgaze/multimatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>

#include "ctgaze/error.hpp"

namespace ctgaze {

namespace {

constexpr double kPi = std::numbers::pi;

struct Vec3 {
  double x, y, z;
};

Vec3 between(const VoxelPoint& a, const VoxelPoint& b) { return {b.x - a.x, b.y - a.y, b.z - a.z}; }

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

double unit_clamp(double v) { return std::clamp(v, 0.0, 1.0); }

// One left-to-right sweep. `fires(prev, mid, next)` decides whether the
// fixation `mid` between the last kept fixation and the next input fixation
// is removed. After a removal the merged saccade is tested again against the
// following one.
template <typename Rule>
bool sweep(std::vector<Fixation>& fx, const VolumeGeometry& g, const SimplifyParams& p,
           Rule fires) {
  if (fx.size() < 3) return false;
  std::vector<Fixation> out;
  out.reserve(fx.size());
  out.push_back(fx.front());
  bool changed = false;
  for (std::size_t j = 1; j + 1 < fx.size(); ++j) {
    const bool allowed = !p.duration_ceiling_ms || fx[j].t <= *p.duration_ceiling_ms;
    if (allowed && fires(to_voxel(out.back(), g), to_voxel(fx[j], g), to_voxel(fx[j + 1], g))) {
      out.back().t += fx[j].t;
      changed = true;
    } else {
      out.push_back(fx[j]);
    }
  }
  out.push_back(fx.back());
  fx = std::move(out);
  return changed;
}

Alignment backtrack(const std::vector<std::uint8_t>& move, std::size_t rows, std::size_t cols,
                    double cost) {
  Alignment al;
  al.cost = cost;
  std::size_t i = rows - 1, j = cols - 1;
  al.pairs.emplace_back(i, j);
  while (i != 0 || j != 0) {
    switch (move[i * cols + j]) {
      case 0: --i; --j; break;
      case 1: --i; break;
      default: --j; break;
    }
    al.pairs.emplace_back(i, j);
  }
  std::reverse(al.pairs.begin(), al.pairs.end());
  return al;
}

// Predecessor codes: 0 diagonal, 1 from (i-1, j), 2 from (i, j-1).
// Ties prefer the diagonal, then (i-1, j).
Alignment solve_dp(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
  std::vector<double> prev(cols), cur(cols);
  std::vector<std::uint8_t> move(rows * cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double here = m[i * cols + j];
      if (i == 0 && j == 0) {
        cur[0] = here;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      std::uint8_t choice = 0;
      if (i > 0 && j > 0) best = prev[j - 1];
      if (i > 0 && prev[j] < best) {
        best = prev[j];
        choice = 1;
      }
      if (j > 0 && cur[j - 1] < best) {
        best = cur[j - 1];
        choice = 2;
      }
      cur[j] = best + here;
      move[i * cols + j] = choice;
    }
    std::swap(prev, cur);
  }
  return backtrack(move, rows, cols, prev[cols - 1]);
}

Alignment solve_dijkstra(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
  const std::size_t n = rows * cols;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<std::uint8_t> move(n, 0);
  std::vector<bool> done(n, false);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[0] = m[0];
  heap.emplace(dist[0], 0);
  const std::size_t target = n - 1;
  while (!heap.empty()) {
    const auto [d, node] = heap.top();
    heap.pop();
    if (done[node]) continue;
    done[node] = true;
    if (node == target) break;
    const std::size_t i = node / cols, j = node % cols;
    auto relax = [&](std::size_t ni, std::size_t nj, std::uint8_t code) {
      if (ni >= rows || nj >= cols) return;
      const std::size_t to = ni * cols + nj;
      const double nd = d + m[to];
      if (nd < dist[to]) {
        dist[to] = nd;
        move[to] = code;
        heap.emplace(nd, to);
      }
    };
    relax(i + 1, j + 1, 0);
    relax(i + 1, j, 1);
    relax(i, j + 1, 2);
  }
  return backtrack(move, rows, cols, dist[target]);
}

}  // namespace

void SimplifyParams::validate() const {
  if (!(angle_threshold_deg > 0.0 && angle_threshold_deg < 180.0)) {
    throw Error(ErrorCode::InvalidArgument, "angle threshold must lie in (0, 180) degrees");
  }
  if (!(amplitude_threshold_fraction > 0.0 && amplitude_threshold_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "amplitude threshold must lie in (0, 1]");
  }
  if (duration_ceiling_ms && !(*duration_ceiling_ms > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "duration ceiling must be > 0 ms");
  }
}

double vector_angle(double ax, double ay, double az, double bx, double by, double bz) {
  const double na = std::sqrt(ax * ax + ay * ay + az * az);
  const double nb = std::sqrt(bx * bx + by * by + bz * bz);
  if (na == 0.0 || nb == 0.0) return 0.0;
  // atan2 of |a x b| and a.b stays accurate near 0 and pi, where acos of
  // the normalized dot product loses about half the significant digits.
  const double cx = ay * bz - az * by;
  const double cy = az * bx - ax * bz;
  const double cz = ax * by - ay * bx;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), ax * bx + ay * by + az * bz);
}

Scanpath simplify(const Scanpath& sp, const VolumeGeometry& g, const SimplifyParams& p) {
  p.validate();
  if (sp.size() < 2) {
    throw Error(ErrorCode::ScanpathTooShort, "scanpath '" + sp.id() + "' needs >= 2 fixations");
  }
  const double max_angle = p.angle_threshold_deg * kPi / 180.0;
  const double max_len = p.amplitude_threshold_fraction * diagonal(g);

  auto direction_rule = [&](const VoxelPoint& a, const VoxelPoint& b, const VoxelPoint& c) {
    const Vec3 u = between(a, b), w = between(b, c);
    return vector_angle(u.x, u.y, u.z, w.x, w.y, w.z) < max_angle;
  };
  auto amplitude_rule = [&](const VoxelPoint& a, const VoxelPoint& b, const VoxelPoint& c) {
    return norm(between(a, b)) < max_len && norm(between(b, c)) < max_len;
  };

  std::vector<Fixation> fx = sp.fixations();
  bool changed = true;
  while (changed) {
    changed = sweep(fx, g, p, direction_rule);
    changed = sweep(fx, g, p, amplitude_rule) || changed;
  }
  return Scanpath(sp.id(), std::move(fx));
}

std::vector<double> saccade_dissimilarity(const std::vector<Saccade>& a,
                                          const std::vector<Saccade>& b) {
  std::vector<double> m(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double dx = a[i].dx - b[j].dx, dy = a[i].dy - b[j].dy, dz = a[i].dz - b[j].dz;
      m[i * b.size() + j] = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  }
  return m;
}

Alignment align_matrix(const std::vector<double>& m, std::size_t rows, std::size_t cols,
                       AlignSolver solver) {
  if (rows == 0 || cols == 0 || m.size() != rows * cols) {
    throw Error(ErrorCode::InvalidArgument, "alignment matrix must be non-empty and rows*cols");
  }
  return solver == AlignSolver::dijkstra ? solve_dijkstra(m, rows, cols)
                                         : solve_dp(m, rows, cols);
}

Alignment align(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g,
                AlignSolver solver) {
  const auto sa = saccades(a, g);
  const auto sb = saccades(b, g);
  return align_matrix(saccade_dissimilarity(sa, sb), sa.size(), sb.size(), solver);
}

MultiMatchScores mm_scores(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g) {
  const auto sa = saccades(a, g);
  const auto sb = saccades(b, g);
  const auto pa = to_voxel_space(a, g);
  const auto pb = to_voxel_space(b, g);
  const auto al = align_matrix(saccade_dissimilarity(sa, sb), sa.size(), sb.size());
  const double diag = diagonal(g);

  MultiMatchScores s;
  for (const auto& [i, j] : al.pairs) {
    const Saccade& u = sa[i];
    const Saccade& v = sb[j];
    const double dx = u.dx - v.dx, dy = u.dy - v.dy, dz = u.dz - v.dz;
    s.vector += 1.0 - unit_clamp(std::sqrt(dx * dx + dy * dy + dz * dz) / diag);
    s.direction += 1.0 - vector_angle(u.dx, u.dy, u.dz, v.dx, v.dy, v.dz) / kPi;
    s.length += 1.0 - unit_clamp(std::abs(u.amplitude - v.amplitude) / diag);
    const double start_gap = distance(pa[u.source_index], pb[v.source_index]);
    const double end_gap = distance(pa[u.target_index], pb[v.target_index]);
    s.position += 1.0 - unit_clamp(0.5 * (start_gap + end_gap) / diag);
    const double ta = pa[u.target_index].t, tb = pb[v.target_index].t;
    s.duration += 1.0 - std::abs(ta - tb) / std::max(ta, tb);
  }
  const double n = static_cast<double>(al.pairs.size());
  s.vector /= n;
  s.direction /= n;
  s.length /= n;
  s.position /= n;
  s.duration /= n;
  return s;
}

}  // namespace ctgaze
