#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ctgaze/core.hpp"

namespace ctgaze {

struct SimplifyParams {
  double angle_threshold_deg = 45.0;
  /// Fraction of the volume diagonal below which a saccade counts as short.
  double amplitude_threshold_fraction = 0.10;
  /// Merges are skipped when the removed fixation lasts longer than this.
  std::optional<double> duration_ceiling_ms;

  void validate() const;
};

/// Merges directionally similar and short consecutive saccades until neither
/// rule fires. A removed fixation's duration goes to its predecessor, so the
/// total duration and the first/last fixations are preserved.
Scanpath simplify(const Scanpath& sp, const VolumeGeometry& g, const SimplifyParams& p = {});

/// Monotone lattice path through saccade index pairs.
struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double cost = 0.0;
};

enum class AlignSolver {
  lattice_dp,  // topological-order relaxation of the lattice DAG
  dijkstra,    // binary-heap Dijkstra over the same graph
};

/// Saccade-vector dissimilarity M(i, j) = |u_i - v_j|, row-major n x m.
std::vector<double> saccade_dissimilarity(const std::vector<Saccade>& a,
                                          const std::vector<Saccade>& b);

/// Cheapest path from (0,0) to (n-1,m-1) with steps (1,0), (0,1), (1,1);
/// a path costs the sum of M over the nodes it visits.
Alignment align(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g,
                AlignSolver solver = AlignSolver::lattice_dp);
Alignment align_matrix(const std::vector<double>& m, std::size_t rows, std::size_t cols,
                       AlignSolver solver = AlignSolver::lattice_dp);

struct MultiMatchScores {
  double vector = 0.0;
  double direction = 0.0;
  double length = 0.0;
  double position = 0.0;
  double duration = 0.0;

  /// Mean of vector, direction, length and position.
  double shape_average() const { return (vector + direction + length + position) / 4.0; }
};

MultiMatchScores mm_scores(const Scanpath& a, const Scanpath& b, const VolumeGeometry& g);

/// Angle between two 3D vectors in [0, pi]; 0 if either is the zero vector.
double vector_angle(double ax, double ay, double az, double bx, double by, double bz);

}  // namespace ctgaze
