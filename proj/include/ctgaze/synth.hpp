#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctgaze/core.hpp"

namespace ctgaze {

/// Fixation on a 2D image, origin top-left, coordinates normalized to [0,1].
struct Fixation2D {
  double x = 0.0;
  double y = 0.0;
  double t = 1.0;

  bool operator==(const Fixation2D&) const = default;
};

void validate(const Fixation2D& f, const std::string& where = "fixation");

struct JitterParams {
  double sigma_deg = 1.0;
  double pixels_per_degree = 1.0;
  std::uint64_t seed = 0;
};

/// (x, y, t) -> (1 - x, 0.5, y, t): mirrored width, middle slice in height,
/// image rows become depth.
Scanpath lift_2d_to_3d(const std::string& id, const std::vector<Fixation2D>& fixations);

/// Adds N(0, sigma_deg * ppd voxels) to x and y independently, clamped to
/// [0, 1]. z and t are untouched. Deterministic in `p.seed`.
Scanpath jitter(const Scanpath& sp, const VolumeGeometry& g, const JitterParams& p);

/// Seed for jittering copy `epoch` of scanpath `id`.
std::uint64_t jitter_seed(std::uint64_t base_seed, const std::string& id, std::uint64_t epoch);

}  // namespace ctgaze
