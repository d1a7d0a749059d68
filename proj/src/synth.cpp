#include "ctgaze/synth.hpp"

#include <algorithm>
#include <cmath>

#include "ctgaze/error.hpp"
#include "ctgaze/rng.hpp"

namespace ctgaze {

void validate(const Fixation2D& f, const std::string& where) {
  auto bad = [](double v) { return !std::isfinite(v) || v < 0.0 || v > 1.0; };
  if (bad(f.x)) throw Error(ErrorCode::InvariantViolation, where + ".x out of [0,1]");
  if (bad(f.y)) throw Error(ErrorCode::InvariantViolation, where + ".y out of [0,1]");
  if (!std::isfinite(f.t) || f.t <= 0.0) {
    throw Error(ErrorCode::InvariantViolation, where + ".t must be > 0");
  }
}

Scanpath lift_2d_to_3d(const std::string& id, const std::vector<Fixation2D>& fixations) {
  std::vector<Fixation> out;
  out.reserve(fixations.size());
  for (std::size_t i = 0; i < fixations.size(); ++i) {
    const auto& f = fixations[i];
    validate(f, "fixations[" + std::to_string(i) + "]");
    out.push_back({1.0 - f.x, 0.5, f.y, f.t});
  }
  return Scanpath(id, std::move(out));
}

Scanpath jitter(const Scanpath& sp, const VolumeGeometry& g, const JitterParams& p) {
  if (!std::isfinite(p.sigma_deg) || p.sigma_deg < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "jitter sigma must be >= 0");
  }
  if (p.sigma_deg == 0.0) return sp;
  const double sigma_vox = p.sigma_deg * p.pixels_per_degree;
  // Normalized units per voxel along each axis; a 1-voxel axis has no room to move.
  const double sx = g.width() > 1 ? sigma_vox / (g.width() - 1) : 0.0;
  const double sy = g.height() > 1 ? sigma_vox / (g.height() - 1) : 0.0;
  PortableRng rng(p.seed);
  std::vector<Fixation> out = sp.fixations();
  for (auto& f : out) {
    const double nx = rng.normal();
    const double ny = rng.normal();
    f.x = std::clamp(f.x + sx * nx, 0.0, 1.0);
    f.y = std::clamp(f.y + sy * ny, 0.0, 1.0);
  }
  return Scanpath(sp.id(), std::move(out));
}

std::uint64_t jitter_seed(std::uint64_t base_seed, const std::string& id, std::uint64_t epoch) {
  return mix_seed(mix_seed(base_seed, id), epoch);
}

}  // namespace ctgaze
