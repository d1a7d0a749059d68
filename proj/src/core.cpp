#include "ctgaze/core.hpp"

#include <cmath>
#include <sstream>

#include "ctgaze/error.hpp"

namespace ctgaze {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void validate(const Fixation& f, const std::string& where) {
  auto fail = [&](const char* field, double v) {
    std::ostringstream os;
    os.precision(17);
    os << where << "." << field << " = " << v;
    throw Error(ErrorCode::InvariantViolation, os.str());
  };
  if (!in_unit(f.x)) fail("x", f.x);
  if (!in_unit(f.y)) fail("y", f.y);
  if (!in_unit(f.z)) fail("z", f.z);
  if (!std::isfinite(f.t) || f.t <= 0.0) fail("t", f.t);
}

Scanpath::Scanpath(std::string id, std::vector<Fixation> fixations)
    : id_(std::move(id)), fixations_(std::move(fixations)) {
  if (fixations_.empty()) {
    throw Error(ErrorCode::InvariantViolation, "scanpath '" + id_ + "' has no fixations");
  }
  for (std::size_t i = 0; i < fixations_.size(); ++i) {
    validate(fixations_[i], "fixations[" + std::to_string(i) + "]");
  }
}

double Scanpath::total_duration() const {
  double total = 0.0;
  for (const auto& f : fixations_) total += f.t;
  return total;
}

VolumeGeometry::VolumeGeometry(int width, int height, int depth, double pixels_per_degree)
    : width_(width), height_(height), depth_(depth), ppd_(pixels_per_degree) {
  if (width < 1 || height < 1 || depth < 1) {
    throw Error(ErrorCode::InvariantViolation,
                "volume dims must be >= 1, got " + std::to_string(width) + "x" +
                    std::to_string(height) + "x" + std::to_string(depth));
  }
  if (!std::isfinite(pixels_per_degree) || pixels_per_degree <= 0.0) {
    throw Error(ErrorCode::InvariantViolation, "pixels_per_degree must be > 0");
  }
}

VoxelPoint to_voxel(const Fixation& f, const VolumeGeometry& g) {
  return {f.x * (g.width() - 1), f.y * (g.height() - 1), f.z * (g.depth() - 1), f.t};
}

std::vector<VoxelPoint> to_voxel_space(const Scanpath& sp, const VolumeGeometry& g) {
  std::vector<VoxelPoint> out;
  out.reserve(sp.size());
  for (const auto& f : sp.fixations()) out.push_back(to_voxel(f, g));
  return out;
}

std::vector<Saccade> saccades(const Scanpath& sp, const VolumeGeometry& g) {
  if (sp.size() < 2) {
    throw Error(ErrorCode::ScanpathTooShort,
                "scanpath '" + sp.id() + "' needs >= 2 fixations for saccades");
  }
  const auto pts = to_voxel_space(sp, g);
  std::vector<Saccade> out;
  out.reserve(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Saccade s;
    s.dx = pts[i + 1].x - pts[i].x;
    s.dy = pts[i + 1].y - pts[i].y;
    s.dz = pts[i + 1].z - pts[i].z;
    s.amplitude = std::sqrt(s.dx * s.dx + s.dy * s.dy + s.dz * s.dz);
    s.source_index = i;
    s.target_index = i + 1;
    out.push_back(s);
  }
  return out;
}

double diagonal(const VolumeGeometry& g) {
  const double w = g.width(), h = g.height(), d = g.depth();
  return std::sqrt(w * w + h * h + d * d);
}

double distance(const VoxelPoint& a, const VoxelPoint& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace ctgaze
