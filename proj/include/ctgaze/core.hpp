#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ctgaze {

/// A gaze dwell. Coordinates are normalized to the volume extent
/// (x = width, y = height, z = depth/slice), duration in milliseconds.
struct Fixation {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 1.0;

  bool operator==(const Fixation&) const = default;
};

/// Throws InvariantViolation naming `where` if f is out of range.
void validate(const Fixation& f, const std::string& where = "fixation");

/// Ordered, non-empty fixation sequence. Immutable once built.
class Scanpath {
 public:
  Scanpath(std::string id, std::vector<Fixation> fixations);

  const std::string& id() const noexcept { return id_; }
  const std::vector<Fixation>& fixations() const noexcept { return fixations_; }
  std::size_t size() const noexcept { return fixations_.size(); }
  const Fixation& operator[](std::size_t i) const { return fixations_[i]; }
  double total_duration() const;

  bool operator==(const Scanpath&) const = default;

 private:
  std::string id_;
  std::vector<Fixation> fixations_;
};

/// Voxel grid extent plus the in-plane visual-angle scale.
class VolumeGeometry {
 public:
  VolumeGeometry(int width, int height, int depth, double pixels_per_degree);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int depth() const noexcept { return depth_; }
  double pixels_per_degree() const noexcept { return ppd_; }
  std::size_t voxel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_ * depth_;
  }

  bool operator==(const VolumeGeometry&) const = default;

 private:
  int width_;
  int height_;
  int depth_;
  double ppd_;
};

struct VoxelPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;
};

struct Saccade {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double amplitude = 0.0;
  std::size_t source_index = 0;
  std::size_t target_index = 0;
};

/// Maps x -> x*(W-1), y -> y*(H-1), z -> z*(D-1); durations unchanged.
VoxelPoint to_voxel(const Fixation& f, const VolumeGeometry& g);
std::vector<VoxelPoint> to_voxel_space(const Scanpath& sp, const VolumeGeometry& g);

/// N-1 displacement vectors in voxel space. Throws ScanpathTooShort for N < 2.
std::vector<Saccade> saccades(const Scanpath& sp, const VolumeGeometry& g);

/// sqrt(W^2 + H^2 + D^2).
double diagonal(const VolumeGeometry& g);

double distance(const VoxelPoint& a, const VoxelPoint& b);

}  // namespace ctgaze
