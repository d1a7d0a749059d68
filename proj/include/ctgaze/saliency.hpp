#pragma once

#include <cstddef>

#include "ctgaze/core.hpp"
#include "ctgaze/kernels.hpp"
#include "ctgaze/volume.hpp"

namespace ctgaze {

using kernels::Exec;

/// Regularizer of the KL divergence, the float64 machine epsilon to 4 digits.
inline constexpr double kKlEpsilon = 2.2204e-16;

inline constexpr double kDefaultSigmaXyDeg = 1.0;
inline constexpr double kDefaultSigmaZSlices = 1.0;

/// Binary map with a 1 at the rounded (and clamped) voxel of every fixation.
FixationVolume fixation_volume(const Scanpath& sp, const VolumeGeometry& g);

/// Sum of anisotropic Gaussians, one per fixation, rescaled to peak 1.
/// In-plane sigma is sigma_xy_deg * pixels_per_degree voxels, depth sigma is
/// sigma_z_slices voxels (0 keeps each blob in its own slice). Durations do
/// not weight the blobs.
ScalarVolume render_saliency(const Scanpath& sp, const VolumeGeometry& g,
                             double sigma_xy_deg = kDefaultSigmaXyDeg,
                             double sigma_z_slices = kDefaultSigmaZSlices,
                             Exec exec = Exec::parallel);

/// Pearson correlation of the two standardized volumes.
double cc(const ScalarVolume& s, const ScalarVolume& q, Exec exec = Exec::parallel);
double cc(const ScalarVolume& s, const FixationVolume& g, Exec exec = Exec::parallel);

/// Normalized scanpath saliency. `n_fixations` is the length of the scanpath
/// that produced `g`, so repeated voxels lower the score.
double nss(const ScalarVolume& s, const FixationVolume& g, std::size_t n_fixations,
           Exec exec = Exec::parallel);

/// KL divergence of the fixation distribution from the saliency distribution.
double kldiv(const ScalarVolume& s, const FixationVolume& g, Exec exec = Exec::parallel);
/// Same, against a real-valued (e.g. pre-blurred) reference.
double kldiv(const ScalarVolume& s, const ScalarVolume& reference, Exec exec = Exec::parallel);

}  // namespace ctgaze
