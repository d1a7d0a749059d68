#include "ctgaze/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "ctgaze/error.hpp"

namespace ctgaze {

namespace {

int nearest_index(double v, int extent) {
  return std::clamp(static_cast<int>(std::lround(v)), 0, extent - 1);
}

void require_same_dims(const Dims& a, const Dims& b) {
  if (!(a == b)) {
    auto str = [](const Dims& d) {
      return std::to_string(d.width) + "x" + std::to_string(d.height) + "x" +
             std::to_string(d.depth);
    };
    throw Error(ErrorCode::DimensionMismatch, str(a) + " vs " + str(b));
  }
}

void require_finite(const kernels::Summary& s, const char* what) {
  if (!std::isfinite(s.sum) || !std::isfinite(s.min) || !std::isfinite(s.max)) {
    throw Error(ErrorCode::NonFinite, std::string(what) + " contains non-finite values");
  }
}

template <typename Q>
double cc_impl(const ScalarVolume& s, const Grid3<Q>& q, Exec exec) {
  require_same_dims(s.dims(), q.dims());
  const auto sv = s.values();
  const auto qv = q.values();
  const auto ss = kernels::summarize(sv, exec);
  const auto qs = kernels::summarize(qv, exec);
  require_finite(ss, "saliency volume");
  require_finite(qs, "reference volume");
  const double n = static_cast<double>(sv.size());
  const double mean_s = ss.sum / n;
  const double mean_q = qs.sum / n;
  const double var_s = kernels::centered_sq(sv, mean_s, exec);
  const double var_q = kernels::centered_sq(qv, mean_q, exec);
  if (ss.min == ss.max || var_s <= 0.0) {
    throw Error(ErrorCode::ZeroVariance, "saliency volume is constant");
  }
  if (qs.min == qs.max || var_q <= 0.0) {
    throw Error(ErrorCode::ZeroVariance, "reference volume is constant");
  }
  // The 1/sigma factors of the standardization cancel between numerator and
  // denominator; only the centered sums are needed.
  const double cross = kernels::centered_cross(sv, mean_s, qv, mean_q, exec);
  const double r = cross / std::sqrt(var_s * var_q);
  return std::clamp(r, -1.0, 1.0);
}

template <typename G>
double kldiv_impl(const ScalarVolume& s, const Grid3<G>& g, Exec exec) {
  require_same_dims(s.dims(), g.dims());
  const auto ss = kernels::summarize(s.values(), exec);
  const auto gs = kernels::summarize(g.values(), exec);
  require_finite(ss, "saliency volume");
  require_finite(gs, "reference volume");
  if (ss.min < 0.0 || gs.min < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "KL divergence needs nonnegative volumes");
  }
  if (ss.sum <= 0.0) throw Error(ErrorCode::EmptyDistribution, "saliency volume sums to 0");
  if (gs.sum <= 0.0) throw Error(ErrorCode::EmptyDistribution, "reference volume sums to 0");
  return kernels::kl_terms(s.values(), ss.sum, g.values(), gs.sum, kKlEpsilon, exec);
}

}  // namespace

FixationVolume fixation_volume(const Scanpath& sp, const VolumeGeometry& g) {
  FixationVolume out(dims_of(g), 0);
  for (const auto& p : to_voxel_space(sp, g)) {
    out.at(nearest_index(p.x, g.width()), nearest_index(p.y, g.height()),
           nearest_index(p.z, g.depth())) = 1;
  }
  return out;
}

ScalarVolume render_saliency(const Scanpath& sp, const VolumeGeometry& g, double sigma_xy_deg,
                             double sigma_z_slices, Exec exec) {
  if (!std::isfinite(sigma_xy_deg) || sigma_xy_deg <= 0.0) {
    throw Error(ErrorCode::InvalidSigma, "sigma_xy_deg must be > 0");
  }
  if (!std::isfinite(sigma_z_slices) || sigma_z_slices < 0.0) {
    throw Error(ErrorCode::InvalidSigma, "sigma_z_slices must be >= 0");
  }
  const Dims dims = dims_of(g);
  const double sigma_xy = sigma_xy_deg * g.pixels_per_degree();
  std::vector<kernels::Blob> blobs;
  blobs.reserve(sp.size());
  for (const auto& p : to_voxel_space(sp, g)) {
    blobs.push_back(kernels::make_blob(p, dims, sigma_xy, sigma_xy, sigma_z_slices));
  }
  ScalarVolume out(dims, 0.0f);
  kernels::splat(blobs, out, exec);
  const auto summary = kernels::summarize(std::span<const float>(out.values()), exec);
  if (summary.max > 0.0) {
    kernels::divide(out.values(), static_cast<float>(summary.max), exec);
  }
  return out;
}

double cc(const ScalarVolume& s, const ScalarVolume& q, Exec exec) { return cc_impl(s, q, exec); }

double cc(const ScalarVolume& s, const FixationVolume& g, Exec exec) {
  return cc_impl(s, g, exec);
}

double nss(const ScalarVolume& s, const FixationVolume& g, std::size_t n_fixations,
           Exec exec) {
  require_same_dims(s.dims(), g.dims());
  if (n_fixations == 0) throw Error(ErrorCode::NoFixations, "fixation count is 0");
  const auto sv = s.values();
  const auto ss = kernels::summarize(sv, exec);
  require_finite(ss, "saliency volume");
  const auto hit = kernels::masked_sum(sv, g.values(), exec);
  if (hit.count == 0) throw Error(ErrorCode::NoFixations, "fixation volume is all zeros");

  // S~ = S / max(S) unless max(S) == 0.
  const double norm = ss.max != 0.0 ? ss.max : 1.0;
  const double n = static_cast<double>(sv.size());
  const double mean = ss.sum / norm / n;
  const double var = kernels::centered_sq(sv, mean * norm, exec) / (norm * norm) / n;
  const double sigma = std::sqrt(var);
  const double hit_sum = hit.sum / norm;
  const double count = static_cast<double>(hit.count);
  // S^ = (S~ - mu) / sigma unless sigma == 0, then S^ = S~.
  const double total = (ss.min == ss.max || sigma == 0.0) ? hit_sum : (hit_sum - count * mean) / sigma;
  return total / static_cast<double>(n_fixations);
}

double kldiv(const ScalarVolume& s, const FixationVolume& g, Exec exec) {
  return kldiv_impl(s, g, exec);
}

double kldiv(const ScalarVolume& s, const ScalarVolume& reference, Exec exec) {
  return kldiv_impl(s, reference, exec);
}

}  // namespace ctgaze
