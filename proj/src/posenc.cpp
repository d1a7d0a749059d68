#include "ctgaze/posenc.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ctgaze/error.hpp"

namespace ctgaze {

void PosEncParams::validate() const {
  if (d_model <= 0 || d_model % 6 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "d_model must be a positive multiple of 6, got " + std::to_string(d_model));
  }
  if (!std::isfinite(temperature) || temperature <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be > 0");
  }
  for (int len : axis_lengths) {
    if (len < 1) throw Error(ErrorCode::InvalidArgument, "axis lengths must be >= 1");
  }
}

double omega(int k, int d, double temperature) {
  return std::exp(-static_cast<double>(k) * std::log(temperature) / (d / 2.0));
}

double normalized_position(int index, int length, PositionScale scale) {
  const int denom = scale == PositionScale::endpoint_inclusive ? length - 1 : length;
  if (denom <= 0) return 0.0;
  return 2.0 * std::numbers::pi * index / denom;
}

std::vector<double> encode_axis(double pos, int d, double temperature) {
  if (d <= 0 || d % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "per-axis dimension must be positive and even");
  }
  std::vector<double> out(static_cast<std::size_t>(d));
  for (int k = 0; k < d / 2; ++k) {
    const double a = pos * omega(k, d, temperature);
    out[2 * k] = std::sin(a);
    out[2 * k + 1] = std::cos(a);
  }
  return out;
}

std::vector<double> encode_3d(int x, int y, int z, const PosEncParams& p) {
  p.validate();
  const std::array<int, 3> idx{x, y, z};
  const int d = p.d_model / 3;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.d_model));
  for (int a = 0; a < 3; ++a) {
    if (idx[a] < 0 || idx[a] >= p.axis_lengths[a]) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "axis " + std::to_string(a) + " index " + std::to_string(idx[a]) +
                      " outside [0, " + std::to_string(p.axis_lengths[a]) + ")");
    }
    const auto part =
        encode_axis(normalized_position(idx[a], p.axis_lengths[a], p.scale), d, p.temperature);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<float> encode_lattice(const PosEncParams& p) {
  p.validate();
  const auto [lx, ly, lz] = p.axis_lengths;
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(lx) * ly * lz * p.d_model);
  for (int z = 0; z < lz; ++z) {
    for (int y = 0; y < ly; ++y) {
      for (int x = 0; x < lx; ++x) {
        for (double v : encode_3d(x, y, z, p)) out.push_back(static_cast<float>(v));
      }
    }
  }
  return out;
}

}  // namespace ctgaze
