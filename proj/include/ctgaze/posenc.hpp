#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace ctgaze {

inline constexpr double kDefaultTemperature = 10000.0;

enum class PositionScale {
  endpoint_inclusive,  // index i of L -> 2*pi*i/(L-1), so the last index maps to 2*pi
  endpoint_exclusive,  // index i of L -> 2*pi*i/L
};

struct PosEncParams {
  int d_model = 96;
  double temperature = kDefaultTemperature;
  std::array<int, 3> axis_lengths{16, 16, 16};
  PositionScale scale = PositionScale::endpoint_inclusive;

  void validate() const;
};

/// exp(-k * log(T) / (d/2)).
double omega(int k, int d, double temperature = kDefaultTemperature);

/// Maps an axis index onto [0, 2*pi].
double normalized_position(int index, int length,
                           PositionScale scale = PositionScale::endpoint_inclusive);

/// (sin(pos*w_0), cos(pos*w_0), ..., sin(pos*w_{d/2-1}), cos(pos*w_{d/2-1})).
std::vector<double> encode_axis(double pos, int d, double temperature = kDefaultTemperature);

/// [PE_x(x); PE_y(y); PE_z(z)], each block of length d_model/3.
std::vector<double> encode_3d(int x, int y, int z, const PosEncParams& p);

/// Encodings for every lattice point, x fastest, d_model values per point.
std::vector<float> encode_lattice(const PosEncParams& p);

}  // namespace ctgaze
