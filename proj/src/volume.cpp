#include "ctgaze/volume.hpp"

#include <string>

#include "ctgaze/error.hpp"

namespace ctgaze {

Dims dims_of(const VolumeGeometry& g) { return {g.width(), g.height(), g.depth()}; }

namespace {

void check_dims(const Dims& d) {
  if (d.width < 1 || d.height < 1 || d.depth < 1) {
    throw Error(ErrorCode::InvalidArgument, "volume dims must be >= 1");
  }
}

}  // namespace

template <typename T>
Grid3<T>::Grid3(Dims dims, T fill) : dims_(dims) {
  check_dims(dims_);
  data_.assign(dims_.count(), fill);
}

template <typename T>
Grid3<T>::Grid3(Dims dims, std::vector<T> data) : dims_(dims), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != dims_.count()) {
    throw Error(ErrorCode::DimensionMismatch,
                "payload has " + std::to_string(data_.size()) + " elements, dims need " +
                    std::to_string(dims_.count()));
  }
}

template class Grid3<float>;
template class Grid3<std::uint8_t>;

}  // namespace ctgaze
