#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ctgaze {

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream);

/// Seeded generator whose output is identical on every platform:
/// std::mt19937_64 is fully specified, and the uniform/normal/index draws
/// below avoid the implementation-defined std distributions.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via the Marsaglia polar method.
  double normal();
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

template <typename T>
void portable_shuffle(T& items, PortableRng& rng) {
  using std::swap;
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    swap(items[i - 1], items[j]);
  }
}

}  // namespace ctgaze
