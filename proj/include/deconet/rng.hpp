#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace deconet {

/// xoshiro256** generator seeded through splitmix64.
///
/// Normals use the Box-Muller transform on two uniforms; the second variate
/// of each pair is cached. Gamma variates use Marsaglia-Tsang.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  double gamma(double shape);
  double beta(double a, double b);

  template <class T>
  void shuffle(std::span<T> v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Seed for a named stream derived from a root seed.
std::uint64_t sub_seed(std::uint64_t root, std::string_view label) noexcept;

}  // namespace deconet
