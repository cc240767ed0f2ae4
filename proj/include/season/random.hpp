#ifndef SEASON_RANDOM_HPP
#define SEASON_RANDOM_HPP

#include <cstdint>
#include <random>

#include "season/common.hpp"

namespace season {

/// splitmix64 finaliser; used to derive independent child seeds.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator. Distributions are implemented here rather than through
/// <random> distribution objects so streams are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Rng split(std::uint64_t stream) const { return Rng(split_seed(seed_of_state(), stream)); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u = 0.0;
    while (u == 0.0) u = uniform();
    return u;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  Point normal_vector(std::size_t dim) {
    Point z(dim);
    for (auto& x : z) x = normal();
    return z;
  }

  /// Rademacher sign.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  /// Index drawn from a categorical distribution.
  std::size_t categorical(std::span<const double> weights) {
    const double u = uniform();
    double c = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      c += weights[i];
      if (u < c) return i;
    }
    return weights.size() - 1;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_of_state() const {
    std::mt19937_64 copy = engine_;
    return copy();
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace season

#endif  // SEASON_RANDOM_HPP
