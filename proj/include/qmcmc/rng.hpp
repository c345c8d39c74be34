#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qmcmc {

/// SplitMix64 finalizer. Used to derive independent per-instance seeds from
/// one master seed.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of instance `index` under `master`.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

/// Portable random stream.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not, so uniform and Gaussian variates are generated here:
/// uniforms take the top 53 bits, normals use the Box-Muller transform and
/// consume exactly two engine outputs per pair.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean, double stddev) { return mean + stddev * standard_normal(); }

  double standard_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qmcmc
