#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace catsense {

/// splitmix64 finalizer. Used to derive independent stream seeds from a
/// master seed: stream k gets mix(seed + (k+1) * 0x9E3779B97F4A7C15).
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for substream `stream` of master seed `seed`. Fully determines the
/// stream; independent of how many streams run or in which order.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64_mix(seed + stream * 0x9E3779B97F4A7C15ULL);
}

/// Standard normal generator with a fully specified sequence:
/// mt19937_64 -> 53-bit uniforms in (0,1] -> Box-Muller pairs.
/// Identical output for identical seeds on any conforming platform.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // (x >> 11) + 1 in [1, 2^53]; scaled to (0, 2^-53 .. 1].
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace catsense
