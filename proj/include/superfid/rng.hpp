#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace superfid {

// splitmix64 mixing step
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream-splitting rule used everywhere a (seed, index...) pair needs its own
// independent generator: seed XOR splitmix64-mixed indices. Deterministic and
// order-independent, so concurrent trials reproduce bit-for-bit.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(base ^ splitmix64(a ^ splitmix64(b)));
}

// uniform double in [0, 1), 53-bit resolution, fixed u64 -> double mapping
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// uniform double in [-1, 1)
inline double uniform_pm1(std::mt19937_64& gen) {
  return 2.0 * uniform01(gen) - 1.0;
}

// Standard-normal sampler over mt19937_64 via Box-Muller. std::mt19937_64 is
// fully specified by the standard and the transform below is explicit, unlike
// std::normal_distribution, whose algorithm is implementation-defined.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

  double sample() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform01(gen_);
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double sample(double stddev) { return stddev * sample(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace superfid
