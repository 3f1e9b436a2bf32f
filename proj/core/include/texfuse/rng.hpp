#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace texfuse {

// splitmix64 finalizer, used to derive stream seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic per-stage seed: mixes the master seed with a stage tag and a
// running index so every consumer draws from an independent stream.
inline std::uint64_t seed_for(std::uint64_t master, std::uint64_t stage_tag,
                              std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(stage_tag)) + index);
}

// Stage tags. Arbitrary fixed constants, one per consumer of randomness.
namespace seed_tag {
inline constexpr std::uint64_t synth = 0x53594e5448ull;       // "SYNTH"
inline constexpr std::uint64_t split = 0x53504c4954ull;       // "SPLIT"
inline constexpr std::uint64_t nn_init = 0x4e4e494e49ull;     // "NNINI"
inline constexpr std::uint64_t repeat = 0x5245504541ull;      // "REPEA"
inline constexpr std::uint64_t dataset = 0x4441544153ull;     // "DATAS"
}  // namespace seed_tag

// All randomness in the library flows through this wrapper so that results
// are reproducible across platforms. mt19937_64 is seeded directly; uniforms
// take the top 53 bits; gaussians use Box-Muller with a cached spare.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, n) by rejection, bias-free.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace texfuse
