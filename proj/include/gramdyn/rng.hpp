#pragma once

#include <cstdint>
#include <boost/random/mersenne_twister.hpp>
#include <span>
#include <utility>

namespace gramdyn {

// Derives the seed of an independent sub-stream. Ensembles seed member i
// with derive_seed(seed, i), so results do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Rng split(std::uint64_t stream) { return Rng(derive_seed(engine_(), stream)); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Two uniforms on [0, 1) with 32 random bits each, from one engine draw.
  std::pair<double, double> uniform_pair() {
    const std::uint64_t x = engine_();
    return {static_cast<double>(x >> 32) * 0x1.0p-32,
            static_cast<double>(x & 0xffffffffu) * 0x1.0p-32};
  }

  // Index drawn from a probability vector (weights summing to 1).
  std::size_t pick(std::span<const double> weights) { return pick_with(uniform(), weights); }

  // Same, driven by a caller-supplied uniform u.
  static std::size_t pick_with(double u, std::span<const double> weights) {
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last = i;
      if (u < acc) return i;
    }
    // Rounding left acc a hair below 1.
    return last;
  }

 private:
  // Same sequence as std::mt19937_64, generated faster.
  boost::random::mt19937_64 engine_;
};

}  // namespace gramdyn
