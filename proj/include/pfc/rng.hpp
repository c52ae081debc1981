#ifndef PFC_RNG_HPP
#define PFC_RNG_HPP

#include <cstdint>
#include <random>

#include "pfc/constants.hpp"
#include "pfc/vec3.hpp"

namespace pfc {

// splitmix64, used to decorrelate per-trajectory seeds derived from a
// master seed. Output for a fixed input is part of the reproducibility
// contract, so this stays hand-rolled rather than implementation-defined.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Deterministic RNG stream. The engine is std::mt19937_64 but all
// distributions are hand-rolled so the draw sequence is fixed by this
// header, not by the standard library vendor.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // Independent stream i of a master seed (trajectory / sweep-point streams).
  static Rng stream(uint64_t master_seed, uint64_t index) {
    return Rng(splitmix64(splitmix64(master_seed) ^ (index + 1)));
  }

  // uniform in [0, 1)
  double uniform() {
    return (eng_() >> 11) * 0x1.0p-53;
  }

  // standard normal, Box-Muller (one value per call, no cached spare)
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  double exponential(double mean) {
    return -mean * std::log(1.0 - uniform());
  }

  // Poisson deviate, exact. Knuth's product method, chunked so large means
  // never underflow exp(-mean).
  long poisson(double mean) {
    long total = 0;
    while (mean > 30.0) {
      total += poisson_small(30.0);
      mean -= 30.0;
    }
    return total + poisson_small(mean);
  }

  // uniformly distributed unit vector (Marsaglia's method)
  Vec3 isotropic_dir() {
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = 2.0 * std::sqrt(1.0 - s);
    return {u * f, v * f, 1.0 - 2.0 * s};
  }

 private:
  long poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  std::mt19937_64 eng_;
};

}  // namespace pfc

#endif
