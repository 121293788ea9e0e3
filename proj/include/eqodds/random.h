#ifndef EQODDS_RANDOM_H_
#define EQODDS_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace eqodds {

// Seeded random stream. The engine is std::mt19937_64; the value transforms
// below are written out explicitly so that streams are reproducible across
// standard library implementations (std::*_distribution output is not
// portable).
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Independent stream for a named subsystem. Derivation is a pure function of
  // (seed, name, index).
  static Rng Derive(uint64_t seed, std::string_view name, uint64_t index = 0);

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);

  bool Bernoulli(double p) { return Uniform() < p; }
  double Normal();
  // Standard logistic variate.
  double Logistic();
  uint64_t Poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

uint64_t SplitMix64(uint64_t x);

}  // namespace eqodds

#endif  // EQODDS_RANDOM_H_
