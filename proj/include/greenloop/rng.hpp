// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GREENLOOP_RNG_HPP_
#define GREENLOOP_RNG_HPP_

#include <cstdint>
#include <random>

namespace greenloop {

// Seeded generator with platform-independent derived distributions. The
// standard library's distribution objects are implementation-defined, so
// every variate used by the simulators is derived here from raw 64-bit draws.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_index(uint64_t n);

  // Standard normal (Box-Muller, no cached second variate).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a stream index so independent consumers of one
// scenario seed do not share a sequence.
uint64_t derive_seed(uint64_t base, uint64_t stream);

}  // namespace greenloop

#endif  // GREENLOOP_RNG_HPP_
