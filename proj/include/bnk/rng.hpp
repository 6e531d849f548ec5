#pragma once

#include <cstdint>
#include <random>

namespace bnk {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Reproducible generator: mt19937_64 seeded from splitmix64(seed ^ mix(stream)).
// Replication r of an experiment with master seed s uses Rng(s, r), so results
// do not depend on the order in which replications are run.
//
// Normal draws use the inverse CDF of a 53-bit uniform (Boost erfc_inv), which
// is fixed across platforms, unlike std::normal_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  // Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace bnk
