#pragma once

#include <cstdint>

namespace ludo {

// Counter-based generator (splitmix64 over a Weyl sequence). Streams derived
// from the same seed are independent, which keeps multi-chain runs
// reproducible regardless of scheduling. All variate transforms are
// implemented here rather than via <random> distributions, whose outputs are
// not pinned down by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on (0,1), never returning an exact endpoint.
  double uniform();
  // Uniform on [0, n).
  std::uint64_t uniform_below(std::uint64_t n);
  double normal();
  double exponential();
  // Marsaglia-Tsang; requires shape > 0. Unit scale.
  double gamma(double shape);
  double beta(double a, double b);

 private:
  std::uint64_t state_;
};

}  // namespace ludo
