#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace dpp {

// Seeded random stream. Child streams are derived by hashing the parent
// seed with an index, so any (seed, index path) reproduces the same draws
// regardless of scheduling.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  // Stream for work item `index` under `master`.
  static RngStream derive(std::uint64_t master, std::uint64_t index);
  RngStream child(std::uint64_t index) const { return derive(seed_, index); }

  std::uint64_t seed() const { return seed_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dpp
