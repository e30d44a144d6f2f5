#include "dpp/rng.hpp"

namespace dpp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::derive(std::uint64_t master, std::uint64_t index) {
  return RngStream(splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

std::uint64_t RngStream::below(std::uint64_t n) {
  // Reject the incomplete top block so the result is exactly uniform.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace dpp
