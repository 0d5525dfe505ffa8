#ifndef TASEP_DETAIL_RNG_HPP
#define TASEP_DETAIL_RNG_HPP

#include <cmath>
#include <cstdint>

namespace tasep::detail {

// splitmix64: tiny, statistically solid, and trivially splittable, which is
// what per-replica determinism needs.  Replica streams are derived from
// (seed, replica) below, so estimates do not depend on thread layout.
struct splitmix64 {
  std::uint64_t state = 0;
  explicit splitmix64(std::uint64_t s) : state(s) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform in [0,1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Exp(1); uses -log(1-u) with u in [0,1) so the argument never hits 0
  double exponential() { return -std::log1p(-uniform01()); }
  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // multiply-shift; bias is < n/2^64, irrelevant at n <= a few dozen
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(next()) * n) >> 64);
  }
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// counter-based stream derivation: one independent generator per replica
inline splitmix64 replica_stream(std::uint64_t seed, std::uint64_t replica) {
  return splitmix64(mix64(seed ^ mix64(replica * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL)));
}

}  // namespace tasep::detail

#endif
