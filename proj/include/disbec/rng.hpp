#ifndef DISBEC_RNG_HPP
#define DISBEC_RNG_HPP

#include <cmath>
#include <cstdint>

namespace disbec {

// SplitMix64 finalizer: bijective on 64-bit words, decorrelates counters.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: the k-th output of stream (seed, stream) is a
// pure function of (seed, stream, k), so parallel workers can draw from
// disjoint streams without sharing state and replays are exact.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (0x9e3779b97f4a7c15ULL * stream))) {}

  // Equivalent to the sequential SplitMix64 stream seeded with key_, but
  // addressable by counter.
  std::uint64_t next_u64() {
    return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++);
  }

  // Uniform on (0,1), endpoints excluded.
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  // Exponential with rate nu (mean 1/nu).
  double next_exponential(double nu) { return -std::log(next_double()) / nu; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace disbec

#endif  // DISBEC_RNG_HPP
