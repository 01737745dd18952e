#pragma once
// Deterministic randomness. Every sampling routine in the library draws from
// the xoshiro256++ engine below, seeded through a fixed splitmix64 derivation,
// so results are bit-reproducible across platforms and thread schedules.
//
// Seed derivation contract (fixed; never change silently):
//   derive_seed(base, index) = splitmix64_mix(base ^ splitmix64_mix(index))
//   per-trace seed = derive_seed(master_seed, trace_index)
//   per-stage seed = derive_seed(trace_seed,  stage_index)
// Harness-level derivations (trials, sweep cells, probes) chain the same
// function on their own counters.

#include <cmath>
#include <cstdint>

namespace tracekit {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64_mix(base ^ splitmix64_mix(index));
}

// xoshiro256++ (Blackman & Vigna), state expanded from the seed by splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      w = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0, 1), 53-bit resolution
  double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bit() noexcept { return (next_u64() >> 63) != 0; }

  bool bernoulli(double p) noexcept { return next_double() < p; }

  // Geometric on {1,2,...} with P(G = l) = (1-beta) * beta^(l-1), sampled by
  // inverting the CDF on a single uniform variate.
  std::int64_t geometric_from_beta(double beta) noexcept {
    if (beta <= 0.0) return 1;
    const double u = next_double();
    const double g = std::floor(std::log1p(-u) / std::log(beta));
    return 1 + static_cast<std::int64_t>(g < 0.0 ? 0.0 : g);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace tracekit
