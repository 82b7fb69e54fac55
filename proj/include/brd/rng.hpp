#pragma once

#include <cstdint>
#include <limits>

// Seeded random number generation with reproducible substreams.
//
// Every random draw in the library comes from an xoshiro256++ generator whose
// state is derived from a (master_seed, batch, game, purpose) tuple, so results
// are independent of thread count and scheduling. The derivation is part of
// the reproducibility contract and is documented field by field below; it must
// not change between releases without bumping the output schema version.

namespace brd {

// SplitMix64 finalizer (Stafford's Mix13 variant, the one used by the xoshiro
// reference seeding routine).
constexpr inline std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// SplitMix64 stream; advances by the golden-ratio increment.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256++ (Blackman & Vigna). Period 2^256 - 1.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, bound). Lemire's multiply-shift with
  // rejection; exact uniformity matters for the chi-square tests downstream.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Purpose tags separating the independent random streams used within one
// (batch, game) cell. Values are frozen; they enter the stream derivation.
enum class StreamPurpose : std::uint64_t {
  payoffs = 1,   // payoff tensor entries
  table = 2,     // direct best-response table entries
  initial = 3,   // initial action profile
  sequence = 4,  // random playing sequence draws
  walk = 5,      // clockwork random walk draws
};

// Coordinates of one reproducible substream.
//
// Bit-exact derivation of the generator seed:
//   s0 = splitmix64_mix(master ^ (0x9E3779B97F4A7C15 * (batch + 1)))
//   s1 = splitmix64_mix(s0     ^ (0xC2B2AE3D27D4EB4F * (game + 1)))
//   s2 = splitmix64_mix(s1     ^ (0x165667B19E3779F9 * (purpose + 1)))
// s2 seeds xoshiro256++ via the SplitMix64 state-fill above. Distinct tuples
// give statistically independent streams; identical tuples give identical
// streams regardless of execution order.
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint64_t batch = 0;
  std::uint64_t game = 0;
  StreamPurpose purpose = StreamPurpose::table;

  constexpr std::uint64_t stream_seed() const noexcept {
    std::uint64_t s = master;
    s = splitmix64_mix(s ^ (0x9E3779B97F4A7C15ULL * (batch + 1)));
    s = splitmix64_mix(s ^ (0xC2B2AE3D27D4EB4FULL * (game + 1)));
    s = splitmix64_mix(
        s ^ (0x165667B19E3779F9ULL *
             (static_cast<std::uint64_t>(purpose) + 1)));
    return s;
  }

  Xoshiro256pp make_rng() const noexcept { return Xoshiro256pp(stream_seed()); }

  SeedSpec with_purpose(StreamPurpose p) const noexcept {
    SeedSpec out = *this;
    out.purpose = p;
    return out;
  }
};

}  // namespace brd
