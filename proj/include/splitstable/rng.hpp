// rng.hpp
//
// Deterministic random streams: xoshiro256** seeded through splitmix64.
// Substreams are derived from the creation seed and a counter
// (substream_seed below), so stream b of a given master seed is the same
// no matter how much the parent generated or which thread asks first.

#ifndef SPLITSTABLE_RNG_HPP
#define SPLITSTABLE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace splitstable {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of substream `index` of a stream created with `seed`. This is the
// documented splitting rule used by sse_estimate and the simulation
// harness: child = splitmix64(seed XOR (index+1) * golden-ratio step).
constexpr std::uint64_t substream_seed(std::uint64_t seed,
                                       std::uint64_t index) noexcept {
  return splitmix64(seed ^ ((index + 1) * 0x9e3779b97f4a7c15ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      w = splitmix64(s);
      s = w;
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): (i + 1/2) / 2^53.
  double uniform01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unit-rate exponential.
  double exponential() noexcept { return -std::log(uniform01()); }

  // Uniform integer in [0, bound), bound >= 1. Lemire's debiased
  // multiply-shift.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[j], v[i - 1]);
    }
  }

  Rng substream(std::uint64_t index) const noexcept {
    return Rng(substream_seed(seed_, index));
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace splitstable

#endif  // SPLITSTABLE_RNG_HPP
