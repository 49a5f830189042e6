#ifndef TAILIDX_RNG_HPP
#define TAILIDX_RNG_HPP

#include <cstdint>
#include <string_view>

namespace tailidx {

// Counter-based uniform generator: draw i of stream `key` is the SplitMix64
// finalizer applied to key + (i+1) * golden-gamma. Any draw can be computed
// in isolation, so replication r of an experiment does not depend on how
// many other replications ran or in what order.
inline constexpr std::string_view kGeneratorName = "splitmix64-counter/1";

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream key for (seed, a, b), e.g. (seed, cell hash, replication index).
inline constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a,
                                          std::uint64_t b = 0) {
  return mix64(mix64(seed ^ mix64(a + 0x632BE59BD9B4E019ULL)) + mix64(b + 0x8CB92BA72F3D8DD7ULL));
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t bits(std::uint64_t i) const {
    return mix64(key_ + (i + 1) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on the open interval (0, 1): (m + 1/2) 2^-53, m in [0, 2^53).
  constexpr double uniform(std::uint64_t i) const {
    return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace tailidx

#endif  // TAILIDX_RNG_HPP
