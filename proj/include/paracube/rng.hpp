#pragma once

#include <cstdint>

namespace paracube {

/// Counter-based generator: draw k of stream s under seed is a pure hash of
/// (seed, s, k), so any scheduling of streams reproduces the same numbers.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0) noexcept
      : key_(mix(seed ^ mix(stream_id + 0x632be59bd9b4e019ULL))), stream_(stream_id),
        counter_(counter) {}

  std::uint64_t stream_id() const noexcept { return stream_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // splitmix64 finaliser
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_;
};

}  // namespace paracube
