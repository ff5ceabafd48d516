#pragma once

// Counter-based deterministic random streams.
//
// A stream is a (key, counter) pair; every draw is a pure function of both,
// so identical seeds and call sequences give bit-identical results on every
// platform. Streams split into independent children by hashing a tag into
// the key, which is how a session derives per-position substreams.

#include <cstdint>

namespace tpsim {

namespace detail {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t seed) noexcept
      : key_(detail::mix64(seed + detail::kGolden)) {}

  /// Child stream keyed by `tag`; the parent is not advanced.
  [[nodiscard]] constexpr RngStream split(std::uint64_t tag) const noexcept {
    RngStream child{0};
    child.key_ = detail::mix64(key_ ^ detail::mix64(tag * detail::kGolden + 0x632be59bd9b4e019ULL));
    return child;
  }

  constexpr std::uint64_t next_u64() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed for the `index`-th child of `master` (sessions, replicas).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return RngStream{master}.split(index).next_u64();
}

}  // namespace tpsim
