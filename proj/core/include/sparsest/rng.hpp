#pragma once

#include <cstdint>
#include <limits>

namespace sparsest {

// SplitMix64 output finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterEngine;

/// Names an independent random stream by (seed, stream-id).
///
/// Streams are stateless handles: the same pair always reproduces the same
/// variate sequence, and child() derives further independent streams, so a
/// trial, a measurement row or a noise vector can each own a stream without
/// sharing mutable state.
class RngStream {
 public:
  constexpr explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream() const noexcept { return stream_; }

  constexpr RngStream child(std::uint64_t id) const noexcept {
    return RngStream(seed_, mix64(stream_ ^ mix64(id + 0x632be59bd9b4e019ULL)));
  }

  CounterEngine engine() const noexcept;

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Counter-based 64-bit generator: output k is a keyed hash of k.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random> and
/// Boost.Random distributions.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  constexpr CounterEngine(std::uint64_t key0, std::uint64_t key1) noexcept
      : key0_(key0), key1_(key1) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(mix64(counter_ * 0x9e3779b97f4a7c15ULL + key0_) ^ key1_);
  }

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key0_;
  std::uint64_t key1_;
  std::uint64_t counter_ = 0;
};

inline CounterEngine RngStream::engine() const noexcept {
  return CounterEngine(mix64(seed_ ^ 0xd1b54a32d192ed03ULL),
                       mix64(stream_ + mix64(seed_ + 0x8cb92ba72f3d8dd7ULL)));
}

}  // namespace sparsest
