#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A (key, counter) pair fully
// determines the output, so independent substreams are derived from (seed, stream index)
// without any shared state between workers.

#include <array>
#include <cstdint>
#include <limits>

namespace photocorr {

/// Purpose tags keep substreams used for different jobs disjoint under the same seed.
enum class StreamPurpose : std::uint32_t { trajectory = 1, thinning = 2, bootstrap = 3 };

class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(Key key, Counter counter) noexcept : key_(key), counter_(counter) {}

  /// Substream `index` of `seed` for the given purpose.
  static Philox4x32 substream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t index) noexcept;

  /// One application of the 10-round bijection.
  static Counter block(Counter counter, Key key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in the open interval (0, 1), 53 random bits.
  double uniform_open() noexcept;

 private:
  void refill() noexcept;

  Key key_;
  Counter counter_;
  Counter buffer_{};
  int next_ = 4;
};

}  // namespace photocorr
