#pragma once

#include <cmath>
#include <cstdint>

namespace lips::rng {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t id) {
  return mix64(key ^ (0x9E3779B97F4A7C15ull + id * 0xD1342543DE82EF95ull));
}

/// Counter-based stream: a pure function of (key, counter). Streams for
/// distinct id tuples are independent, so draws are reproducible regardless
/// of thread count or evaluation order.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  template <typename... Ids>
  Stream(std::uint64_t master, Ids... ids) : key_(master) {
    ((key_ = derive_key(key_, static_cast<std::uint64_t>(ids))), ...);
  }

  std::uint64_t next_u64() { return mix64(key_ ^ (counter_++ * 0xDA942042E4DD58B5ull)); }

  /// uniform on (0,1), never exactly 0 or 1
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// standard normal via Box-Muller (two uniforms per draw)
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// stream id tags, one per consumer of randomness
enum class Tag : std::uint64_t {
  design = 1,
  response = 2,
  particle = 3,
  mc3 = 4,
  prior_sim = 5,
  split = 6,
};

template <typename... Ids>
inline Stream substream(std::uint64_t master, Tag tag, Ids... ids) {
  return Stream(master, static_cast<std::uint64_t>(tag), ids...);
}

}  // namespace lips::rng
