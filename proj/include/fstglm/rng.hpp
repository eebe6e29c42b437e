#pragma once

#include <cstdint>
#include <string_view>

namespace fstglm {

// Counter-based generator: the i-th output of stream (seed, key) is
// splitmix64(splitmix64(seed ^ key) + i * 0x9E3779B97F4A7C15). Outputs depend
// only on (seed, key, i), so results are reproducible across platforms and
// independent of how many draws other streams consumed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream);
  CounterRng(std::uint64_t seed, std::uint64_t stream_key);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via the Box-Muller transform (pairs are cached).
  double normal();
  /// Gamma(shape, scale) via Marsaglia-Tsang squeeze.
  double gamma(double shape, double scale);

  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix(std::uint64_t x);
  static std::uint64_t stream_key(std::string_view name);

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace fstglm
