#pragma once

#include <cstdint>
#include <string_view>

namespace splearn {

/// Derives an independent stream seed from a base seed, a stream name and an
/// index. All randomness in a run flows from one base seed through named
/// substreams ("split", "policy", "oracle", "sampler") so that replications
/// are reproducible and independent components never share a stream.
std::uint64_t substream_seed(std::uint64_t base, std::string_view stream,
                             std::uint64_t index = 0);

/// Counter-based generator (xoshiro-free, splitmix64 core) with explicitly
/// implemented variate transforms. The standard library distributions are
/// implementation-defined, which would make recorded runs non-portable; these
/// are fixed algorithms, deterministic for a given seed on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform01();

  /// Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  /// Gamma(shape, rate) in the shape-rate convention: mean = shape / rate.
  /// Marsaglia-Tsang squeeze for shape >= 1, Kundu-Gupta boost otherwise.
  double gamma(double shape, double rate);

 private:
  std::uint64_t state_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace splearn
