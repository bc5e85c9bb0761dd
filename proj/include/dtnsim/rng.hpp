#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dtnsim {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used to derive stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Reproducible random stream.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The library distributions are NOT portable, so every variate is
/// derived here from raw 64-bit outputs:
///   uniform01    top 53 bits / 2^53, in [0, 1)
///   uniform_int  rejection sampling on the raw output (no modulo bias)
///   normal       Box-Muller, cosine branch only, one normal per two uniforms
///   lognormal    exp(normal)
/// Streams for distinct entity categories are seeded with
/// splitmix64(master_seed ^ splitmix64(fnv1a64(category) + index)).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master_seed, std::string_view category, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  double uniform01();
  double uniform(double lo, double hi);
  /// Inclusive on both ends.
  long long uniform_int(long long lo, long long hi);
  double normal(double mean, double stddev);
  /// Normal conditioned on value > lower (rejection; lower must be well inside the bulk).
  double truncated_normal_above(double mean, double stddev, double lower);
  double lognormal(double log_mean, double log_sigma);
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dtnsim
