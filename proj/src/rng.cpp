#include "dtnsim/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dtnsim/error.hpp"

namespace dtnsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::string_view category, std::uint64_t index)
    : engine_(splitmix64(master_seed ^ splitmix64(fnv1a64(category) + index))) {}

double RandomStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

long long RandomStream::uniform_int(long long lo, long long hi) {
  if (lo > hi) throw Error(ErrorCode::kInvalidParameter, "uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == std::numeric_limits<std::uint64_t>::max()) return static_cast<long long>(engine_());
  const std::uint64_t n = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return lo + static_cast<long long>(x % n);
}

double RandomStream::normal(double mean, double stddev) {
  // 1 - u keeps the log argument in (0, 1].
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

double RandomStream::truncated_normal_above(double mean, double stddev, double lower) {
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    double x = normal(mean, stddev);
    if (x > lower) return x;
  }
  throw Error(ErrorCode::kInvalidParameter, "truncated normal: acceptance region too small");
}

double RandomStream::lognormal(double log_mean, double log_sigma) {
  return std::exp(normal(log_mean, log_sigma));
}

bool RandomStream::bernoulli(double p) {
  return uniform01() < p;
}

}  // namespace dtnsim
