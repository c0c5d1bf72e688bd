#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace trendlab::rng {

/// splitmix64 finalizer. Used both as the generator step and for deriving
/// sub-stream seeds, so every random draw in the project is a pure function
/// of a 64-bit seed.
std::uint64_t mix64(std::uint64_t x);

/// Folds a list of values into one seed. Order-sensitive.
std::uint64_t sub_seed(std::initializer_list<std::uint64_t> parts);
std::uint64_t hash_str(const char* s);

/// Small deterministic uniform generator (splitmix64 stream).
///
/// All integer-count draws (poisson, binomial) are implemented by inversion
/// from this stream rather than through <random> distributions, so fixtures
/// are stable across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double next_unit();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Poisson draw by chunked CDF inversion; exact for any mean >= 0.
  std::int64_t poisson(double mean);

  /// Binomial(n, p) by chunked sequential search. Exact and overflow-safe.
  std::int64_t binomial(std::int64_t n, double p);

  /// Standard normal via Box-Muller (two uniforms per call, no caching).
  double gaussian();

  /// Fisher-Yates shuffle of indices 0..n-1.
  std::vector<std::size_t> shuffled_indices(std::size_t n);

  /// k distinct values from 0..n-1, in draw order.
  std::vector<std::size_t> choose(std::size_t n, std::size_t k);

 private:
  std::uint64_t state_;
};

}  // namespace trendlab::rng
