#include "trendlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace trendlab::rng {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x8C9B8B3E73A6D1C5ULL;
  for (std::uint64_t p : parts) {
    h = mix64(h ^ p);
  }
  return h;
}

std::uint64_t hash_str(const char* s) {
  // FNV-1a 64.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (; *s != '\0'; ++s) {
    h ^= static_cast<unsigned char>(*s);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  // Multiply-shift mapping; bias is < 2^-64 * n, negligible at these ranges.
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

std::int64_t Rng::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean)) {
    throw std::invalid_argument("Rng::poisson: mean must be finite and >= 0");
  }
  // Split large means into chunks small enough that exp(-chunk) stays far
  // from the underflow threshold, then invert each chunk by Knuth's product
  // method. Sum of independent Poissons is Poisson.
  std::int64_t total = 0;
  double remaining = mean;
  const double kChunk = 32.0;
  while (remaining > 0.0) {
    const double lambda = remaining > kChunk ? kChunk : remaining;
    remaining -= lambda;
    const double limit = std::exp(-lambda);
    std::int64_t k = 0;
    double prod = next_unit();
    while (prod > limit) {
      ++k;
      prod *= next_unit();
    }
    total += k;
  }
  return total;
}

namespace {

// Binomial(m, p) with m <= 512 and p <= 0.5 by sequential CDF search.
// (1-p)^m >= 0.5^512 ~ 7.5e-155, comfortably above double underflow.
std::int64_t binomial_chunk(Rng& rng, std::int64_t m, double p) {
  const double q = 1.0 - p;
  double f = std::pow(q, static_cast<double>(m));
  double u = rng.next_unit();
  std::int64_t k = 0;
  const double ratio = p / q;
  while (u > f && k < m) {
    u -= f;
    ++k;
    f *= ratio * static_cast<double>(m - k + 1) / static_cast<double>(k);
  }
  return k;
}

}  // namespace

std::int64_t Rng::binomial(std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("Rng::binomial: n must be >= 0");
  if (p < 0.0 || p > 1.0 || !std::isfinite(p)) {
    throw std::invalid_argument("Rng::binomial: p must be in [0,1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial(n, 1.0 - p);

  std::int64_t total = 0;
  std::int64_t remaining = n;
  const std::int64_t kChunk = 512;
  while (remaining > 0) {
    const std::int64_t m = remaining > kChunk ? kChunk : remaining;
    remaining -= m;
    total += binomial_chunk(*this, m, p);
  }
  return total;
}

double Rng::gaussian() {
  // Box-Muller; u1 shifted away from 0 so the log is finite.
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

std::vector<std::size_t> Rng::shuffled_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<std::size_t> Rng::choose(std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("Rng::choose: k exceeds n");
  // Partial Fisher-Yates: only the first k slots are materialized.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(n - i));
    std::swap(idx[i], idx[j]);
    out.push_back(idx[i]);
  }
  return out;
}

}  // namespace trendlab::rng
