#include <doctest.h>

#include <cmath>

#include "trendlab/rng.hpp"

using namespace trendlab;

TEST_CASE("rng streams are deterministic in the seed") {
  rng::Rng a(123), b(123), c(124);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("sub_seed is order-sensitive and stable") {
  CHECK(rng::sub_seed({1, 2}) != rng::sub_seed({2, 1}));
  CHECK(rng::sub_seed({1, 2}) == rng::sub_seed({1, 2}));
}

TEST_CASE("uniforms live in [0,1)") {
  rng::Rng gen(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = gen.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("poisson matches mean and variance at Monte-Carlo precision") {
  // Covers both the single-chunk (< 32) and the chunked (> 32) paths.
  for (const double mean : {3.0, 250.0}) {
    rng::Rng gen(31);
    const int n = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(gen.poisson(mean));
      sum += x;
      sum_sq += x * x;
    }
    const double sample_mean = sum / n;
    const double sample_var = sum_sq / n - sample_mean * sample_mean;
    // 4 standard errors of the MC estimate.
    const double mean_tol = 4.0 * std::sqrt(mean / n);
    CHECK(std::fabs(sample_mean - mean) < mean_tol);
    CHECK(std::fabs(sample_var - mean) < 0.05 * mean + mean_tol);
  }
}

TEST_CASE("binomial matches mean and variance, all size regimes") {
  struct Case {
    std::int64_t n;
    double p;
  };
  for (const Case c : {Case{20, 0.3}, Case{5000, 0.25}, Case{100000, 0.9}}) {
    rng::Rng gen(77);
    const int reps = 4000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < reps; ++i) {
      const double x = static_cast<double>(gen.binomial(c.n, c.p));
      sum += x;
      sum_sq += x * x;
    }
    const double mean = static_cast<double>(c.n) * c.p;
    const double var = mean * (1.0 - c.p);
    const double sample_mean = sum / reps;
    const double sample_var = sum_sq / reps - sample_mean * sample_mean;
    CHECK(std::fabs(sample_mean - mean) < 4.0 * std::sqrt(var / reps));
    CHECK(std::fabs(sample_var - var) < 0.1 * var);
  }
}

TEST_CASE("binomial edge cases") {
  rng::Rng gen(5);
  CHECK(gen.binomial(0, 0.5) == 0);
  CHECK(gen.binomial(100, 0.0) == 0);
  CHECK(gen.binomial(100, 1.0) == 100);
  for (int i = 0; i < 1000; ++i) {
    const auto v = gen.binomial(10, 0.5);
    CHECK(v >= 0);
    CHECK(v <= 10);
  }
}

TEST_CASE("gaussian moments") {
  rng::Rng gen(11);
  const int n = 50000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = gen.gaussian();
    sum += x;
    sum_sq += x * x;
  }
  CHECK(std::fabs(sum / n) < 0.02);
  CHECK(std::fabs(sum_sq / n - 1.0) < 0.03);
}

TEST_CASE("choose yields distinct indices") {
  rng::Rng gen(3);
  for (int rep = 0; rep < 100; ++rep) {
    const auto picked = gen.choose(20, 5);
    CHECK(picked.size() == 5);
    for (std::size_t i = 0; i < picked.size(); ++i) {
      CHECK(picked[i] < 20);
      for (std::size_t j = i + 1; j < picked.size(); ++j) {
        CHECK(picked[i] != picked[j]);
      }
    }
  }
}

TEST_CASE("shuffle is a permutation") {
  rng::Rng gen(8);
  const auto perm = gen.shuffled_indices(14);
  std::vector<bool> seen(14, false);
  for (std::size_t v : perm) {
    CHECK(v < 14);
    CHECK(!seen[v]);
    seen[v] = true;
  }
}
