#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here deliberately avoids the library's solver paths: OLS goes through
// plain Gaussian elimination so LASSO results can be checked against an
// implementation that shares no code with coordinate descent.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "trendlab/core.hpp"
#include "trendlab/rng.hpp"
#include "trendlab/sampler.hpp"

namespace testutil {

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (std::fabs(a[pivot][col]) < 1e-12) {
      throw std::runtime_error("solve_linear: singular matrix");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double sum = b[i];
    for (std::size_t c = i + 1; c < n; ++c) sum -= a[i][c] * x[c];
    x[i] = sum / a[i][i];
  }
  return x;
}

/// Ordinary least squares with intercept via the normal equations.
/// Returns {intercept, beta_0, ..., beta_{p-1}}.
inline std::vector<double> ols_oracle(
    const std::vector<std::vector<double>>& columns,
    const std::vector<double>& y) {
  const std::size_t t = y.size();
  const std::size_t p = columns.size();
  std::vector<std::vector<double>> gram(p + 1, std::vector<double>(p + 1, 0.0));
  std::vector<double> rhs(p + 1, 0.0);
  auto col_value = [&](std::size_t j, std::size_t row) {
    return j == 0 ? 1.0 : columns[j - 1][row];
  };
  for (std::size_t i = 0; i <= p; ++i) {
    for (std::size_t j = 0; j <= p; ++j) {
      double sum = 0.0;
      for (std::size_t row = 0; row < t; ++row) {
        sum += col_value(i, row) * col_value(j, row);
      }
      gram[i][j] = sum;
    }
    double sum = 0.0;
    for (std::size_t row = 0; row < t; ++row) sum += col_value(i, row) * y[row];
    rhs[i] = sum;
  }
  return solve_linear(std::move(gram), std::move(rhs));
}

inline double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

inline double population_variance(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size());
}

/// Columns with zero mean, unit population variance and zero cross products,
/// built by Gram-Schmidt against the constant vector and each other. On such
/// designs the LASSO solution is soft-thresholded OLS, coordinate by
/// coordinate.
inline std::vector<std::vector<double>> orthonormal_columns(std::size_t t,
                                                            std::size_t p,
                                                            std::uint64_t seed) {
  if (p >= t) throw std::invalid_argument("orthonormal_columns: need p < t");
  trendlab::rng::Rng gen(seed);
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> v(t);
    for (double& x : v) x = gen.gaussian();
    // Remove the mean (projection on the constant vector), then previous cols.
    const double m = mean_of(v);
    for (double& x : v) x -= m;
    for (const auto& prev : cols) {
      double dot = 0.0;
      for (std::size_t i = 0; i < t; ++i) dot += v[i] * prev[i];
      dot /= static_cast<double>(t);  // prev has <prev,prev>/t == 1
      for (std::size_t i = 0; i < t; ++i) v[i] -= dot * prev[i];
    }
    double ss = 0.0;
    for (double x : v) ss += x * x;
    const double norm = std::sqrt(ss / static_cast<double>(t));
    if (norm < 1e-9) throw std::runtime_error("orthonormal_columns: degenerate");
    for (double& x : v) x /= norm;
    cols.push_back(std::move(v));
  }
  return cols;
}

/// Small monthly panel + pool in one call; the workhorse fixture.
struct PoolSpec {
  std::size_t n_terms = 4;
  double rate_min = 50.0;
  double rate_max = 500.0;
  std::size_t months = 60;
  double fraction = 0.5;
  int n_samples = 4;
  std::uint64_t seed = 7;
  double background_mult = 8.0;
};

inline trendlab::synth::LatentPanel make_panel(const PoolSpec& spec) {
  const auto terms = trendlab::synth::spread_term_specs(
      spec.n_terms, spec.rate_min, spec.rate_max,
      trendlab::rng::sub_seed({spec.seed, 1}));
  return trendlab::synth::gen_latent_panel(
      terms, trendlab::TimeGrid::monthly({2009, 1, 1}, spec.months),
      spec.background_mult * trendlab::synth::sum_base_rates(terms),
      trendlab::rng::sub_seed({spec.seed, 2}), "ZZ");
}

inline trendlab::SamplePool make_pool(const PoolSpec& spec) {
  trendlab::synth::SamplerConfig cfg;
  cfg.sampling_fraction = spec.fraction;
  cfg.seed = trendlab::rng::sub_seed({spec.seed, 3});
  cfg.n_samples = spec.n_samples;
  return trendlab::synth::draw_pool(make_panel(spec), cfg);
}

/// One term with moderate seasonality and shocks; the popularity knob is the
/// base rate alone, which makes cross-sample correlation sweeps clean.
inline trendlab::synth::LatentTermSpec one_term(double base_rate) {
  trendlab::synth::LatentTermSpec spec;
  spec.name = "term";
  spec.base_rate = base_rate;
  spec.seasonal_amplitude = 0.45;
  spec.seasonal_period = 12;
  spec.shock_sd = 0.25;
  spec.trend_slope = 0.002;
  return spec;
}

inline trendlab::synth::LatentPanel single_term_panel(double base_rate,
                                                      std::uint64_t seed,
                                                      std::size_t months = 120) {
  return trendlab::synth::gen_latent_panel(
      {one_term(base_rate)},
      trendlab::TimeGrid::monthly({2009, 1, 1}, months), 50000.0, seed);
}

inline trendlab::SamplePool single_term_pool(double base_rate, double fraction,
                                             int n_samples, std::uint64_t seed,
                                             std::size_t months = 120) {
  trendlab::synth::SamplerConfig cfg;
  cfg.sampling_fraction = fraction;
  cfg.seed = trendlab::rng::sub_seed({seed, trendlab::rng::hash_str("pool")});
  cfg.n_samples = n_samples;
  return trendlab::synth::draw_pool(
      single_term_panel(base_rate, trendlab::rng::sub_seed(
                                       {seed, trendlab::rng::hash_str("panel")}),
                        months),
      cfg);
}

/// Base rate at which a 0.25-fraction sample pool lands near the 0.5
/// cross-sample correlation regime. Shared by the statistical suites.
inline constexpr double kRareRate = 18.0;
inline constexpr double kRareFraction = 0.25;

}  // namespace testutil
