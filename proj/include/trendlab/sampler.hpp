#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trendlab/core.hpp"

namespace trendlab::synth {

/// Hidden truth for one search term: expected searches per period with
/// multiplicative trend, sinusoidal seasonality and log-normal shocks.
struct LatentTermSpec {
  std::string name;
  double base_rate = 0.0;        // expected searches per period, > 0
  double trend_slope = 0.0;      // multiplicative drift per period
  double seasonal_amplitude = 0.0;  // in [0, 1)
  int seasonal_period = 12;      // >= 1
  double shock_sd = 0.0;         // std-dev of log shocks, >= 0
};

/// Synthetic ground truth: actual search counts per term per period plus
/// total search counts. Every experiment's knowable truth.
struct LatentPanel {
  TimeGrid grid;
  std::string geo = "ZZ";
  std::vector<std::string> term_names;                 // P
  std::vector<std::vector<std::int64_t>> term_counts;  // [p][t]
  std::vector<std::int64_t> total_counts;              // [t]

  std::size_t n_terms() const { return term_names.size(); }
  TermQuery query_for(std::size_t term_index) const;
};

struct SamplerConfig {
  double sampling_fraction = 0.25;  // in (0, 1]
  std::uint64_t seed = 0;
  int n_samples = 1;  // >= 1
};

void assert_sampler_config_valid(const SamplerConfig& cfg);

/// Realizes term counts as Poisson draws around each spec's mean path and
/// totals as background Poisson counts plus all term counts. Deterministic
/// in `seed`; term/period draws use independent sub-seeded streams.
LatentPanel gen_latent_panel(const std::vector<LatentTermSpec>& specs,
                             const TimeGrid& grid, double background_rate,
                             std::uint64_t seed, const std::string& geo = "ZZ");

/// One "download": binomially thins every term's and the total's counts with
/// the sampling fraction, then normalizes each term to the 0-100 index.
/// Sub-seeded from (cfg.seed, sample_index), so draws are reproducible and
/// independent of the order they are made in.
std::vector<SampleSeries> draw_sample(const LatentPanel& panel,
                                      const SamplerConfig& cfg,
                                      int sample_index);

/// cfg.n_samples independent draws assembled into a pool.
SamplePool draw_pool(const LatentPanel& panel, const SamplerConfig& cfg,
                     unsigned jobs = 1);

/// A spread of term specs with log-spaced popularity between rate_min and
/// rate_max and seeded variety in seasonality/trend/shocks. The stock panel
/// shape used by the experiment harnesses and the CLI presets.
std::vector<LatentTermSpec> spread_term_specs(std::size_t n_terms,
                                              double rate_min, double rate_max,
                                              std::uint64_t seed);

double sum_base_rates(const std::vector<LatentTermSpec>& specs);

}  // namespace trendlab::synth
