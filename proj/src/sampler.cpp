#include "trendlab/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "trendlab/parallel.hpp"
#include "trendlab/rng.hpp"

namespace trendlab::synth {

namespace {

constexpr double kTau = 6.283185307179586476925287;

void assert_spec_valid(const LatentTermSpec& spec) {
  if (spec.name.empty()) throw std::invalid_argument("term spec has empty name");
  if (!(spec.base_rate > 0.0)) {
    throw std::invalid_argument("term '" + spec.name + "': base_rate must be > 0");
  }
  if (spec.seasonal_amplitude < 0.0 || spec.seasonal_amplitude >= 1.0) {
    throw std::invalid_argument("term '" + spec.name +
                                "': seasonal_amplitude must be in [0,1)");
  }
  if (spec.seasonal_period < 1) {
    throw std::invalid_argument("term '" + spec.name +
                                "': seasonal_period must be >= 1");
  }
  if (spec.shock_sd < 0.0) {
    throw std::invalid_argument("term '" + spec.name + "': shock_sd must be >= 0");
  }
  if (spec.trend_slope <= -1.0) {
    throw std::invalid_argument("term '" + spec.name +
                                "': trend_slope must exceed -1");
  }
}

}  // namespace

void assert_sampler_config_valid(const SamplerConfig& cfg) {
  if (!(cfg.sampling_fraction > 0.0) || cfg.sampling_fraction > 1.0) {
    throw std::invalid_argument("sampling_fraction must be in (0,1]");
  }
  if (cfg.n_samples < 1) {
    throw std::invalid_argument("n_samples must be >= 1");
  }
}

TermQuery LatentPanel::query_for(std::size_t term_index) const {
  if (term_index >= term_names.size()) {
    throw std::out_of_range("panel term index out of range");
  }
  return TermQuery{term_names[term_index], geo, grid.range(), grid.frequency()};
}

LatentPanel gen_latent_panel(const std::vector<LatentTermSpec>& specs,
                             const TimeGrid& grid, double background_rate,
                             std::uint64_t seed, const std::string& geo) {
  if (specs.empty()) throw std::invalid_argument("gen_latent_panel: empty specs");
  for (const auto& spec : specs) assert_spec_valid(spec);
  const double rate_sum = sum_base_rates(specs);
  if (background_rate < rate_sum) {
    throw std::invalid_argument(
        "gen_latent_panel: background rate too small; needs >= sum of base "
        "rates (" +
        std::to_string(rate_sum) + ")");
  }

  const std::size_t T = grid.size();
  const std::size_t P = specs.size();
  LatentPanel panel;
  panel.grid = grid;
  panel.geo = geo;
  panel.term_names.reserve(P);
  panel.term_counts.assign(P, std::vector<std::int64_t>(T, 0));
  panel.total_counts.assign(T, 0);

  for (std::size_t p = 0; p < P; ++p) {
    const LatentTermSpec& spec = specs[p];
    panel.term_names.push_back(spec.name);
    rng::Rng gen(rng::sub_seed({seed, rng::hash_str("panel-term"), p}));
    for (std::size_t t = 0; t < T; ++t) {
      const double shock = spec.shock_sd > 0.0 ? gen.gaussian() * spec.shock_sd : 0.0;
      const double mean =
          spec.base_rate * std::pow(1.0 + spec.trend_slope, static_cast<double>(t)) *
          (1.0 + spec.seasonal_amplitude *
                     std::sin(kTau * static_cast<double>(t) /
                              static_cast<double>(spec.seasonal_period))) *
          std::exp(shock);
      panel.term_counts[p][t] = gen.poisson(mean);
    }
  }

  rng::Rng bg(rng::sub_seed({seed, rng::hash_str("panel-background")}));
  for (std::size_t t = 0; t < T; ++t) {
    std::int64_t total = bg.poisson(background_rate);
    for (std::size_t p = 0; p < P; ++p) total += panel.term_counts[p][t];
    panel.total_counts[t] = total;
  }
  return panel;
}

std::vector<SampleSeries> draw_sample(const LatentPanel& panel,
                                      const SamplerConfig& cfg,
                                      int sample_index) {
  assert_sampler_config_valid(cfg);
  if (panel.term_names.empty() || panel.total_counts.empty()) {
    throw std::invalid_argument("draw_sample: empty panel");
  }
  if (sample_index < 0 || sample_index >= cfg.n_samples) {
    throw std::invalid_argument("draw_sample: sample_index out of range");
  }

  const std::size_t T = panel.grid.size();
  const std::size_t P = panel.n_terms();
  const double f = cfg.sampling_fraction;
  const std::uint64_t s = static_cast<std::uint64_t>(sample_index);

  // Totals use the term-index slot one past the last term.
  std::vector<double> thinned_totals(T);
  {
    rng::Rng gen(rng::sub_seed({cfg.seed, s, static_cast<std::uint64_t>(P)}));
    for (std::size_t t = 0; t < T; ++t) {
      // A drawn sample always sees at least one search, so shares stay defined.
      const std::int64_t n = gen.binomial(panel.total_counts[t], f);
      thinned_totals[t] = static_cast<double>(n < 1 ? 1 : n);
    }
  }

  std::vector<SampleSeries> out;
  out.reserve(P);
  char id[16];
  std::snprintf(id, sizeof(id), "s%02d", sample_index);
  const Date download = add_days(panel.grid.end(), 1 + sample_index);

  for (std::size_t p = 0; p < P; ++p) {
    rng::Rng gen(rng::sub_seed({cfg.seed, s, p}));
    std::vector<double> thinned(T);
    for (std::size_t t = 0; t < T; ++t) {
      std::int64_t c = gen.binomial(panel.term_counts[p][t], f);
      // Term and total are thinned independently; cap so shares stay <= 1.
      if (static_cast<double>(c) > thinned_totals[t]) {
        c = static_cast<std::int64_t>(thinned_totals[t]);
      }
      thinned[t] = static_cast<double>(c);
    }
    SampleSeries series;
    series.query = panel.query_for(p);
    series.values = normalize(thinned, thinned_totals);
    series.download_date = download;
    series.sample_id = id;
    out.push_back(std::move(series));
  }
  return out;
}

SamplePool draw_pool(const LatentPanel& panel, const SamplerConfig& cfg,
                     unsigned jobs) {
  assert_sampler_config_valid(cfg);
  const std::size_t S = static_cast<std::size_t>(cfg.n_samples);
  SamplePool pool;
  pool.query_set.reserve(panel.n_terms());
  for (std::size_t p = 0; p < panel.n_terms(); ++p) {
    pool.query_set.push_back(panel.query_for(p));
  }
  pool.sample_ids.resize(S);
  pool.samples.resize(S);
  parallel_for(S, jobs, [&](std::size_t s) {
    pool.samples[s] = draw_sample(panel, cfg, static_cast<int>(s));
    pool.sample_ids[s] = pool.samples[s].front().sample_id;
  });
  return pool;
}

std::vector<LatentTermSpec> spread_term_specs(std::size_t n_terms,
                                              double rate_min, double rate_max,
                                              std::uint64_t seed) {
  if (n_terms == 0) throw std::invalid_argument("spread_term_specs: no terms");
  if (!(rate_min > 0.0) || rate_max < rate_min) {
    throw std::invalid_argument("spread_term_specs: need 0 < rate_min <= rate_max");
  }
  static const int periods[] = {12, 6, 4};
  std::vector<LatentTermSpec> specs;
  specs.reserve(n_terms);
  for (std::size_t p = 0; p < n_terms; ++p) {
    rng::Rng gen(rng::sub_seed({seed, rng::hash_str("spec"), p}));
    LatentTermSpec spec;
    char name[24];
    std::snprintf(name, sizeof(name), "term-%02zu", p);
    spec.name = name;
    const double frac =
        n_terms == 1 ? 0.0
                     : static_cast<double>(p) / static_cast<double>(n_terms - 1);
    spec.base_rate = rate_min * std::pow(rate_max / rate_min, frac);
    spec.seasonal_amplitude = 0.30 + 0.30 * gen.next_unit();
    spec.seasonal_period = periods[p % 3];
    spec.trend_slope = -0.002 + 0.008 * gen.next_unit();
    spec.shock_sd = 0.15 + 0.20 * gen.next_unit();
    specs.push_back(std::move(spec));
  }
  return specs;
}

double sum_base_rates(const std::vector<LatentTermSpec>& specs) {
  double sum = 0.0;
  for (const auto& spec : specs) sum += spec.base_rate;
  return sum;
}

}  // namespace trendlab::synth
