#include "trendlab/vintage.hpp"

#include <cstdio>
#include <stdexcept>

#include "trendlab/rng.hpp"

namespace trendlab::vintage {

VintageSet build_vintages(const synth::LatentPanel& panel,
                          const synth::SamplerConfig& cfg,
                          std::size_t term_index, const PeriodRange& base_window,
                          int n_vintages, int step) {
  synth::assert_sampler_config_valid(cfg);
  if (term_index >= panel.n_terms()) {
    throw std::invalid_argument("build_vintages: term index out of range");
  }
  if (n_vintages < 1) {
    throw std::invalid_argument("build_vintages: n_vintages must be >= 1");
  }
  if (step < 1) {
    throw std::invalid_argument("build_vintages: step must be >= 1");
  }
  const TimeGrid& grid = panel.grid;
  const auto base_begin = grid.index_of(base_window.start);
  const auto base_end = grid.index_of(base_window.end);
  if (!base_begin || !base_end || *base_end < *base_begin) {
    throw std::invalid_argument("build_vintages: base window not on panel grid");
  }
  const std::size_t last_shift =
      static_cast<std::size_t>(n_vintages - 1) * static_cast<std::size_t>(step);
  if (*base_end + last_shift >= grid.size()) {
    throw std::invalid_argument("build_vintages: shifted window exceeds panel");
  }
  const std::size_t window_len = *base_end - *base_begin + 1;
  if (window_len < 2) {
    throw std::invalid_argument("build_vintages: window needs >= 2 periods");
  }
  if (*base_begin + last_shift > *base_end) {
    throw std::invalid_argument("build_vintages: vintages do not overlap");
  }

  VintageSet set;
  set.base_query = panel.query_for(term_index);
  set.base_query.window = base_window;

  const double f = cfg.sampling_fraction;
  for (int v = 0; v < n_vintages; ++v) {
    const std::size_t shift = static_cast<std::size_t>(v) * step;
    const std::size_t begin = *base_begin + shift;

    // Fresh, independently seeded draw per vintage: every real download of a
    // shifted window is a new sample.
    rng::Rng totals_gen(rng::sub_seed({cfg.seed, rng::hash_str("vintage-totals"),
                                       static_cast<std::uint64_t>(v)}));
    rng::Rng term_gen(rng::sub_seed({cfg.seed, rng::hash_str("vintage-term"),
                                     static_cast<std::uint64_t>(v), term_index}));
    std::vector<double> thinned_totals(window_len);
    std::vector<double> thinned_term(window_len);
    for (std::size_t i = 0; i < window_len; ++i) {
      const std::int64_t n = totals_gen.binomial(panel.total_counts[begin + i], f);
      thinned_totals[i] = static_cast<double>(n < 1 ? 1 : n);
    }
    for (std::size_t i = 0; i < window_len; ++i) {
      std::int64_t c = term_gen.binomial(panel.term_counts[term_index][begin + i], f);
      if (static_cast<double>(c) > thinned_totals[i]) {
        c = static_cast<std::int64_t>(thinned_totals[i]);
      }
      thinned_term[i] = static_cast<double>(c);
    }

    SampleSeries series;
    series.query = set.base_query;
    series.query.window =
        PeriodRange{grid.period(begin), grid.period(begin + window_len - 1)};
    series.values = normalize(thinned_term, thinned_totals);
    series.download_date = add_days(series.query.window.end, 1);
    char id[24];
    std::snprintf(id, sizeof(id), "vintage-%d", v);
    series.sample_id = id;
    set.vintages.push_back(std::move(series));
    set.shifts.push_back(static_cast<int>(shift));
  }

  set.overlap_grid = TimeGrid::between(grid.frequency(),
                                       grid.period(*base_begin + last_shift),
                                       grid.period(*base_end));
  return set;
}

agg::CorrelationMatrix vintage_correlations(const VintageSet& set) {
  if (set.vintages.size() < 2) {
    throw std::invalid_argument("vintage_correlations: needs >= 2 vintages");
  }
  if (set.overlap_grid.size() < 2) {
    throw std::invalid_argument("vintage_correlations: empty overlap");
  }
  std::vector<std::vector<double>> slices;
  std::vector<std::string> labels;
  for (const SampleSeries& vintage : set.vintages) {
    const TimeGrid grid = vintage.query.grid();
    const auto begin = grid.index_of(set.overlap_grid.start());
    if (!begin) {
      throw std::invalid_argument("vintage_correlations: overlap misaligned");
    }
    slices.emplace_back(
        vintage.values.begin() + static_cast<std::ptrdiff_t>(*begin),
        vintage.values.begin() +
            static_cast<std::ptrdiff_t>(*begin + set.overlap_grid.size()));
    labels.push_back(vintage.sample_id);
  }
  return agg::correlation_matrix(slices, labels);
}

VintageSet average_vintages(const std::vector<VintageSet>& sets) {
  if (sets.empty()) {
    throw std::invalid_argument("average_vintages: no sets");
  }
  const VintageSet& first = sets.front();
  for (const VintageSet& set : sets) {
    if (set.shifts != first.shifts) {
      throw std::invalid_argument("average_vintages: shift structure mismatch");
    }
    for (std::size_t v = 0; v < set.vintages.size(); ++v) {
      if (!(set.vintages[v].query.window == first.vintages[v].query.window)) {
        throw std::invalid_argument("average_vintages: window mismatch");
      }
    }
  }

  VintageSet out;
  out.base_query = first.base_query;
  out.shifts = first.shifts;
  out.overlap_grid = first.overlap_grid;
  const double inv = 1.0 / static_cast<double>(sets.size());
  for (std::size_t v = 0; v < first.vintages.size(); ++v) {
    SampleSeries avg;
    avg.query = first.vintages[v].query;
    avg.download_date = first.vintages[v].download_date;
    char id[32];
    std::snprintf(id, sizeof(id), "avg-vintage-%zu", v);
    avg.sample_id = id;
    avg.values.assign(first.vintages[v].values.size(), 0.0);
    for (const VintageSet& set : sets) {
      for (std::size_t i = 0; i < avg.values.size(); ++i) {
        avg.values[i] += set.vintages[v].values[i];
      }
    }
    for (double& value : avg.values) value *= inv;
    out.vintages.push_back(std::move(avg));
  }
  return out;
}

std::string vintages_csv(const VintageSet& set) {
  std::string out = "vintage_id,period,value\n";
  for (const SampleSeries& vintage : set.vintages) {
    const TimeGrid grid = vintage.query.grid();
    for (std::size_t t = 0; t < vintage.values.size(); ++t) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.10g", vintage.values[t]);
      out += vintage.sample_id;
      out += ',';
      out += grid.label(t);
      out += ',';
      out += buf;
      out += '\n';
    }
  }
  return out;
}

}  // namespace trendlab::vintage
