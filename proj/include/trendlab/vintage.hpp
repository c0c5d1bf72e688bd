#pragma once

#include <vector>

#include "trendlab/aggregate.hpp"
#include "trendlab/core.hpp"
#include "trendlab/sampler.hpp"

namespace trendlab::vintage {

/// Rolling-window vintages of one term: each vintage is a fresh sample drawn
/// over a shifted window and renormalized within that window, the way a
/// real-time forecaster's repeated downloads would be.
struct VintageSet {
  TermQuery base_query;
  std::vector<int> shifts;             // periods, one per vintage
  std::vector<SampleSeries> vintages;  // one per shift, own window each
  TimeGrid overlap_grid;               // intersection of all windows
};

/// Draws n_vintages samples of panel term `term_index`, window shifted by
/// k*step periods for vintage k. Each vintage uses an independent sub-seed
/// and is normalized within its own window only.
VintageSet build_vintages(const synth::LatentPanel& panel,
                          const synth::SamplerConfig& cfg,
                          std::size_t term_index, const PeriodRange& base_window,
                          int n_vintages, int step);

/// Pairwise Pearson correlations over the overlap periods only.
agg::CorrelationMatrix vintage_correlations(const VintageSet& set);

/// Per shift, averages the corresponding vintages across sets. All sets must
/// share the same shift structure. Averaged values are real-valued and not
/// re-normalized.
VintageSet average_vintages(const std::vector<VintageSet>& sets);

/// Long-format CSV: vintage_id,period,value.
std::string vintages_csv(const VintageSet& set);

}  // namespace trendlab::vintage
