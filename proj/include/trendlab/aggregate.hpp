#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trendlab/core.hpp"

namespace trendlab::agg {

/// Per-period arithmetic mean of one term across a set of samples.
/// Values are real and deliberately not re-rounded or re-normalized.
struct AveragedSeries {
  TermQuery query;
  std::vector<double> values;
  std::vector<std::string> member_ids;
};

/// Symmetric correlation matrix with unit diagonal, row-major storage.
struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<double> entries;  // size() == labels.size()^2

  std::size_t size() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const {
    return entries[i * labels.size() + j];
  }
  double min_off_diagonal() const;
  double max_off_diagonal() const;
  double mean_off_diagonal() const;
};

/// Averages the selected samples per term. Throws on an empty subset or an
/// unknown sample id.
std::vector<AveragedSeries> average_pool(
    const SamplePool& pool, const std::vector<std::string>& sample_ids);

/// Seeded random partition of the pool into n_groups disjoint groups of
/// group_size samples each, every group averaged. Requires
/// group_size * n_groups <= S.
std::vector<std::vector<AveragedSeries>> disjoint_group_averages(
    const SamplePool& pool, int group_size, int n_groups, std::uint64_t seed);

/// Pearson product-moment correlation. Throws on length mismatch, length < 2
/// or constant input (the coefficient is undefined there; a constant index
/// series signals a degenerate query and must not be silently zeroed).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

CorrelationMatrix correlation_matrix(
    const std::vector<std::vector<double>>& series,
    const std::vector<std::string>& labels);

/// Pairwise correlations of one term across all samples of a pool.
CorrelationMatrix pool_term_correlations(const SamplePool& pool,
                                         std::size_t term_index);

/// Square CSV with a header row and a label column.
std::string correlation_csv(const CorrelationMatrix& matrix);

/// Long-format CSV (term,period,value) for averaged series.
std::string averages_csv(const std::vector<AveragedSeries>& averages);

}  // namespace trendlab::agg
