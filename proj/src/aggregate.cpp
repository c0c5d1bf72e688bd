#include "trendlab/aggregate.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "trendlab/rng.hpp"

namespace trendlab::agg {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

double CorrelationMatrix::min_off_diagonal() const {
  const std::size_t n = size();
  double best = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (at(i, j) < best) best = at(i, j);
    }
  }
  return best;
}

double CorrelationMatrix::max_off_diagonal() const {
  const std::size_t n = size();
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (at(i, j) > best) best = at(i, j);
    }
  }
  return best;
}

double CorrelationMatrix::mean_off_diagonal() const {
  const std::size_t n = size();
  if (n < 2) throw std::invalid_argument("matrix has no off-diagonal entries");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += at(i, j);
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

std::vector<AveragedSeries> average_pool(
    const SamplePool& pool, const std::vector<std::string>& sample_ids) {
  if (sample_ids.empty()) {
    throw std::invalid_argument("average_pool: empty sample subset");
  }
  std::vector<std::size_t> rows;
  rows.reserve(sample_ids.size());
  for (const std::string& id : sample_ids) {
    const auto idx = pool.sample_index(id);
    if (!idx) throw std::invalid_argument("average_pool: unknown sample id " + id);
    for (std::size_t seen : rows) {
      if (seen == *idx) {
        throw std::invalid_argument("average_pool: duplicate sample id " + id);
      }
    }
    rows.push_back(*idx);
  }
  const std::size_t T = pool.grid().size();
  const double inv = 1.0 / static_cast<double>(rows.size());
  std::vector<AveragedSeries> out;
  out.reserve(pool.n_terms());
  for (std::size_t p = 0; p < pool.n_terms(); ++p) {
    AveragedSeries avg;
    avg.query = pool.query_set[p];
    avg.member_ids = sample_ids;
    avg.values.assign(T, 0.0);
    for (std::size_t s : rows) {
      const auto& values = pool.samples[s][p].values;
      for (std::size_t t = 0; t < T; ++t) avg.values[t] += values[t];
    }
    for (double& v : avg.values) v *= inv;
    out.push_back(std::move(avg));
  }
  return out;
}

std::vector<std::vector<AveragedSeries>> disjoint_group_averages(
    const SamplePool& pool, int group_size, int n_groups, std::uint64_t seed) {
  if (group_size < 1 || n_groups < 1) {
    throw std::invalid_argument("disjoint_group_averages: sizes must be >= 1");
  }
  const std::size_t needed =
      static_cast<std::size_t>(group_size) * static_cast<std::size_t>(n_groups);
  if (needed > pool.n_samples()) {
    throw std::invalid_argument(
        "disjoint_group_averages: insufficient samples (need " +
        std::to_string(needed) + ", pool has " +
        std::to_string(pool.n_samples()) + ")");
  }
  rng::Rng gen(rng::sub_seed({seed, rng::hash_str("group-partition")}));
  const std::vector<std::size_t> order = gen.shuffled_indices(pool.n_samples());
  std::vector<std::vector<AveragedSeries>> groups;
  groups.reserve(static_cast<std::size_t>(n_groups));
  for (int g = 0; g < n_groups; ++g) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(group_size));
    for (int j = 0; j < group_size; ++j) {
      ids.push_back(pool.sample_ids[order[static_cast<std::size_t>(g) * group_size + j]]);
    }
    groups.push_back(average_pool(pool, ids));
  }
  return groups;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson: length mismatch");
  }
  if (x.size() < 2) {
    throw std::invalid_argument("pearson: needs at least 2 observations");
  }
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("pearson: correlation undefined for constant input");
  }
  double r = sxy / std::sqrt(sxx * syy);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

CorrelationMatrix correlation_matrix(
    const std::vector<std::vector<double>>& series,
    const std::vector<std::string>& labels) {
  if (series.size() < 2) {
    throw std::invalid_argument("correlation_matrix: needs at least 2 series");
  }
  if (series.size() != labels.size()) {
    throw std::invalid_argument("correlation_matrix: label count mismatch");
  }
  const std::size_t n = series.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (series[i].size() != series[0].size()) {
      throw std::invalid_argument("correlation_matrix: series length mismatch");
    }
  }
  CorrelationMatrix m;
  m.labels = labels;
  m.entries.assign(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = pearson(series[i], series[j]);
      m.entries[i * n + j] = r;
      m.entries[j * n + i] = r;
    }
  }
  return m;
}

CorrelationMatrix pool_term_correlations(const SamplePool& pool,
                                         std::size_t term_index) {
  if (term_index >= pool.n_terms()) {
    throw std::invalid_argument("pool_term_correlations: term index out of range");
  }
  std::vector<std::vector<double>> series;
  series.reserve(pool.n_samples());
  for (std::size_t s = 0; s < pool.n_samples(); ++s) {
    series.push_back(pool.samples[s][term_index].values);
  }
  return correlation_matrix(series, pool.sample_ids);
}

std::string correlation_csv(const CorrelationMatrix& matrix) {
  std::string out;
  for (const auto& label : matrix.labels) {
    out += ',';
    out += label;
  }
  out += '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out += matrix.labels[i];
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      out += ',';
      out += format_value(matrix.at(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string averages_csv(const std::vector<AveragedSeries>& averages) {
  std::string out = "term,period,value\n";
  for (const auto& avg : averages) {
    const TimeGrid grid = avg.query.grid();
    for (std::size_t t = 0; t < avg.values.size(); ++t) {
      out += avg.query.term;
      out += ',';
      out += grid.label(t);
      out += ',';
      out += format_value(avg.values[t]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace trendlab::agg
