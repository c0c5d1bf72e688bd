#include "trendlab/nowcast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "trendlab/parallel.hpp"

namespace trendlab::nowcast {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::vector<double> trend_smooth(const std::vector<double>& values, int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("trend_smooth: window must be odd and >= 1");
  }
  const std::size_t n = values.size();
  if (static_cast<std::size_t>(window) > n) {
    throw std::invalid_argument("trend_smooth: window exceeds series length");
  }
  const int h = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo =
        static_cast<int>(i) >= h ? i - static_cast<std::size_t>(h) : 0;
    const std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(h));
    double sum = 0.0;
    for (std::size_t t = lo; t <= hi; ++t) sum += values[t];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

TargetSeries make_target(std::string name, TimeGrid grid,
                         std::vector<double> values, int smooth_window) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("target: value/grid length mismatch");
  }
  TargetSeries target;
  target.name = std::move(name);
  target.grid = grid;
  target.trend_values = trend_smooth(values, smooth_window);
  target.values = std::move(values);
  return target;
}

TargetSeries parse_target_csv(const std::string& text, const std::string& name,
                              int smooth_window) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  if (lines.size() < 3) {
    throw std::runtime_error("target csv: needs a header and >= 2 rows");
  }
  if (lines[0].find(',') == std::string::npos) {
    throw std::runtime_error("target csv: expected 'period,value' header");
  }

  std::vector<double> values;
  Date first{}, prev{};
  Frequency freq = Frequency::monthly;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::size_t c = lines[li].find(',');
    if (c == std::string::npos) {
      throw std::runtime_error("target csv, line " + std::to_string(li + 1) +
                               ": expected 'period,value'");
    }
    const std::string period_str = lines[li].substr(0, c);
    Date period;
    if (values.empty()) {
      freq = period_str.size() == 7 ? Frequency::monthly : Frequency::daily;
    }
    period = freq == Frequency::monthly ? parse_month(period_str)
                                        : parse_date(period_str);
    if (values.empty()) {
      first = period;
    } else if (!(period == add_periods(prev, 1, freq))) {
      throw std::runtime_error("target csv, line " + std::to_string(li + 1) +
                               ": non-contiguous period");
    }
    prev = period;
    try {
      std::size_t used = 0;
      const std::string cell = lines[li].substr(c + 1);
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      values.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error("target csv, line " + std::to_string(li + 1) +
                               ": value is not a number");
    }
  }
  return make_target(name, TimeGrid::between(freq, first, prev),
                     std::move(values), smooth_window);
}

double rmse(const std::vector<double>& predicted,
            const std::vector<double>& actual) {
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("rmse: length mismatch");
  }
  if (predicted.empty()) {
    throw std::invalid_argument("rmse: empty input");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(predicted.size()));
}

std::pair<std::size_t, std::size_t> window_indices(const TimeGrid& grid,
                                                   const PeriodRange& window) {
  const auto begin = grid.index_of(window.start);
  const auto end = grid.index_of(window.end);
  if (!begin || !end || *end < *begin) {
    throw std::invalid_argument("window does not lie on the target grid");
  }
  return {*begin, *end + 1};
}

NowcastModel fit_nowcast(const TargetSeries& target,
                         const std::vector<std::vector<double>>& covariates,
                         const std::vector<std::string>& covariate_names,
                         const WindowSpec& windows,
                         const lasso::SelectionRule& rule, bool eval_on_trend,
                         const std::string& model_id) {
  if (covariates.empty()) {
    throw std::invalid_argument("fit_nowcast: no covariates");
  }
  if (!covariate_names.empty() && covariate_names.size() != covariates.size()) {
    throw std::invalid_argument("fit_nowcast: covariate name count mismatch");
  }
  for (const auto& col : covariates) {
    if (col.size() != target.grid.size()) {
      throw std::invalid_argument(
          "fit_nowcast: covariates must be aligned to the target grid");
    }
  }
  const auto [train_begin, train_end] = window_indices(target.grid, windows.train);
  const auto [eval_begin, eval_end] = window_indices(target.grid, windows.eval);
  if (train_end > eval_begin) {
    throw std::invalid_argument(
        "fit_nowcast: train window must precede the eval window without overlap");
  }

  const std::vector<double>& y =
      eval_on_trend ? target.trend_values : target.values;
  std::vector<std::size_t> train_rows;
  train_rows.reserve(train_end - train_begin);
  for (std::size_t i = train_begin; i < train_end; ++i) train_rows.push_back(i);

  const lasso::DesignMatrix design =
      lasso::DesignMatrix::build_rows(covariates, y, train_rows);
  auto path = lasso::fit_path(design, rule.n_lambdas, rule.lambda_min_ratio);
  // Prediction-oriented selection gets an unpenalized candidate too, so a
  // perfect covariate can be recovered exactly. Only when OLS is well posed.
  std::size_t n_included = 0;
  for (std::size_t j = 0; j < design.n_cols(); ++j) {
    if (design.included(j)) ++n_included;
  }
  if (path.back().lambda > 0.0 && n_included + 1 < design.n_rows()) {
    path.push_back(
        lasso::fit(design, 0.0, 1e-7, 10000, &path.back().coefficients));
  }

  NowcastModel model;
  model.model_id = model_id;
  model.fit = lasso::select_lambda(path, design, rule);
  model.predictions = lasso::predict(model.fit, covariates, eval_begin, eval_end);
  model.rmse_value =
      rmse(model.predictions,
           std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(eval_begin),
                               y.begin() + static_cast<std::ptrdiff_t>(eval_end)));
  return model;
}

namespace {

// Pool columns re-indexed onto the target grid. Rows outside the pool's
// coverage are zero-filled; callers validate that both windows are covered.
std::vector<std::vector<double>> aligned_columns(
    const TimeGrid& target_grid, const TimeGrid& pool_grid,
    const std::vector<SampleSeries>& row) {
  std::vector<std::vector<double>> columns(
      row.size(), std::vector<double>(target_grid.size(), 0.0));
  for (std::size_t i = 0; i < target_grid.size(); ++i) {
    const auto src = pool_grid.index_of(target_grid.period(i));
    if (!src) continue;
    for (std::size_t p = 0; p < row.size(); ++p) {
      columns[p][i] = row[p].values[*src];
    }
  }
  return columns;
}

void check_coverage(const TimeGrid& pool_grid, const TimeGrid& target_grid,
                    const WindowSpec& windows) {
  if (pool_grid.frequency() != target_grid.frequency()) {
    throw std::invalid_argument("nowcast: pool/target frequency mismatch");
  }
  for (const PeriodRange& w : {windows.train, windows.eval}) {
    if (!pool_grid.index_of(w.start) || !pool_grid.index_of(w.end)) {
      throw std::invalid_argument(
          "nowcast: covariates do not cover the requested windows");
    }
  }
}

}  // namespace

NowcastReport compare_samples(const TargetSeries& target, const SamplePool& pool,
                              const WindowSpec& windows,
                              const lasso::SelectionRule& rule,
                              bool eval_on_trend, unsigned jobs) {
  assert_pool_valid(pool);
  check_coverage(pool.grid(), target.grid, windows);

  const std::size_t S = pool.n_samples();
  std::vector<std::string> names;
  for (const auto& q : pool.query_set) names.push_back(q.term);

  NowcastReport report;
  report.target_name = target.name;
  report.single_models.resize(S);

  // Slot S is the proposed (averaged-covariate) model. All models share the
  // selection rule verbatim (same CV folds), so RMSE differences reflect the
  // covariates, not fold luck.
  parallel_for(S + 1, jobs, [&](std::size_t s) {
    const lasso::SelectionRule& model_rule = rule;
    if (s < S) {
      const auto columns =
          aligned_columns(target.grid, pool.grid(), pool.samples[s]);
      report.single_models[s] =
          fit_nowcast(target, columns, names, windows, model_rule, eval_on_trend,
                      pool.sample_ids[s]);
    } else {
      std::vector<std::vector<double>> avg(
          pool.n_terms(), std::vector<double>(target.grid.size(), 0.0));
      for (std::size_t m = 0; m < S; ++m) {
        const auto columns =
            aligned_columns(target.grid, pool.grid(), pool.samples[m]);
        for (std::size_t p = 0; p < avg.size(); ++p) {
          for (std::size_t i = 0; i < avg[p].size(); ++i) {
            avg[p][i] += columns[p][i];
          }
        }
      }
      for (auto& col : avg) {
        for (double& v : col) v /= static_cast<double>(S);
      }
      report.proposed = fit_nowcast(target, avg, names, windows, model_rule,
                                    eval_on_trend, "proposed");
    }
  });

  report.worst = report.single_models.front().rmse_value;
  report.best = report.worst;
  double sum = 0.0;
  for (const auto& model : report.single_models) {
    report.worst = std::max(report.worst, model.rmse_value);
    report.best = std::min(report.best, model.rmse_value);
    sum += model.rmse_value;
  }
  report.mean_single = sum / static_cast<double>(S);
  return report;
}

std::string report_csv(const NowcastReport& report) {
  std::string out = "target,proposed,worst,best,average\n";
  out += report.target_name;
  out += ',' + format_value(report.proposed.rmse_value);
  out += ',' + format_value(report.worst);
  out += ',' + format_value(report.best);
  out += ',' + format_value(report.mean_single);
  out += '\n';
  return out;
}

std::string predictions_csv(const NowcastReport& report, const TimeGrid& grid,
                            const PeriodRange& eval_window,
                            const std::vector<double>& actual) {
  const auto [begin, end] = window_indices(grid, eval_window);
  std::string out = "period,actual,proposed";
  for (const auto& model : report.single_models) out += ',' + model.model_id;
  out += '\n';
  for (std::size_t i = begin; i < end; ++i) {
    out += grid.label(i);
    out += ',' + format_value(actual[i]);
    out += ',' + format_value(report.proposed.predictions[i - begin]);
    for (const auto& model : report.single_models) {
      out += ',' + format_value(model.predictions[i - begin]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace trendlab::nowcast
