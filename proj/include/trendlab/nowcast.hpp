#pragma once

#include <string>
#include <vector>

#include "trendlab/core.hpp"
#include "trendlab/lasso.hpp"

namespace trendlab::nowcast {

/// A delayed official series to be nowcast, with its smoothed trend.
struct TargetSeries {
  std::string name;
  TimeGrid grid;
  std::vector<double> values;
  std::vector<double> trend_values;
};

/// Centered moving average of odd width; windows shrink to the available
/// range at the series edges.
std::vector<double> trend_smooth(const std::vector<double>& values, int window);

TargetSeries make_target(std::string name, TimeGrid grid,
                         std::vector<double> values, int smooth_window = 7);

/// Parses a `period,value` CSV (header required) into a target series.
TargetSeries parse_target_csv(const std::string& text, const std::string& name,
                              int smooth_window = 7);

double rmse(const std::vector<double>& predicted,
            const std::vector<double>& actual);

/// Train/evaluation split on the target grid. Train must precede eval and
/// the two may not overlap.
struct WindowSpec {
  PeriodRange train;
  PeriodRange eval;
};

struct NowcastModel {
  std::string model_id;
  lasso::LassoFit fit;
  std::vector<double> predictions;  // over the eval window
  double rmse_value = 0.0;
};

/// Contemporaneous-covariate nowcast: a penalized regression fitted on the
/// train window only (blocked CV by default), projected over the eval
/// window. With eval_on_trend the fit target and the RMSE reference are the
/// smoothed trend, otherwise the raw values.
NowcastModel fit_nowcast(const TargetSeries& target,
                         const std::vector<std::vector<double>>& covariates,
                         const std::vector<std::string>& covariate_names,
                         const WindowSpec& windows,
                         const lasso::SelectionRule& rule,
                         bool eval_on_trend = true,
                         const std::string& model_id = "model");

/// Table-style comparison: one model per sample plus the averaged-covariate
/// model. `worst`, `best` and `mean_single` summarize the single-sample runs.
struct NowcastReport {
  std::string target_name;
  std::vector<NowcastModel> single_models;
  NowcastModel proposed;
  double worst = 0.0;
  double best = 0.0;
  double mean_single = 0.0;
};

NowcastReport compare_samples(const TargetSeries& target, const SamplePool& pool,
                              const WindowSpec& windows,
                              const lasso::SelectionRule& rule,
                              bool eval_on_trend = true, unsigned jobs = 1);

/// Resolves the eval-window indices of `windows` on `grid`.
std::pair<std::size_t, std::size_t> window_indices(const TimeGrid& grid,
                                                   const PeriodRange& window);

std::string report_csv(const NowcastReport& report);
std::string predictions_csv(const NowcastReport& report, const TimeGrid& grid,
                            const PeriodRange& eval_window,
                            const std::vector<double>& actual);

}  // namespace trendlab::nowcast
