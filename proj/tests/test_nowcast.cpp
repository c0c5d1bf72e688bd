#include <doctest.h>

#include <cmath>

#include "trendlab/nowcast.hpp"
#include "trendlab/rng.hpp"
#include "testutil.hpp"

using namespace trendlab;
using namespace trendlab::nowcast;

TEST_CASE("trend smoothing") {
  const std::vector<double> v{0, 0, 0, 9, 0, 0, 0};
  CHECK(trend_smooth(v, 1) == v);
  CHECK(trend_smooth({5, 5, 5, 5}, 3) == std::vector<double>{5, 5, 5, 5});
  CHECK(trend_smooth(v, 3) == std::vector<double>{0, 0, 3, 3, 3, 0, 0});
  CHECK_THROWS_AS(trend_smooth(v, 2), std::invalid_argument);
  CHECK_THROWS_AS(trend_smooth(v, 9), std::invalid_argument);
}

TEST_CASE("rmse arithmetic") {
  CHECK(rmse({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(rmse({4, 5, 6}, {1, 2, 3}) == doctest::Approx(3.0));
  CHECK(rmse({1, 2}, {3, 2}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(rmse({1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("target csv parsing") {
  const TargetSeries t = parse_target_csv(
      "period,value\n2020-02,5\n2020-03,7.5\n2020-04,9\n", "cases", 1);
  CHECK(t.grid.frequency() == Frequency::monthly);
  CHECK(t.values == std::vector<double>{5, 7.5, 9});
  CHECK(t.trend_values == t.values);  // window 1
  CHECK_THROWS_AS(parse_target_csv("period,value\n2020-02,5\n2020-04,9\n",
                                   "bad", 1),
                  std::runtime_error);
}

namespace {

struct Fixture {
  TimeGrid grid = TimeGrid::daily(Date{2020, 2, 1}, 120);
  WindowSpec windows{{Date{2020, 2, 1}, Date{2020, 4, 30}},
                     {Date{2020, 5, 1}, Date{2020, 5, 30}}};

  TargetSeries target_from(const std::vector<double>& values,
                           int window = 1) const {
    return make_target("target", grid, values, window);
  }
};

}  // namespace

TEST_CASE("a perfect covariate drives eval error to zero") {
  Fixture f;
  rng::Rng gen(3);
  std::vector<double> signal(f.grid.size());
  for (double& v : signal) v = 50.0 + 10.0 * gen.gaussian();
  const TargetSeries target = f.target_from(signal);
  const NowcastModel model =
      fit_nowcast(target, {signal}, {"self"}, f.windows,
                  lasso::SelectionRule::cv(5, 1), false);
  CHECK(model.rmse_value < 1e-6 * 50.0);
}

TEST_CASE("no usable covariates fall back to the training mean") {
  Fixture f;
  rng::Rng gen(5);
  std::vector<double> values(f.grid.size());
  for (double& v : values) v = 20.0 + 4.0 * gen.gaussian();
  const TargetSeries target = f.target_from(values);
  // A constant column is excluded from the design, leaving intercept only.
  const std::vector<double> flat(f.grid.size(), 42.0);
  const NowcastModel model = fit_nowcast(target, {flat}, {"flat"}, f.windows,
                                         lasso::SelectionRule::bic(), false);
  CHECK(model.fit.active_set.empty());
  const auto [begin, end] = window_indices(f.grid, f.windows.train);
  double mean = 0.0;
  for (std::size_t i = begin; i < end; ++i) mean += values[i];
  mean /= static_cast<double>(end - begin);
  for (double p : model.predictions) {
    CHECK(p == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("window validation") {
  Fixture f;
  std::vector<double> values(f.grid.size(), 0.0);
  values[0] = 1.0;
  const TargetSeries target = f.target_from(values);
  const std::vector<double> cov(f.grid.size(), 1.0);

  WindowSpec overlapping = f.windows;
  overlapping.eval.start = Date{2020, 4, 15};
  CHECK_THROWS_WITH_AS(fit_nowcast(target, {cov}, {}, overlapping,
                                   lasso::SelectionRule::bic(), false),
                       doctest::Contains("overlap"), std::invalid_argument);

  WindowSpec outside = f.windows;
  outside.eval.end = Date{2021, 1, 1};
  CHECK_THROWS_AS(fit_nowcast(target, {cov}, {}, outside,
                              lasso::SelectionRule::bic(), false),
                  std::invalid_argument);
}

TEST_CASE("eval-window target values never enter the fit") {
  Fixture f;
  rng::Rng gen(11);
  std::vector<double> covariate(f.grid.size());
  for (double& v : covariate) v = 30.0 + 5.0 * gen.gaussian();
  std::vector<double> values(f.grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = 2.0 * covariate[i] + gen.gaussian();
  }
  const TargetSeries clean = f.target_from(values);

  // Poison every eval-window observation with a sentinel.
  const auto [eval_begin, eval_end] = window_indices(f.grid, f.windows.eval);
  std::vector<double> poisoned_values = values;
  for (std::size_t i = eval_begin; i < eval_end; ++i) {
    poisoned_values[i] = 1e12;
  }
  const TargetSeries poisoned = f.target_from(poisoned_values);

  const auto rule = lasso::SelectionRule::cv(5, 7);
  const NowcastModel a = fit_nowcast(clean, {covariate}, {}, f.windows, rule,
                                     false);
  const NowcastModel b = fit_nowcast(poisoned, {covariate}, {}, f.windows, rule,
                                     false);
  CHECK(a.fit.coefficients == b.fit.coefficients);
  CHECK(a.fit.intercept == b.fit.intercept);
  CHECK(a.predictions == b.predictions);
}

TEST_CASE("two identical samples: proposed equals the single models") {
  testutil::PoolSpec spec;
  spec.n_terms = 3;
  spec.n_samples = 1;
  spec.months = 60;
  spec.fraction = 0.6;
  const auto single = testutil::make_pool(spec);

  SamplePool pool = single;
  pool.sample_ids.push_back("copy");
  pool.samples.push_back(pool.samples[0]);
  for (auto& series : pool.samples[1]) series.sample_id = "copy";

  rng::Rng gen(13);
  std::vector<double> values(pool.grid().size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = pool.samples[0][0].values[i] + 0.5 * gen.gaussian();
  }
  const TargetSeries target =
      make_target("t", pool.grid(), values, 1);
  const WindowSpec windows{{Date{2009, 1, 1}, Date{2012, 12, 1}},
                           {Date{2013, 1, 1}, Date{2013, 12, 1}}};
  const NowcastReport report = compare_samples(
      target, pool, windows, lasso::SelectionRule::bic(), false);
  CHECK(report.proposed.rmse_value ==
        doctest::Approx(report.single_models[0].rmse_value));
  CHECK(report.proposed.rmse_value ==
        doctest::Approx(report.single_models[1].rmse_value));
  CHECK(report.worst >= report.mean_single);
  CHECK(report.mean_single >= report.best);
}

TEST_CASE("report csv carries the four summary columns") {
  NowcastReport report;
  report.target_name = "cases";
  NowcastModel m;
  m.rmse_value = 2.0;
  report.single_models = {m, m};
  report.proposed.rmse_value = 1.5;
  report.worst = 2.0;
  report.best = 2.0;
  report.mean_single = 2.0;
  CHECK(report_csv(report) ==
        "target,proposed,worst,best,average\ncases,1.5,2,2,2\n");
}
