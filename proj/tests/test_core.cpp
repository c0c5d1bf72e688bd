#include <doctest.h>

#include <stdexcept>

#include "trendlab/core.hpp"
#include "trendlab/rng.hpp"

using namespace trendlab;

TEST_CASE("calendar arithmetic round-trips") {
  const Date d{2020, 2, 29};
  CHECK(is_valid_date(d));
  CHECK(!is_valid_date(Date{2021, 2, 29}));
  CHECK(day_number(Date{1970, 1, 1}) == 0);
  CHECK(date_from_day_number(day_number(d)) == d);
  CHECK(add_days(Date{2019, 12, 31}, 1) == Date{2020, 1, 1});
  CHECK(add_months(Date{2019, 12, 1}, 1) == Date{2020, 1, 1});
  CHECK(add_months(Date{2009, 1, 1}, 119) == Date{2018, 12, 1});
  CHECK(format_date(Date{2009, 1, 5}) == "2009-01-05");
  CHECK(parse_month("2009-01") == Date{2009, 1, 1});
  CHECK(parse_date("2009-01-05") == Date{2009, 1, 5});
  CHECK_THROWS_AS(parse_month("2009-13"), std::invalid_argument);
  CHECK_THROWS_AS(parse_date("2009-1-05"), std::invalid_argument);
}

TEST_CASE("time grid indexing and labels") {
  const TimeGrid grid = TimeGrid::monthly(Date{2009, 1, 1}, 120);
  CHECK(grid.size() == 120);
  CHECK(grid.end() == Date{2018, 12, 1});
  CHECK(grid.label(0) == "2009-01");
  CHECK(grid.label(119) == "2018-12");
  CHECK(grid.index_of(Date{2010, 1, 1}) == 12);
  CHECK(!grid.index_of(Date{2020, 1, 1}).has_value());
  CHECK(TimeGrid::between(Frequency::monthly, Date{2009, 1, 1},
                          Date{2018, 12, 1}) == grid);
  CHECK_THROWS_AS(TimeGrid::monthly(Date{2009, 1, 1}, 1), std::invalid_argument);

  const TimeGrid daily = TimeGrid::daily(Date{2020, 2, 27}, 4);
  CHECK(daily.label(3) == "2020-03-01");
  CHECK(daily.index_of(Date{2020, 2, 29}) == 2);
}

TEST_CASE("normalize: constant share maps to max everywhere") {
  CHECK(normalize({5, 5, 5}, {10, 10, 10}) == std::vector<double>{100, 100, 100});
}

TEST_CASE("normalize: zero shares map to zeros") {
  CHECK(normalize({0, 0, 0}, {10, 10, 10}) == std::vector<double>{0, 0, 0});
}

TEST_CASE("normalize: hand-computed shares") {
  // shares 0.1, 0.2, 0.4 scaled by 100/0.4
  CHECK(normalize({1, 2, 4}, {10, 10, 10}) == std::vector<double>{25, 50, 100});
}

TEST_CASE("normalize: error paths") {
  CHECK_THROWS_AS(normalize({1, 2}, {10}), std::invalid_argument);
  CHECK_THROWS_AS(normalize({1, 2}, {10, 0}), std::invalid_argument);
  CHECK_THROWS_AS(normalize({11, 2}, {10, 10}), std::invalid_argument);
}

TEST_CASE("normalize: invariance and idempotence properties") {
  rng::Rng gen(42);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + gen.below(20);
    std::vector<double> counts(n), totals(n);
    for (std::size_t i = 0; i < n; ++i) {
      totals[i] = static_cast<double>(100 + gen.below(10000));
      counts[i] = static_cast<double>(gen.below(
          static_cast<std::uint64_t>(totals[i]) + 1));
    }
    const auto base = normalize(counts, totals);

    // Scaling both counts and totals by the same factor keeps shares fixed.
    std::vector<double> counts_scaled(n), totals_scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
      counts_scaled[i] = counts[i] * 7.0;
      totals_scaled[i] = totals[i] * 7.0;
    }
    CHECK(normalize(counts_scaled, totals_scaled) == base);

    // Scaling term counts alone rescales shares; max-scaling cancels it.
    bool fits = true;
    for (std::size_t i = 0; i < n; ++i) {
      counts_scaled[i] = counts[i] * 1.5;
      totals_scaled[i] = totals[i] * 2.0;
      if (counts_scaled[i] > totals_scaled[i]) fits = false;
    }
    if (fits) CHECK(normalize(counts_scaled, totals_scaled) == base);

    // Renormalizing a normalized series against constant totals is a no-op.
    const std::vector<double> ones(n, 100.0);
    CHECK(normalize(base, ones) == base);
  }
}

namespace {

SampleSeries demo_series() {
  SampleSeries s;
  s.query = TermQuery{"gdp growth", "BR",
                      PeriodRange{Date{2009, 1, 1}, Date{2009, 3, 1}},
                      Frequency::monthly};
  s.values = {10, 100, 50};
  s.sample_id = "s00";
  return s;
}

}  // namespace

TEST_CASE("series validation accepts a valid series") {
  const SampleSeries s = demo_series();
  CHECK(&assert_series_valid(s) == &s);
}

TEST_CASE("series validation names the violated bound") {
  SampleSeries s = demo_series();
  s.values[2] = 101;
  CHECK_THROWS_WITH_AS(assert_series_valid(s),
                       doctest::Contains("out of [0,100]"),
                       std::invalid_argument);
  s = demo_series();
  s.values = {10, 99, 50};  // nonzero but never reaches 100
  CHECK_THROWS_WITH_AS(assert_series_valid(s), doctest::Contains("100"),
                       std::invalid_argument);
}

TEST_CASE("series validation catches grid length mismatch") {
  SampleSeries s = demo_series();
  s.values.push_back(3);
  CHECK_THROWS_AS(assert_series_valid(s), std::invalid_argument);
}

TEST_CASE("query validation") {
  TermQuery q{"", "US", PeriodRange{Date{2009, 1, 1}, Date{2009, 5, 1}},
              Frequency::monthly};
  CHECK_THROWS_AS(assert_query_valid(q), std::invalid_argument);
  q.term = "inflation";
  CHECK_NOTHROW(assert_query_valid(q));
  std::swap(q.window.start, q.window.end);
  CHECK_THROWS_AS(assert_query_valid(q), std::invalid_argument);
}
