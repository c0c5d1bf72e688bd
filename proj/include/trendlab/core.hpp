#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trendlab {

enum class Frequency { monthly, daily };

const char* to_string(Frequency f);
Frequency frequency_from_string(const std::string& s);

/// Calendar date. Monthly periods are represented as the first of the month.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;
};

bool is_valid_date(const Date& d);
Date add_months(Date d, int n);
Date add_days(Date d, int n);
Date add_periods(Date d, int n, Frequency f);

/// Days since 1970-01-01 (civil-calendar arithmetic, proleptic Gregorian).
std::int64_t day_number(const Date& d);
Date date_from_day_number(std::int64_t n);
int month_number(const Date& d);  // year*12 + (month-1)

std::string format_date(const Date& d);   // YYYY-MM-DD
std::string format_month(const Date& d);  // YYYY-MM
Date parse_date(const std::string& s);    // YYYY-MM-DD
Date parse_month(const std::string& s);   // YYYY-MM -> first of month

/// Inclusive period range.
struct PeriodRange {
  Date start;
  Date end;

  bool operator==(const PeriodRange&) const = default;
};

/// Ordered, contiguous list of calendar periods at one frequency.
/// Stored as (frequency, start, length); contiguity holds by construction.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(Frequency freq, Date start, std::size_t length);

  static TimeGrid monthly(Date start, std::size_t length);
  static TimeGrid daily(Date start, std::size_t length);
  /// Inclusive [start, end] at the given frequency.
  static TimeGrid between(Frequency freq, Date start, Date end);

  Frequency frequency() const { return freq_; }
  std::size_t size() const { return length_; }
  Date start() const { return start_; }
  Date end() const;
  PeriodRange range() const { return {start_, end()}; }

  Date period(std::size_t i) const;
  std::string label(std::size_t i) const;
  std::optional<std::size_t> index_of(const Date& d) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  Frequency freq_ = Frequency::monthly;
  Date start_{};
  std::size_t length_ = 0;
};

/// One search query: what was asked of the index provider.
struct TermQuery {
  std::string term;
  std::string geo;
  PeriodRange window;
  Frequency frequency = Frequency::monthly;

  TimeGrid grid() const;

  bool operator==(const TermQuery&) const = default;
};

void assert_query_valid(const TermQuery& q);

/// One downloaded (or synthetically drawn) 0-100 index series.
/// `low_volume` marks periods the source censored below 1 (stored as 0.5);
/// it is either empty or the same length as `values`.
struct SampleSeries {
  TermQuery query;
  std::vector<double> values;
  Date download_date{};
  std::string sample_id;
  std::vector<std::uint8_t> low_volume;

  bool low_volume_at(std::size_t i) const {
    return i < low_volume.size() && low_volume[i] != 0;
  }
};

/// Validates all SampleSeries invariants; returns the input unchanged.
/// Throws std::invalid_argument naming the first violated invariant and,
/// where applicable, the offending period index.
const SampleSeries& assert_series_valid(const SampleSeries& series);

/// Repeated samples of one query specification: S samples x P terms,
/// all sharing one grid and geo.
struct SamplePool {
  std::vector<TermQuery> query_set;               // P queries
  std::vector<std::string> sample_ids;            // S ids
  std::vector<std::vector<SampleSeries>> samples; // [s][p]

  std::size_t n_samples() const { return sample_ids.size(); }
  std::size_t n_terms() const { return query_set.size(); }
  TimeGrid grid() const;
  std::optional<std::size_t> sample_index(const std::string& id) const;
};

void assert_pool_valid(const SamplePool& pool);

/// The index provider's normalization: per-period share of total searches,
/// scaled so the window maximum is 100, rounded to the nearest integer
/// (ties away from zero). An all-zero share vector maps to all zeros.
std::vector<double> normalize(const std::vector<double>& raw_term_counts,
                              const std::vector<double>& raw_total_counts);

}  // namespace trendlab
