#include "trendlab/core.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace trendlab {

const char* to_string(Frequency f) {
  return f == Frequency::monthly ? "monthly" : "daily";
}

Frequency frequency_from_string(const std::string& s) {
  if (s == "monthly") return Frequency::monthly;
  if (s == "daily") return Frequency::daily;
  throw std::invalid_argument("unknown frequency: " + s);
}

namespace {

int days_in_month(int year, int month) {
  static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[month - 1];
}

}  // namespace

bool is_valid_date(const Date& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

Date add_months(Date d, int n) {
  const int m = d.year * 12 + (d.month - 1) + n;
  Date out;
  out.year = m >= 0 ? m / 12 : -((-m + 11) / 12);
  out.month = m - out.year * 12 + 1;
  out.day = 1;
  return out;
}

std::int64_t day_number(const Date& d) {
  // Howard Hinnant's days_from_civil.
  const int y = d.year - (d.month <= 2);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d.day) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) -
         719468;
}

Date date_from_day_number(std::int64_t n) {
  // civil_from_days.
  n += 719468;
  const std::int64_t era = (n >= 0 ? n : n - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(n - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
              static_cast<int>(d)};
}

Date add_days(Date d, int n) { return date_from_day_number(day_number(d) + n); }

Date add_periods(Date d, int n, Frequency f) {
  return f == Frequency::monthly ? add_months(d, n) : add_days(d, n);
}

int month_number(const Date& d) { return d.year * 12 + (d.month - 1); }

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string format_month(const Date& d) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", d.year, d.month);
  return buf;
}

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace

Date parse_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !all_digits(s, 0, 4) ||
      !all_digits(s, 5, 7) || !all_digits(s, 8, 10)) {
    throw std::invalid_argument("expected YYYY-MM-DD date, got '" + s + "'");
  }
  Date d{std::stoi(s.substr(0, 4)), std::stoi(s.substr(5, 2)),
         std::stoi(s.substr(8, 2))};
  if (!is_valid_date(d)) {
    throw std::invalid_argument("invalid calendar date '" + s + "'");
  }
  return d;
}

Date parse_month(const std::string& s) {
  if (s.size() != 7 || s[4] != '-' || !all_digits(s, 0, 4) ||
      !all_digits(s, 5, 7)) {
    throw std::invalid_argument("expected YYYY-MM month, got '" + s + "'");
  }
  Date d{std::stoi(s.substr(0, 4)), std::stoi(s.substr(5, 2)), 1};
  if (!is_valid_date(d)) {
    throw std::invalid_argument("invalid calendar month '" + s + "'");
  }
  return d;
}

TimeGrid::TimeGrid(Frequency freq, Date start, std::size_t length)
    : freq_(freq), start_(start), length_(length) {
  if (!is_valid_date(start)) {
    throw std::invalid_argument("TimeGrid: invalid start date");
  }
  if (freq == Frequency::monthly && start.day != 1) {
    throw std::invalid_argument(
        "TimeGrid: monthly grids start on the first of a month");
  }
  if (length < 2) {
    throw std::invalid_argument("TimeGrid: needs at least 2 periods");
  }
}

TimeGrid TimeGrid::monthly(Date start, std::size_t length) {
  return TimeGrid(Frequency::monthly, start, length);
}

TimeGrid TimeGrid::daily(Date start, std::size_t length) {
  return TimeGrid(Frequency::daily, start, length);
}

TimeGrid TimeGrid::between(Frequency freq, Date start, Date end) {
  std::int64_t n;
  if (freq == Frequency::monthly) {
    start.day = 1;
    Date e = end;
    e.day = 1;
    n = month_number(e) - month_number(start) + 1;
  } else {
    n = day_number(end) - day_number(start) + 1;
  }
  if (n < 2) {
    throw std::invalid_argument("TimeGrid: window must span at least 2 periods");
  }
  return TimeGrid(freq, start, static_cast<std::size_t>(n));
}

Date TimeGrid::end() const {
  return add_periods(start_, static_cast<int>(length_) - 1, freq_);
}

Date TimeGrid::period(std::size_t i) const {
  if (i >= length_) throw std::out_of_range("TimeGrid::period: index out of range");
  return add_periods(start_, static_cast<int>(i), freq_);
}

std::string TimeGrid::label(std::size_t i) const {
  const Date d = period(i);
  return freq_ == Frequency::monthly ? format_month(d) : format_date(d);
}

std::optional<std::size_t> TimeGrid::index_of(const Date& d) const {
  std::int64_t off;
  if (freq_ == Frequency::monthly) {
    if (d.day != 1) return std::nullopt;
    off = month_number(d) - month_number(start_);
  } else {
    off = day_number(d) - day_number(start_);
  }
  if (off < 0 || off >= static_cast<std::int64_t>(length_)) return std::nullopt;
  return static_cast<std::size_t>(off);
}

TimeGrid TermQuery::grid() const {
  return TimeGrid::between(frequency, window.start, window.end);
}

void assert_query_valid(const TermQuery& q) {
  if (q.term.empty()) throw std::invalid_argument("query term is empty");
  if (!is_valid_date(q.window.start) || !is_valid_date(q.window.end)) {
    throw std::invalid_argument("query window has an invalid date");
  }
  if (q.window.end < q.window.start) {
    throw std::invalid_argument("query window start exceeds end");
  }
  if (q.frequency == Frequency::monthly &&
      (q.window.start.day != 1 || q.window.end.day != 1)) {
    throw std::invalid_argument(
        "monthly query window must use first-of-month dates");
  }
}

const SampleSeries& assert_series_valid(const SampleSeries& series) {
  assert_query_valid(series.query);
  const TimeGrid grid = series.query.grid();
  if (series.values.size() != grid.size()) {
    throw std::invalid_argument(
        "series length " + std::to_string(series.values.size()) +
        " does not match grid length " + std::to_string(grid.size()));
  }
  if (!series.low_volume.empty() &&
      series.low_volume.size() != series.values.size()) {
    throw std::invalid_argument("low_volume mask length mismatch");
  }
  double max_value = 0.0;
  for (std::size_t t = 0; t < series.values.size(); ++t) {
    const double v = series.values[t];
    if (!(v >= 0.0 && v <= 100.0)) {
      throw std::invalid_argument("value " + std::to_string(v) +
                                  " out of [0,100] at period index " +
                                  std::to_string(t));
    }
    if (v > max_value) max_value = v;
  }
  if (max_value > 0.0 && max_value != 100.0) {
    throw std::invalid_argument(
        "nonzero series must attain 100; observed max " +
        std::to_string(max_value));
  }
  return series;
}

TimeGrid SamplePool::grid() const {
  if (query_set.empty()) throw std::invalid_argument("pool has no queries");
  return query_set.front().grid();
}

std::optional<std::size_t> SamplePool::sample_index(const std::string& id) const {
  for (std::size_t s = 0; s < sample_ids.size(); ++s) {
    if (sample_ids[s] == id) return s;
  }
  return std::nullopt;
}

void assert_pool_valid(const SamplePool& pool) {
  if (pool.query_set.empty()) throw std::invalid_argument("pool has no queries");
  if (pool.sample_ids.empty() || pool.samples.empty()) {
    throw std::invalid_argument("pool has no samples");
  }
  if (pool.samples.size() != pool.sample_ids.size()) {
    throw std::invalid_argument("pool sample_ids/samples size mismatch");
  }
  const TimeGrid grid = pool.grid();
  const std::string& geo = pool.query_set.front().geo;
  for (const TermQuery& q : pool.query_set) {
    if (q.geo != geo) throw std::invalid_argument("pool mixes geos");
    if (!(q.grid() == grid)) throw std::invalid_argument("pool mixes grids");
  }
  for (std::size_t s = 0; s < pool.samples.size(); ++s) {
    if (pool.samples[s].size() != pool.query_set.size()) {
      throw std::invalid_argument("pool row " + std::to_string(s) +
                                  " has wrong term count");
    }
    for (std::size_t p = 0; p < pool.samples[s].size(); ++p) {
      const SampleSeries& series = pool.samples[s][p];
      if (series.query.term != pool.query_set[p].term) {
        throw std::invalid_argument("pool series term mismatch");
      }
      if (series.values.size() != grid.size()) {
        throw std::invalid_argument("pool series grid length mismatch");
      }
    }
  }
  // No duplicate (sample_id, term) pairs: ids unique, terms unique.
  for (std::size_t a = 0; a < pool.sample_ids.size(); ++a) {
    for (std::size_t b = a + 1; b < pool.sample_ids.size(); ++b) {
      if (pool.sample_ids[a] == pool.sample_ids[b]) {
        throw std::invalid_argument("duplicate sample_id " + pool.sample_ids[a]);
      }
    }
  }
  for (std::size_t a = 0; a < pool.query_set.size(); ++a) {
    for (std::size_t b = a + 1; b < pool.query_set.size(); ++b) {
      if (pool.query_set[a].term == pool.query_set[b].term) {
        throw std::invalid_argument("duplicate term " + pool.query_set[a].term);
      }
    }
  }
}

std::vector<double> normalize(const std::vector<double>& raw_term_counts,
                              const std::vector<double>& raw_total_counts) {
  if (raw_term_counts.size() != raw_total_counts.size()) {
    throw std::invalid_argument("normalize: term/total length mismatch");
  }
  if (raw_term_counts.empty()) {
    throw std::invalid_argument("normalize: empty input");
  }
  const std::size_t n = raw_term_counts.size();
  std::vector<double> shares(n);
  double max_share = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double total = raw_total_counts[t];
    const double count = raw_term_counts[t];
    if (!std::isfinite(total) || !std::isfinite(count)) {
      throw std::invalid_argument("normalize: non-finite count at period " +
                                  std::to_string(t));
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("normalize: total must be positive at period " +
                                  std::to_string(t));
    }
    if (count < 0.0) {
      throw std::invalid_argument("normalize: negative term count at period " +
                                  std::to_string(t));
    }
    if (count > total) {
      throw std::invalid_argument(
          "normalize: term count exceeds total at period " + std::to_string(t));
    }
    shares[t] = count / total;
    if (shares[t] > max_share) max_share = shares[t];
  }
  std::vector<double> out(n, 0.0);
  if (max_share == 0.0) return out;
  for (std::size_t t = 0; t < n; ++t) {
    out[t] = std::round(100.0 * shares[t] / max_share);
  }
  return out;
}

}  // namespace trendlab
