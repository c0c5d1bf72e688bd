#include "trendlab/ingest.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace trendlab::ingest {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
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
  if (!current.empty()) {
    if (current.back() == '\r') current.pop_back();
    lines.push_back(current);
  }
  return lines;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("trends csv, line " + std::to_string(line_no) + ": " +
                           what);
}

bool parse_int_0_100(const std::string& s, int* out) {
  if (s.empty() || s.size() > 3) return false;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  if (v > 100) return false;
  *out = v;
  return true;
}

}  // namespace

SampleSeries parse_trends_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty() || lines[0].rfind("Category:", 0) != 0) {
    parse_error(1, "expected 'Category: <name>' header");
  }
  if (lines.size() < 2 || !lines[1].empty()) {
    parse_error(2, "expected blank separator line");
  }
  if (lines.size() < 3) parse_error(3, "missing column header");

  const std::string& header = lines[2];
  const std::size_t comma = header.find(',');
  if (comma == std::string::npos) {
    parse_error(3, "expected '<Month|Day>,<term>: (<geo>)'");
  }
  const std::string freq_token = header.substr(0, comma);
  Frequency freq;
  if (freq_token == "Month") {
    freq = Frequency::monthly;
  } else if (freq_token == "Day") {
    freq = Frequency::daily;
  } else {
    parse_error(3, "unknown period column '" + freq_token + "'");
  }
  const std::string rest = header.substr(comma + 1);
  if (rest.size() < 5 || rest.back() != ')') {
    parse_error(3, "expected term header '<term>: (<geo>)'");
  }
  const std::size_t open = rest.rfind(" (");
  if (open == std::string::npos || open < 1 || rest[open - 1] != ':') {
    parse_error(3, "expected term header '<term>: (<geo>)'");
  }
  const std::string term = rest.substr(0, open - 1);
  const std::string geo = rest.substr(open + 2, rest.size() - open - 3);
  if (term.empty()) parse_error(3, "empty term");
  if (geo.empty()) parse_error(3, "empty geo");

  std::vector<double> values;
  std::vector<std::uint8_t> low_volume;
  bool any_low = false;
  Date first{}, prev{};
  for (std::size_t li = 3; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (line.empty()) continue;
    const std::size_t c = line.find(',');
    if (c == std::string::npos) parse_error(li + 1, "expected '<period>,<value>'");
    const std::string period_str = line.substr(0, c);
    const std::string value_str = line.substr(c + 1);

    Date period;
    try {
      period = freq == Frequency::monthly ? parse_month(period_str)
                                          : parse_date(period_str);
    } catch (const std::exception& e) {
      parse_error(li + 1, e.what());
    }
    if (values.empty()) {
      first = period;
    } else if (!(period == add_periods(prev, 1, freq))) {
      parse_error(li + 1, "non-contiguous period '" + period_str + "'");
    }
    prev = period;

    if (value_str == "<1") {
      values.push_back(0.5);
      low_volume.push_back(1);
      any_low = true;
    } else {
      int v = 0;
      if (!parse_int_0_100(value_str, &v)) {
        parse_error(li + 1,
                    "value '" + value_str + "' is not an integer in [0,100] or '<1'");
      }
      values.push_back(static_cast<double>(v));
      low_volume.push_back(0);
    }
  }
  if (values.size() < 2) {
    throw std::runtime_error("trends csv: needs at least 2 data rows");
  }

  SampleSeries series;
  series.query = TermQuery{term, geo, PeriodRange{first, prev}, freq};
  series.values = std::move(values);
  if (any_low) series.low_volume = std::move(low_volume);
  return series;
}

std::string serialize_trends_csv(const SampleSeries& series) {
  const TimeGrid grid = series.query.grid();
  if (series.values.size() != grid.size()) {
    throw std::invalid_argument("serialize: series length does not match grid");
  }
  std::string out = "Category: All categories\n\n";
  out += series.query.frequency == Frequency::monthly ? "Month," : "Day,";
  out += series.query.term;
  out += ": (";
  out += series.query.geo;
  out += ")\n";
  for (std::size_t t = 0; t < series.values.size(); ++t) {
    out += grid.label(t);
    out += ',';
    const double v = series.values[t];
    if (series.low_volume_at(t)) {
      if (v != 0.5) {
        throw std::invalid_argument("serialize: low-volume cell must hold 0.5");
      }
      out += "<1";
    } else {
      if (v != std::floor(v) || v < 0.0 || v > 100.0) {
        throw std::invalid_argument(
            "serialize: values must be integers in [0,100] (or flagged '<1')");
      }
      char buf[8];
      std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(v));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::uint64_t content_hash(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string term_slug(const std::string& term) {
  std::string slug;
  bool pending_dash = false;
  for (char c : term) {
    const char lower = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    if ((lower >= 'a' && lower <= 'z') || (lower >= '0' && lower <= '9')) {
      if (pending_dash && !slug.empty()) slug.push_back('-');
      pending_dash = false;
      slug.push_back(lower);
    } else {
      pending_dash = true;
    }
  }
  return slug.empty() ? "term" : slug;
}

namespace {

constexpr const char* kIndexFile = "index.json";
constexpr const char* kLockFile = ".lock";

std::string checksum_hex(std::uint64_t checksum) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(checksum));
  return buf;
}

std::uint64_t checksum_from_hex(const std::string& hex) {
  return std::stoull(hex, nullptr, 16);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp =
      path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Advisory writer lock: exists-check via O_EXCL creation, removed on scope
/// exit. Readers never take it.
class ScopedLock {
 public:
  explicit ScopedLock(std::filesystem::path path) : path_(std::move(path)) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd_ >= 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    throw std::runtime_error("catalog lock busy: " + path_.string());
  }
  ~ScopedLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }
  ScopedLock(const ScopedLock&) = delete;
  ScopedLock& operator=(const ScopedLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

bool entry_less(const CatalogEntry& a, const CatalogEntry& b) {
  if (a.query.geo != b.query.geo) return a.query.geo < b.query.geo;
  if (a.query.term != b.query.term) return a.query.term < b.query.term;
  return a.download_date < b.download_date;
}

nlohmann::json entry_to_json(const CatalogEntry& e) {
  return nlohmann::json{{"term", e.query.term},
                        {"geo", e.query.geo},
                        {"frequency", to_string(e.query.frequency)},
                        {"window_start", format_date(e.query.window.start)},
                        {"window_end", format_date(e.query.window.end)},
                        {"download_date", format_date(e.download_date)},
                        {"file", e.file_path},
                        {"checksum", checksum_hex(e.checksum)}};
}

CatalogEntry entry_from_json(const nlohmann::json& j) {
  CatalogEntry e;
  e.query.term = j.at("term").get<std::string>();
  e.query.geo = j.at("geo").get<std::string>();
  e.query.frequency = frequency_from_string(j.at("frequency").get<std::string>());
  e.query.window.start = parse_date(j.at("window_start").get<std::string>());
  e.query.window.end = parse_date(j.at("window_end").get<std::string>());
  e.download_date = parse_date(j.at("download_date").get<std::string>());
  e.file_path = j.at("file").get<std::string>();
  e.checksum = checksum_from_hex(j.at("checksum").get<std::string>());
  return e;
}

}  // namespace

Catalog::Catalog(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
  if (std::filesystem::exists(root_ / kIndexFile)) {
    load_index();
  } else {
    ScopedLock lock(root_ / kLockFile);
    store_index();
  }
}

void Catalog::load_index() {
  const nlohmann::json doc = nlohmann::json::parse(read_file(root_ / kIndexFile));
  entries_.clear();
  for (const auto& j : doc.at("entries")) {
    entries_.push_back(entry_from_json(j));
  }
  std::sort(entries_.begin(), entries_.end(), entry_less);
}

void Catalog::store_index() const {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["entries"] = nlohmann::json::array();
  for (const auto& e : entries_) doc["entries"].push_back(entry_to_json(e));
  write_file_atomic(root_ / kIndexFile, doc.dump(2) + "\n");
}

Catalog::AddResult Catalog::add(const SampleSeries& series,
                                const Date& download_date) {
  assert_series_valid(series);
  if (!is_valid_date(download_date)) {
    throw std::invalid_argument("catalog add: invalid download date");
  }
  const std::string content = serialize_trends_csv(series);
  const std::uint64_t checksum = content_hash(content);

  // The whole read-check-write cycle runs under the writer lock; the index
  // is refreshed first so concurrent writers cannot drop each other's adds.
  ScopedLock lock(root_ / kLockFile);
  if (std::filesystem::exists(root_ / kIndexFile)) load_index();

  const std::string slug = term_slug(series.query.term);
  for (const CatalogEntry& e : entries_) {
    if (e.query == series.query && e.download_date == download_date) {
      if (e.checksum == checksum) return AddResult{e, true};
      throw std::runtime_error(
          "catalog add: conflicting content for same query and date (" +
          series.query.term + ", " + format_date(download_date) + ")");
    }
    if (e.query.geo == series.query.geo && e.query.term != series.query.term &&
        term_slug(e.query.term) == slug) {
      throw std::runtime_error("catalog add: term slug collision between '" +
                               e.query.term + "' and '" + series.query.term + "'");
    }
  }

  CatalogEntry entry;
  entry.query = series.query;
  entry.download_date = download_date;
  entry.checksum = checksum;
  entry.file_path =
      series.query.geo + "/" + slug + "/" + format_date(download_date) + ".csv";

  const std::filesystem::path full = root_ / entry.file_path;
  std::filesystem::create_directories(full.parent_path());
  write_file_atomic(full, content);

  entries_.push_back(entry);
  std::sort(entries_.begin(), entries_.end(), entry_less);
  store_index();
  return AddResult{entry, false};
}

SampleSeries Catalog::load_entry(const CatalogEntry& entry) const {
  const std::string content = read_file(root_ / entry.file_path);
  if (content_hash(content) != entry.checksum) {
    throw std::runtime_error("catalog: checksum mismatch for " + entry.file_path);
  }
  SampleSeries series = parse_trends_csv(content);
  series.download_date = entry.download_date;
  series.sample_id = format_date(entry.download_date);
  return series;
}

SamplePool Catalog::load_pool(const std::vector<TermQuery>& query_set) const {
  if (query_set.empty()) {
    throw std::invalid_argument("load_pool: empty query set");
  }
  // Per term: download date -> entry.
  std::vector<std::map<std::string, const CatalogEntry*>> by_term(query_set.size());
  for (std::size_t p = 0; p < query_set.size(); ++p) {
    for (const CatalogEntry& e : entries_) {
      if (e.query == query_set[p]) {
        by_term[p].emplace(format_date(e.download_date), &e);
      }
    }
    if (by_term[p].empty()) {
      throw std::runtime_error("load_pool: no samples for term '" +
                               query_set[p].term + "'");
    }
  }
  std::set<std::string> dates;
  for (const auto& [date, entry] : by_term[0]) dates.insert(date);
  for (std::size_t p = 1; p < query_set.size(); ++p) {
    for (const auto& date : dates) {
      if (by_term[p].find(date) == by_term[p].end()) {
        throw std::runtime_error("load_pool: term '" + query_set[p].term +
                                 "' missing download date " + date);
      }
    }
    for (const auto& [date, entry] : by_term[p]) {
      if (dates.find(date) == dates.end()) {
        throw std::runtime_error("load_pool: term '" + query_set[0].term +
                                 "' missing download date " + date);
      }
    }
  }

  SamplePool pool;
  pool.query_set = query_set;
  for (const auto& date : dates) {
    pool.sample_ids.push_back(date);
    std::vector<SampleSeries> row;
    row.reserve(query_set.size());
    for (std::size_t p = 0; p < query_set.size(); ++p) {
      row.push_back(load_entry(*by_term[p].at(date)));
    }
    pool.samples.push_back(std::move(row));
  }
  assert_pool_valid(pool);
  return pool;
}

void Catalog::rebuild() {
  std::vector<CatalogEntry> scanned;
  for (const auto& item :
       std::filesystem::recursive_directory_iterator(root_)) {
    if (!item.is_regular_file() || item.path().extension() != ".csv") continue;
    const std::string content = read_file(item.path());
    SampleSeries series = parse_trends_csv(content);
    CatalogEntry entry;
    entry.query = series.query;
    entry.download_date = parse_date(item.path().stem().string());
    entry.checksum = content_hash(content);
    entry.file_path =
        std::filesystem::relative(item.path(), root_).generic_string();
    scanned.push_back(std::move(entry));
  }
  std::sort(scanned.begin(), scanned.end(), entry_less);
  ScopedLock lock(root_ / kLockFile);
  entries_ = std::move(scanned);
  store_index();
}

}  // namespace trendlab::ingest
