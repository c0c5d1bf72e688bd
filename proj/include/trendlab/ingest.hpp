#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trendlab/core.hpp"

namespace trendlab::ingest {

/// Parses a Trends-style export:
///   line 1: `Category: <name>`
///   line 2: blank
///   line 3: `Month,<term>: (<geo>)` (or `Day,...`)
///   data:   `<YYYY-MM|YYYY-MM-DD>,<integer 0-100 | "<1">`
/// Censored `<1` cells parse to 0.5 with the low-volume flag set. Periods
/// must be contiguous at the header frequency. download_date and sample_id
/// are left unset; the catalog assigns them.
SampleSeries parse_trends_csv(const std::string& text);

/// Canonical serialization (UTF-8, LF, no BOM) that parse_trends_csv
/// round-trips exactly. Requires integer values apart from flagged 0.5 cells.
std::string serialize_trends_csv(const SampleSeries& series);

/// FNV-1a 64 content hash used for catalog checksums.
std::uint64_t content_hash(const std::string& text);

/// Directory/file slug for a term: lowercase, non-alphanumerics collapsed
/// to single dashes.
std::string term_slug(const std::string& term);

struct CatalogEntry {
  TermQuery query;
  Date download_date{};
  std::string file_path;  // relative to the catalog root
  std::uint64_t checksum = 0;
};

/// On-disk store of samples, `<root>/<geo>/<term-slug>/<download-date>.csv`
/// plus a JSON index. Writers serialize through an advisory lock file and
/// replace files atomically (write-temp-then-rename), so a crashed writer
/// leaves either the old or the new index, never a torn one.
class Catalog {
 public:
  /// Opens an existing catalog or initializes an empty one at root.
  explicit Catalog(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  const std::vector<CatalogEntry>& entries() const { return entries_; }

  struct AddResult {
    CatalogEntry entry;
    bool already_present = false;  // idempotent re-add of identical content
  };

  /// Validates, canonicalizes and stores one series. Re-adding identical
  /// content for the same query and date is a reported no-op; conflicting
  /// content for the same query and date is an error.
  AddResult add(const SampleSeries& series, const Date& download_date);

  SampleSeries load_entry(const CatalogEntry& entry) const;

  /// Loads all samples of the requested queries into a pool, grouped by
  /// download date. Every term must be present for the same set of dates.
  SamplePool load_pool(const std::vector<TermQuery>& query_set) const;

  /// Rescans the directory tree and rebuilds the index from file contents.
  void rebuild();

 private:
  std::filesystem::path root_;
  std::vector<CatalogEntry> entries_;

  void load_index();
  void store_index() const;
};

}  // namespace trendlab::ingest
