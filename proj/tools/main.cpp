// trendlab command-line tool: synthetic panels, sample catalogs, correlation
// diagnostics, the selection experiment and nowcast comparisons, all emitted
// as CSV tables plus a JSON run manifest.

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trendlab/aggregate.hpp"
#include "trendlab/core.hpp"
#include "trendlab/ingest.hpp"
#include "trendlab/lasso.hpp"
#include "trendlab/nowcast.hpp"
#include "trendlab/rng.hpp"
#include "trendlab/sampler.hpp"
#include "trendlab/sim.hpp"
#include "trendlab/version.hpp"
#include "trendlab/vintage.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trendlab;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw std::runtime_error("short write to " + path.string());
}

std::string now_iso8601() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Date parse_period(const std::string& s, Frequency freq) {
  return freq == Frequency::monthly ? parse_month(s) : parse_date(s);
}

PeriodRange parse_range(const std::string& s, Frequency freq) {
  const std::size_t colon = s.find(':');
  if (colon == std::string::npos) {
    throw std::runtime_error("expected '<start>:<end>' range, got '" + s + "'");
  }
  return {parse_period(s.substr(0, colon), freq),
          parse_period(s.substr(colon + 1), freq)};
}

/// Binds CLI options to config-file keys: a value is taken from the command
/// line when given, else from the config document, else from the default.
class Params {
 public:
  template <typename T>
  void bind(CLI::Option* opt, std::string key, T* var) {
    entries_.push_back(Entry{
        opt, std::move(key),
        [var](const json& j) { *var = j.get<T>(); },
        [var]() { return json(*var); }});
  }

  void apply_config(const json& cfg) {
    for (const Entry& e : entries_) {
      if (e.opt->count() == 0 && cfg.contains(e.key)) e.apply(cfg.at(e.key));
    }
  }

  json resolved() const {
    json out = json::object();
    for (const Entry& e : entries_) out[e.key] = e.get();
    return out;
  }

 private:
  struct Entry {
    CLI::Option* opt;
    std::string key;
    std::function<void(const json&)> apply;
    std::function<json()> get;
  };
  std::vector<Entry> entries_;
};

/// Accepts either a plain config object or a previously written manifest
/// (whose "config" member is then used), so any run can be replayed from
/// its own manifest.
json load_config(const std::string& path) {
  const json doc = json::parse(read_text(path));
  if (doc.contains("config") && doc.at("config").is_object()) {
    return doc.at("config");
  }
  return doc;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const Params& params, std::uint64_t master_seed) {
  json manifest;
  manifest["command"] = command;
  manifest["config"] = params.resolved();
  manifest["master_seed"] = master_seed;
  manifest["tool_version"] = kVersion;
  manifest["timestamp"] = now_iso8601();
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string panel_csv(const synth::LatentPanel& panel) {
  std::string out = "series,period,count\n";
  for (std::size_t p = 0; p < panel.n_terms(); ++p) {
    for (std::size_t t = 0; t < panel.grid.size(); ++t) {
      out += panel.term_names[p] + ',' + panel.grid.label(t) + ',' +
             std::to_string(panel.term_counts[p][t]) + '\n';
    }
  }
  for (std::size_t t = 0; t < panel.grid.size(); ++t) {
    out += "__total__," + panel.grid.label(t) + ',' +
           std::to_string(panel.total_counts[t]) + '\n';
  }
  return out;
}

/// All distinct query specs for a term name in the catalog; exactly one is
/// required unless the caller disambiguates.
TermQuery find_query(const ingest::Catalog& catalog, const std::string& term,
                     const std::string& geo) {
  std::vector<TermQuery> found;
  for (const auto& entry : catalog.entries()) {
    if (entry.query.term != term) continue;
    if (!geo.empty() && entry.query.geo != geo) continue;
    if (std::find(found.begin(), found.end(), entry.query) == found.end()) {
      found.push_back(entry.query);
    }
  }
  if (found.empty()) {
    throw std::runtime_error("term '" + term + "' not found in catalog");
  }
  if (found.size() > 1) {
    throw std::runtime_error("term '" + term +
                             "' is ambiguous in catalog; pass --geo");
  }
  return found.front();
}

std::vector<TermQuery> all_queries(const ingest::Catalog& catalog,
                                   const std::string& geo) {
  std::vector<TermQuery> queries;
  for (const auto& entry : catalog.entries()) {
    if (!geo.empty() && entry.query.geo != geo) continue;
    if (std::find(queries.begin(), queries.end(), entry.query) == queries.end()) {
      queries.push_back(entry.query);
    }
  }
  if (queries.empty()) throw std::runtime_error("catalog has no matching terms");
  return queries;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out_dir = "out";
  std::string geo = "US";
  int terms = 20;
  int samples = 14;
  int months = 120;
  std::string start = "2009-01";
  double fraction = 0.25;
  double rate_min = 10.0;
  double rate_max = 600.0;
  double background_mult = 8.0;
};

int cmd_synth(const SynthArgs& a, const Params& params) {
  if (a.samples < 1) throw CLI::ValidationError("--samples must be >= 1");
  if (a.terms < 1) throw CLI::ValidationError("--terms must be >= 1");
  if (a.months < 2) throw CLI::ValidationError("--months must be >= 2");

  const TimeGrid grid =
      TimeGrid::monthly(parse_month(a.start), static_cast<std::size_t>(a.months));
  const auto specs =
      synth::spread_term_specs(static_cast<std::size_t>(a.terms), a.rate_min,
                               a.rate_max, rng::sub_seed({a.seed, rng::hash_str("specs")}));
  const double background = a.background_mult * synth::sum_base_rates(specs);
  const synth::LatentPanel panel = synth::gen_latent_panel(
      specs, grid, background, rng::sub_seed({a.seed, rng::hash_str("panel")}),
      a.geo);
  synth::SamplerConfig cfg;
  cfg.sampling_fraction = a.fraction;
  cfg.seed = rng::sub_seed({a.seed, rng::hash_str("pool")});
  cfg.n_samples = a.samples;
  const SamplePool pool = synth::draw_pool(panel, cfg, a.jobs);

  const fs::path out_dir(a.out_dir);
  write_text(out_dir / "panel.csv", panel_csv(panel));
  ingest::Catalog catalog(out_dir / "catalog");
  for (std::size_t s = 0; s < pool.n_samples(); ++s) {
    for (std::size_t p = 0; p < pool.n_terms(); ++p) {
      catalog.add(pool.samples[s][p], pool.samples[s][p].download_date);
    }
  }
  write_manifest(out_dir, "synth", params, a.seed);
  std::cout << "wrote " << pool.n_samples() << " samples x " << pool.n_terms()
            << " terms x " << grid.size() << " periods to " << a.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string catalog_dir;
  std::vector<std::string> add_files;
  std::string date;
  std::string out_dir;
  bool rebuild = false;
};

int cmd_ingest(const IngestArgs& a, const Params& params) {
  if (a.catalog_dir.empty()) throw CLI::ValidationError("--catalog is required");
  ingest::Catalog catalog(a.catalog_dir);
  if (a.rebuild) {
    catalog.rebuild();
    std::cout << "rebuilt index: " << catalog.entries().size() << " entries\n";
  }
  if (!a.add_files.empty() && a.date.empty()) {
    throw CLI::ValidationError("--add requires --date");
  }
  for (const std::string& file : a.add_files) {
    const SampleSeries series = ingest::parse_trends_csv(read_text(file));
    const auto result = catalog.add(series, parse_date(a.date));
    std::cout << (result.already_present ? "already present: " : "added: ")
              << result.entry.file_path << "\n";
  }
  const fs::path out_dir = a.out_dir.empty() ? fs::path(a.catalog_dir)
                                             : fs::path(a.out_dir);
  write_manifest(out_dir, "ingest", params, 0);
  return 0;
}

// ---------------------------------------------------------------------------
// corr

struct CorrArgs {
  std::string catalog_dir;
  std::vector<std::string> terms;
  std::string geo;
  std::string out_dir = "out";
  int group_size = 0;
  std::uint64_t seed = 0;
};

int cmd_corr(const CorrArgs& a, const Params& params) {
  if (a.catalog_dir.empty()) throw CLI::ValidationError("--catalog is required");
  if (a.terms.empty()) throw CLI::ValidationError("pass at least one --term");
  ingest::Catalog catalog(a.catalog_dir);
  const fs::path out_dir(a.out_dir);

  for (const std::string& term : a.terms) {
    const TermQuery query = find_query(catalog, term, a.geo);
    const SamplePool pool = catalog.load_pool({query});
    const std::string slug = ingest::term_slug(term);
    agg::CorrelationMatrix matrix;
    if (a.group_size > 0) {
      const int n_groups = static_cast<int>(pool.n_samples()) / a.group_size;
      if (n_groups < 2) {
        throw std::runtime_error("--group-size leaves fewer than 2 groups");
      }
      const auto groups =
          agg::disjoint_group_averages(pool, a.group_size, n_groups, a.seed);
      std::vector<std::vector<double>> series;
      std::vector<std::string> labels;
      std::vector<agg::AveragedSeries> averages;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        series.push_back(groups[g].front().values);
        labels.push_back("avg-" + std::to_string(g));
        agg::AveragedSeries avg = groups[g].front();
        avg.query.term += "/avg-" + std::to_string(g);
        averages.push_back(std::move(avg));
      }
      matrix = agg::correlation_matrix(series, labels);
      write_text(out_dir / ("averages_" + slug + ".csv"),
                 agg::averages_csv(averages));
    } else {
      matrix = agg::pool_term_correlations(pool, 0);
    }
    write_text(out_dir / ("corr_" + slug + ".csv"),
               agg::correlation_csv(matrix));
  }
  write_manifest(out_dir, "corr", params, a.seed);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out_dir = "out";
  std::string setup = "both";
  int reps = 200;
  std::string rule = "bic";
  std::string catalog_dir;
  std::string geo;
  int terms = 20;
  int samples = 14;
  int months = 120;
  double fraction = 0.25;
  double rate_min = 10.0;
  double rate_max = 600.0;
  double br_scale = 0.5;
  double background_mult = 8.0;
};

SamplePool synthetic_geo_pool(const SimulateArgs& a, const std::string& geo,
                              double scale) {
  sim::PoolPreset preset;
  preset.geo = geo;
  preset.n_terms = static_cast<std::size_t>(a.terms);
  preset.n_samples = a.samples;
  preset.months = static_cast<std::size_t>(a.months);
  preset.sampling_fraction = a.fraction;
  preset.rate_min = a.rate_min * scale;
  preset.rate_max = a.rate_max * scale;
  preset.background_mult = a.background_mult;
  return sim::synthetic_pool(preset, a.seed, a.jobs);
}

int cmd_simulate(const SimulateArgs& a, const Params& params) {
  if (a.setup != "1" && a.setup != "2" && a.setup != "both") {
    throw CLI::ValidationError("--setup must be 1, 2 or both");
  }
  if (a.reps < 1) throw CLI::ValidationError("--reps must be >= 1");

  std::vector<SamplePool> pools;
  if (!a.catalog_dir.empty()) {
    ingest::Catalog catalog(a.catalog_dir);
    pools.push_back(catalog.load_pool(all_queries(catalog, a.geo)));
  } else {
    pools.push_back(synthetic_geo_pool(a, "US", 1.0));
    pools.push_back(synthetic_geo_pool(a, "BR", a.br_scale));
  }

  sim::HarnessConfig cfg;
  cfg.n_replications = a.reps;
  cfg.seed = a.seed;
  cfg.rule = lasso::SelectionRule::from_name(a.rule, a.seed);
  cfg.jobs = a.jobs;

  std::vector<sim::SetupReport> reports;
  for (const SamplePool& pool : pools) {
    if (a.setup != "2") reports.push_back(sim::run_setup1(pool, cfg));
    if (a.setup != "1") reports.push_back(sim::run_setup2(pool, cfg));
  }

  const fs::path out_dir(a.out_dir);
  write_text(out_dir / "report.csv", sim::report_csv(reports));
  write_text(out_dir / "replications.csv", sim::replications_csv(reports));
  write_manifest(out_dir, "simulate", params, a.seed);
  std::cout << sim::report_csv(reports);
  return 0;
}

// ---------------------------------------------------------------------------
// nowcast

struct NowcastArgs {
  std::string target_file;
  std::string target_name = "target";
  std::string catalog_dir;
  std::string geo;
  std::string train;
  std::string eval;
  std::string rule = "cv";
  std::string rmse_on = "trend";
  int smooth_window = 7;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out_dir = "out";
};

int cmd_nowcast(const NowcastArgs& a, const Params& params) {
  if (a.target_file.empty()) throw CLI::ValidationError("--target is required");
  if (a.catalog_dir.empty()) throw CLI::ValidationError("--catalog is required");
  if (a.train.empty() || a.eval.empty()) {
    throw CLI::ValidationError("--train and --eval are required");
  }
  if (a.rmse_on != "trend" && a.rmse_on != "raw") {
    throw CLI::ValidationError("--rmse-on must be trend or raw");
  }
  const nowcast::TargetSeries target = nowcast::parse_target_csv(
      read_text(a.target_file), a.target_name, a.smooth_window);

  ingest::Catalog catalog(a.catalog_dir);
  const SamplePool pool = catalog.load_pool(all_queries(catalog, a.geo));

  nowcast::WindowSpec windows;
  windows.train = parse_range(a.train, target.grid.frequency());
  windows.eval = parse_range(a.eval, target.grid.frequency());

  const auto rule = lasso::SelectionRule::from_name(a.rule, a.seed);
  const nowcast::NowcastReport report = nowcast::compare_samples(
      target, pool, windows, rule, a.rmse_on == "trend", a.jobs);

  const fs::path out_dir(a.out_dir);
  write_text(out_dir / "report.csv", nowcast::report_csv(report));
  const std::vector<double>& actual =
      a.rmse_on == "trend" ? target.trend_values : target.values;
  write_text(out_dir / "predictions.csv",
             nowcast::predictions_csv(report, target.grid, windows.eval, actual));
  write_manifest(out_dir, "nowcast", params, a.seed);
  std::cout << nowcast::report_csv(report);
  return 0;
}

// ---------------------------------------------------------------------------
// vintages

struct VintagesArgs {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string start = "2004-01";
  int panel_months = 150;
  int window_months = 121;
  int n_vintages = 3;
  int step = 1;
  double fraction = 0.25;
  double rate = 5.0;
  double trend_slope = 0.004;
  double background = 50000.0;
};

int cmd_vintages(const VintagesArgs& a, const Params& params) {
  if (a.step < 1) throw CLI::ValidationError("--step must be >= 1");
  if (a.n_vintages < 1) throw CLI::ValidationError("--n must be >= 1");

  const TimeGrid grid = TimeGrid::monthly(parse_month(a.start),
                                          static_cast<std::size_t>(a.panel_months));
  synth::LatentTermSpec spec;
  spec.name = "vintage-term";
  spec.base_rate = a.rate;
  spec.trend_slope = a.trend_slope;
  spec.seasonal_amplitude = 0.45;
  spec.seasonal_period = 12;
  spec.shock_sd = 0.25;
  const synth::LatentPanel panel = synth::gen_latent_panel(
      {spec}, grid, a.background, rng::sub_seed({a.seed, rng::hash_str("panel")}));

  synth::SamplerConfig cfg;
  cfg.sampling_fraction = a.fraction;
  cfg.seed = rng::sub_seed({a.seed, rng::hash_str("vintages")});
  cfg.n_samples = 1;

  const PeriodRange base{grid.start(),
                         add_months(grid.start(), a.window_months - 1)};
  const vintage::VintageSet set =
      vintage::build_vintages(panel, cfg, 0, base, a.n_vintages, a.step);

  const fs::path out_dir(a.out_dir);
  write_text(out_dir / "vintages.csv", vintage::vintages_csv(set));
  write_text(out_dir / "vintage_corr.csv",
             agg::correlation_csv(vintage::vintage_correlations(set)));
  write_manifest(out_dir, "vintages", params, a.seed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trendlab: sampled search-volume indices, their instability, "
               "and multi-sample averaging"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_file;

  SynthArgs synth_args;
  Params synth_params;
  {
    auto* cmd = app.add_subcommand("synth",
                                   "generate a synthetic panel and sample pool");
    cmd->add_option("--config", config_file, "JSON config or manifest");
    synth_params.bind(cmd->add_option("--seed", synth_args.seed), "seed",
                      &synth_args.seed);
    synth_params.bind(cmd->add_option("--jobs", synth_args.jobs), "jobs",
                      &synth_args.jobs);
    synth_params.bind(cmd->add_option("--out-dir", synth_args.out_dir), "out_dir",
                      &synth_args.out_dir);
    synth_params.bind(cmd->add_option("--geo", synth_args.geo), "geo",
                      &synth_args.geo);
    synth_params.bind(cmd->add_option("--terms", synth_args.terms), "terms",
                      &synth_args.terms);
    synth_params.bind(cmd->add_option("--samples", synth_args.samples), "samples",
                      &synth_args.samples);
    synth_params.bind(cmd->add_option("--months", synth_args.months), "months",
                      &synth_args.months);
    synth_params.bind(cmd->add_option("--start", synth_args.start), "start",
                      &synth_args.start);
    synth_params.bind(cmd->add_option("--fraction", synth_args.fraction),
                      "fraction", &synth_args.fraction);
    synth_params.bind(cmd->add_option("--rate-min", synth_args.rate_min),
                      "rate_min", &synth_args.rate_min);
    synth_params.bind(cmd->add_option("--rate-max", synth_args.rate_max),
                      "rate_max", &synth_args.rate_max);
    synth_params.bind(cmd->add_option("--background-mult", synth_args.background_mult),
                      "background_mult", &synth_args.background_mult);
  }

  IngestArgs ingest_args;
  Params ingest_params;
  {
    auto* cmd = app.add_subcommand("ingest", "parse and catalog export files");
    cmd->add_option("--config", config_file, "JSON config or manifest");
    ingest_params.bind(cmd->add_option("--catalog", ingest_args.catalog_dir),
                       "catalog", &ingest_args.catalog_dir);
    ingest_params.bind(cmd->add_option("--add", ingest_args.add_files), "add",
                       &ingest_args.add_files);
    ingest_params.bind(cmd->add_option("--date", ingest_args.date), "date",
                       &ingest_args.date);
    ingest_params.bind(cmd->add_option("--out-dir", ingest_args.out_dir),
                       "out_dir", &ingest_args.out_dir);
    ingest_params.bind(cmd->add_flag("--rebuild", ingest_args.rebuild), "rebuild",
                       &ingest_args.rebuild);
  }

  CorrArgs corr_args;
  Params corr_params;
  {
    auto* cmd = app.add_subcommand("corr", "cross-sample correlation matrices");
    cmd->add_option("--config", config_file, "JSON config or manifest");
    corr_params.bind(cmd->add_option("--catalog", corr_args.catalog_dir),
                     "catalog", &corr_args.catalog_dir);
    corr_params.bind(cmd->add_option("--term", corr_args.terms), "terms",
                     &corr_args.terms);
    corr_params.bind(cmd->add_option("--geo", corr_args.geo), "geo",
                     &corr_args.geo);
    corr_params.bind(cmd->add_option("--out-dir", corr_args.out_dir), "out_dir",
                     &corr_args.out_dir);
    corr_params.bind(cmd->add_option("--group-size", corr_args.group_size),
                     "group_size", &corr_args.group_size);
    corr_params.bind(cmd->add_option("--seed", corr_args.seed), "seed",
                     &corr_args.seed);
  }

  SimulateArgs sim_args;
  Params sim_params;
  {
    auto* cmd = app.add_subcommand("simulate",
                                   "selection experiment on repeated samples");
    cmd->add_option("--config", config_file, "JSON config or manifest");
    sim_params.bind(cmd->add_option("--seed", sim_args.seed), "seed",
                    &sim_args.seed);
    sim_params.bind(cmd->add_option("--jobs", sim_args.jobs), "jobs",
                    &sim_args.jobs);
    sim_params.bind(cmd->add_option("--out-dir", sim_args.out_dir), "out_dir",
                    &sim_args.out_dir);
    sim_params.bind(cmd->add_option("--setup", sim_args.setup), "setup",
                    &sim_args.setup);
    sim_params.bind(cmd->add_option("--reps", sim_args.reps), "reps",
                    &sim_args.reps);
    sim_params.bind(cmd->add_option("--rule", sim_args.rule), "rule",
                    &sim_args.rule);
    sim_params.bind(cmd->add_option("--catalog", sim_args.catalog_dir), "catalog",
                    &sim_args.catalog_dir);
    sim_params.bind(cmd->add_option("--geo", sim_args.geo), "geo", &sim_args.geo);
    sim_params.bind(cmd->add_option("--terms", sim_args.terms), "terms",
                    &sim_args.terms);
    sim_params.bind(cmd->add_option("--samples", sim_args.samples), "samples",
                    &sim_args.samples);
    sim_params.bind(cmd->add_option("--months", sim_args.months), "months",
                    &sim_args.months);
    sim_params.bind(cmd->add_option("--fraction", sim_args.fraction), "fraction",
                    &sim_args.fraction);
    sim_params.bind(cmd->add_option("--rate-min", sim_args.rate_min), "rate_min",
                    &sim_args.rate_min);
    sim_params.bind(cmd->add_option("--rate-max", sim_args.rate_max), "rate_max",
                    &sim_args.rate_max);
    sim_params.bind(cmd->add_option("--br-scale", sim_args.br_scale), "br_scale",
                    &sim_args.br_scale);
    sim_params.bind(cmd->add_option("--background-mult", sim_args.background_mult),
                    "background_mult", &sim_args.background_mult);
  }

  NowcastArgs now_args;
  Params now_params;
  {
    auto* cmd = app.add_subcommand("nowcast",
                                   "per-sample vs averaged nowcast comparison");
    cmd->add_option("--config", config_file, "JSON config or manifest");
    now_params.bind(cmd->add_option("--target", now_args.target_file),
                    "target", &now_args.target_file);
    now_params.bind(cmd->add_option("--target-name", now_args.target_name),
                    "target_name", &now_args.target_name);
    now_params.bind(cmd->add_option("--catalog", now_args.catalog_dir),
                    "catalog", &now_args.catalog_dir);
    now_params.bind(cmd->add_option("--geo", now_args.geo), "geo", &now_args.geo);
    now_params.bind(cmd->add_option("--train", now_args.train),
                    "train", &now_args.train);
    now_params.bind(cmd->add_option("--eval", now_args.eval), "eval",
                    &now_args.eval);
    now_params.bind(cmd->add_option("--rule", now_args.rule), "rule",
                    &now_args.rule);
    now_params.bind(cmd->add_option("--rmse-on", now_args.rmse_on), "rmse_on",
                    &now_args.rmse_on);
    now_params.bind(cmd->add_option("--smooth-window", now_args.smooth_window),
                    "smooth_window", &now_args.smooth_window);
    now_params.bind(cmd->add_option("--seed", now_args.seed), "seed",
                    &now_args.seed);
    now_params.bind(cmd->add_option("--jobs", now_args.jobs), "jobs",
                    &now_args.jobs);
    now_params.bind(cmd->add_option("--out-dir", now_args.out_dir), "out_dir",
                    &now_args.out_dir);
  }

  VintagesArgs vin_args;
  Params vin_params;
  {
    auto* cmd = app.add_subcommand("vintages",
                                   "rolling renormalized window vintages");
    cmd->add_option("--config", config_file, "JSON config or manifest");
    vin_params.bind(cmd->add_option("--seed", vin_args.seed), "seed",
                    &vin_args.seed);
    vin_params.bind(cmd->add_option("--out-dir", vin_args.out_dir), "out_dir",
                    &vin_args.out_dir);
    vin_params.bind(cmd->add_option("--start", vin_args.start), "start",
                    &vin_args.start);
    vin_params.bind(cmd->add_option("--panel-months", vin_args.panel_months),
                    "panel_months", &vin_args.panel_months);
    vin_params.bind(cmd->add_option("--window-months", vin_args.window_months),
                    "window_months", &vin_args.window_months);
    vin_params.bind(cmd->add_option("--n", vin_args.n_vintages), "n_vintages",
                    &vin_args.n_vintages);
    vin_params.bind(cmd->add_option("--step", vin_args.step), "step",
                    &vin_args.step);
    vin_params.bind(cmd->add_option("--fraction", vin_args.fraction), "fraction",
                    &vin_args.fraction);
    vin_params.bind(cmd->add_option("--rate", vin_args.rate), "rate",
                    &vin_args.rate);
    vin_params.bind(cmd->add_option("--trend-slope", vin_args.trend_slope),
                    "trend_slope", &vin_args.trend_slope);
    vin_params.bind(cmd->add_option("--background", vin_args.background),
                    "background", &vin_args.background);
  }

  try {
    app.parse(argc, argv);

    json cfg = json::object();
    if (!config_file.empty()) cfg = load_config(config_file);

    if (app.got_subcommand("synth")) {
      synth_params.apply_config(cfg);
      return cmd_synth(synth_args, synth_params);
    }
    if (app.got_subcommand("ingest")) {
      ingest_params.apply_config(cfg);
      return cmd_ingest(ingest_args, ingest_params);
    }
    if (app.got_subcommand("corr")) {
      corr_params.apply_config(cfg);
      return cmd_corr(corr_args, corr_params);
    }
    if (app.got_subcommand("simulate")) {
      sim_params.apply_config(cfg);
      return cmd_simulate(sim_args, sim_params);
    }
    if (app.got_subcommand("nowcast")) {
      now_params.apply_config(cfg);
      return cmd_nowcast(now_args, now_params);
    }
    if (app.got_subcommand("vintages")) {
      vin_params.apply_config(cfg);
      return cmd_vintages(vin_args, vin_params);
    }
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
