#include "trendlab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "trendlab/parallel.hpp"
#include "trendlab/rng.hpp"
#include "trendlab/sampler.hpp"

namespace trendlab::sim {

namespace {

double population_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(v.size());
}

std::vector<std::vector<double>> sample_columns(const SamplePool& pool,
                                                std::size_t sample) {
  std::vector<std::vector<double>> columns;
  columns.reserve(pool.n_terms());
  for (std::size_t p = 0; p < pool.n_terms(); ++p) {
    columns.push_back(pool.samples[sample][p].values);
  }
  return columns;
}

std::vector<std::vector<double>> averaged_columns(
    const SamplePool& pool, const std::vector<std::size_t>& rows) {
  const std::size_t t = pool.grid().size();
  const double inv = 1.0 / static_cast<double>(rows.size());
  std::vector<std::vector<double>> columns(pool.n_terms(),
                                           std::vector<double>(t, 0.0));
  for (std::size_t s : rows) {
    for (std::size_t p = 0; p < pool.n_terms(); ++p) {
      const auto& values = pool.samples[s][p].values;
      for (std::size_t i = 0; i < t; ++i) columns[p][i] += values[i];
    }
  }
  for (auto& col : columns) {
    for (double& v : col) v *= inv;
  }
  return columns;
}

std::vector<std::vector<double>> pick_columns(
    const std::vector<std::vector<double>>& columns,
    const std::vector<std::size_t>& indices) {
  std::vector<std::vector<double>> out;
  out.reserve(indices.size());
  for (std::size_t j : indices) out.push_back(columns[j]);
  return out;
}

struct CellAccumulator {
  double recall_sum = 0.0;
  double fp_sum = 0.0;
  std::size_t n_models = 0;
};

SetupReport assemble_report(int setup, const SamplePool& pool,
                            const HarnessConfig& cfg,
                            std::vector<ReplicationResult> results) {
  SetupReport report;
  report.setup = setup;
  report.geo = pool.query_set.front().geo;
  report.n_replications = cfg.n_replications;
  CellAccumulator cells[3];
  for (const ReplicationResult& r : results) {
    CellAccumulator& cell = cells[r.k - 1];
    for (std::size_t m = 0; m < r.recalls.size(); ++m) {
      cell.recall_sum += r.recalls[m];
      cell.fp_sum += r.false_positives[m];
      ++cell.n_models;
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (cells[k].n_models > 0) {
      report.mean_recall[k] =
          cells[k].recall_sum / static_cast<double>(cells[k].n_models);
      report.mean_false_positives[k] =
          cells[k].fp_sum / static_cast<double>(cells[k].n_models);
    }
  }
  report.replications = std::move(results);
  return report;
}

void validate_harness_inputs(const SamplePool& pool, const HarnessConfig& cfg,
                             std::size_t min_samples) {
  assert_pool_valid(pool);
  if (cfg.n_replications < 1) {
    throw std::invalid_argument("harness: n_replications must be >= 1");
  }
  if (pool.n_samples() < min_samples) {
    throw std::invalid_argument("harness: pool needs at least " +
                                std::to_string(min_samples) + " samples");
  }
  if (pool.n_terms() < cfg.support_size || cfg.support_size < 1) {
    throw std::invalid_argument("harness: support size incompatible with pool");
  }
}

}  // namespace

SamplePool synthetic_pool(const PoolPreset& preset, std::uint64_t seed,
                          unsigned jobs) {
  const std::uint64_t geo_hash = rng::hash_str(preset.geo.c_str());
  const TimeGrid grid = TimeGrid::monthly(preset.start, preset.months);
  const auto specs = synth::spread_term_specs(
      preset.n_terms, preset.rate_min, preset.rate_max,
      rng::sub_seed({seed, rng::hash_str("specs"), geo_hash}));
  const synth::LatentPanel panel = synth::gen_latent_panel(
      specs, grid, preset.background_mult * synth::sum_base_rates(specs),
      rng::sub_seed({seed, rng::hash_str("panel"), geo_hash}), preset.geo);
  synth::SamplerConfig cfg;
  cfg.sampling_fraction = preset.sampling_fraction;
  cfg.seed = rng::sub_seed({seed, rng::hash_str("pool"), geo_hash});
  cfg.n_samples = preset.n_samples;
  return synth::draw_pool(panel, cfg, jobs);
}

std::vector<double> draw_beta(int k, std::uint64_t seed, std::size_t size) {
  if (k < 1 || k > 3) {
    throw std::invalid_argument("draw_beta: k must be 1, 2 or 3");
  }
  rng::Rng gen(seed);
  std::vector<double> beta(size);
  for (double& b : beta) {
    switch (k) {
      case 1: {
        // Discrete uniform on [-10,10]; zeros redrawn so the support stays
        // at its nominal size.
        std::int64_t v = 0;
        do {
          v = static_cast<std::int64_t>(gen.below(21)) - 10;
        } while (v == 0);
        b = static_cast<double>(v);
        break;
      }
      case 2:
        b = static_cast<double>(1 + gen.below(2));
        break;
      default:
        b = gen.next_unit();
        break;
    }
  }
  return beta;
}

std::vector<double> build_dgp(const std::vector<std::vector<double>>& x_columns,
                              const std::vector<double>& beta,
                              std::uint64_t noise_seed, double noise_scale) {
  if (x_columns.empty() || x_columns.size() != beta.size()) {
    throw std::invalid_argument("build_dgp: column/beta size mismatch");
  }
  const std::size_t t = x_columns.front().size();
  for (const auto& col : x_columns) {
    if (col.size() != t) throw std::invalid_argument("build_dgp: ragged columns");
  }
  if (noise_scale < 0.0) {
    throw std::invalid_argument("build_dgp: noise_scale must be >= 0");
  }
  std::vector<double> signal(t, 0.0);
  for (std::size_t j = 0; j < x_columns.size(); ++j) {
    for (std::size_t i = 0; i < t; ++i) signal[i] += beta[j] * x_columns[j][i];
  }
  const double var = population_variance(signal);
  if (var == 0.0) {
    throw std::invalid_argument("build_dgp: zero-variance signal");
  }
  const double sd = noise_scale * std::sqrt(var);
  rng::Rng gen(noise_seed);
  for (double& v : signal) v += sd * gen.gaussian();
  return signal;
}

double selection_accuracy(const std::vector<std::size_t>& selected,
                          const std::vector<std::size_t>& true_support) {
  if (true_support.empty()) {
    throw std::invalid_argument("selection_accuracy: empty true support");
  }
  std::size_t hits = 0;
  for (std::size_t s : selected) {
    if (std::find(true_support.begin(), true_support.end(), s) !=
        true_support.end()) {
      ++hits;
    }
  }
  return 100.0 * static_cast<double>(hits) /
         static_cast<double>(true_support.size());
}

int count_false_positives(const std::vector<std::size_t>& selected,
                          const std::vector<std::size_t>& true_support) {
  int fp = 0;
  for (std::size_t s : selected) {
    if (std::find(true_support.begin(), true_support.end(), s) ==
        true_support.end()) {
      ++fp;
    }
  }
  return fp;
}

SetupReport run_setup1(const SamplePool& pool, const HarnessConfig& cfg) {
  validate_harness_inputs(pool, cfg, 2);
  const std::size_t S = pool.n_samples();
  const std::size_t P = pool.n_terms();
  const std::uint64_t geo_hash =
      rng::hash_str(pool.query_set.front().geo.c_str());
  const std::size_t n =
      static_cast<std::size_t>(cfg.n_replications);

  std::vector<ReplicationResult> results(n * 3);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const std::uint64_t rep_seed =
        rng::sub_seed({cfg.seed, geo_hash, static_cast<std::uint64_t>(i)});
    rng::Rng draws(rng::sub_seed({rep_seed, rng::hash_str("draws")}));
    const std::size_t s = static_cast<std::size_t>(draws.below(S));
    const std::vector<std::size_t> support = draws.choose(P, cfg.support_size);
    const auto generator_columns =
        pick_columns(sample_columns(pool, s), support);

    for (int k = 1; k <= 3; ++k) {
      const std::uint64_t kk = static_cast<std::uint64_t>(k);
      const std::vector<double> beta =
          draw_beta(k, rng::sub_seed({rep_seed, kk, rng::hash_str("beta")}));
      const std::vector<double> target =
          build_dgp(generator_columns, beta,
                    rng::sub_seed({rep_seed, kk, rng::hash_str("noise")}),
                    cfg.noise_scale);

      ReplicationResult rep;
      rep.replication = static_cast<int>(i);
      rep.k = k;
      rep.geo = pool.query_set.front().geo;
      rep.setup = 1;
      rep.true_support = support;
      for (std::size_t m = 0; m < S; ++m) {
        if (m == s) continue;
        lasso::SelectionRule rule = cfg.rule;
        rule.cv_seed = rng::sub_seed({rep_seed, kk, m, rng::hash_str("cv")});
        const lasso::LassoFit fit =
            lasso::fit_and_select(sample_columns(pool, m), target, rule);
        rep.selected_sets.push_back(fit.active_set);
        rep.recalls.push_back(selection_accuracy(fit.active_set, support));
        rep.false_positives.push_back(
            count_false_positives(fit.active_set, support));
      }
      results[i * 3 + static_cast<std::size_t>(k - 1)] = std::move(rep);
    }
  });
  return assemble_report(1, pool, cfg, std::move(results));
}

SetupReport run_setup2(const SamplePool& pool, const HarnessConfig& cfg) {
  validate_harness_inputs(pool, cfg, 2);
  const std::size_t S = pool.n_samples();
  const std::size_t P = pool.n_terms();
  const std::uint64_t geo_hash =
      rng::hash_str(pool.query_set.front().geo.c_str());
  const std::size_t n = static_cast<std::size_t>(cfg.n_replications);

  std::vector<ReplicationResult> results(n * 3);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const std::uint64_t rep_seed =
        rng::sub_seed({cfg.seed, geo_hash, static_cast<std::uint64_t>(i)});
    rng::Rng draws(rng::sub_seed({rep_seed, rng::hash_str("draws")}));
    // Disjoint halves: generator builds the targets, estimator is averaged
    // for the single selection regression.
    const std::vector<std::size_t> perm = draws.shuffled_indices(S);
    const std::size_t g = S / 2;
    const std::vector<std::size_t> generator(perm.begin(), perm.begin() + g);
    const std::vector<std::size_t> estimator(perm.begin() + g, perm.end());
    const std::vector<std::size_t> support = draws.choose(P, cfg.support_size);

    const auto generator_avg = averaged_columns(pool, generator);
    const auto estimator_avg = averaged_columns(pool, estimator);
    const auto generator_support = pick_columns(generator_avg, support);

    for (int k = 1; k <= 3; ++k) {
      const std::uint64_t kk = static_cast<std::uint64_t>(k);
      const std::vector<double> beta =
          draw_beta(k, rng::sub_seed({rep_seed, kk, rng::hash_str("beta")}));
      const std::vector<double> target =
          build_dgp(generator_support, beta,
                    rng::sub_seed({rep_seed, kk, rng::hash_str("noise")}),
                    cfg.noise_scale);

      lasso::SelectionRule rule = cfg.rule;
      rule.cv_seed = rng::sub_seed({rep_seed, kk, rng::hash_str("cv")});
      const lasso::LassoFit fit =
          lasso::fit_and_select(estimator_avg, target, rule);

      ReplicationResult rep;
      rep.replication = static_cast<int>(i);
      rep.k = k;
      rep.geo = pool.query_set.front().geo;
      rep.setup = 2;
      rep.true_support = support;
      rep.selected_sets.push_back(fit.active_set);
      rep.recalls.push_back(selection_accuracy(fit.active_set, support));
      rep.false_positives.push_back(
          count_false_positives(fit.active_set, support));
      results[i * 3 + static_cast<std::size_t>(k - 1)] = std::move(rep);
    }
  });
  return assemble_report(2, pool, cfg, std::move(results));
}

std::string report_csv(const std::vector<SetupReport>& reports) {
  std::vector<std::string> geos;
  for (const auto& r : reports) {
    if (std::find(geos.begin(), geos.end(), r.geo) == geos.end()) {
      geos.push_back(r.geo);
    }
  }
  std::string out = "setup";
  for (const auto& geo : geos) {
    for (int k = 1; k <= 3; ++k) {
      out += ',' + geo + "_k" + std::to_string(k);
    }
  }
  out += '\n';
  for (int setup = 1; setup <= 2; ++setup) {
    bool any = false;
    std::string row = std::to_string(setup);
    for (const auto& geo : geos) {
      for (int k = 1; k <= 3; ++k) {
        row += ',';
        for (const auto& r : reports) {
          if (r.setup == setup && r.geo == geo) {
            char buf[24];
            std::snprintf(buf, sizeof(buf), "%.2f", r.mean_recall[k - 1]);
            row += buf;
            any = true;
            break;
          }
        }
      }
    }
    if (any) out += row + '\n';
  }
  return out;
}

std::string replications_csv(const std::vector<SetupReport>& reports) {
  std::string out =
      "setup,geo,replication,k,model,recall,false_positives,selected,true_support\n";
  auto join = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) s += '|';
      s += std::to_string(v[i]);
    }
    return s;
  };
  for (const auto& report : reports) {
    for (const auto& rep : report.replications) {
      for (std::size_t m = 0; m < rep.recalls.size(); ++m) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", rep.recalls[m]);
        out += std::to_string(report.setup) + ',' + rep.geo + ',' +
               std::to_string(rep.replication) + ',' + std::to_string(rep.k) +
               ',' + std::to_string(m) + ',' + buf + ',' +
               std::to_string(rep.false_positives[m]) + ',' +
               join(rep.selected_sets[m]) + ',' + join(rep.true_support) + '\n';
      }
    }
  }
  return out;
}

}  // namespace trendlab::sim
