#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trendlab/core.hpp"
#include "trendlab/lasso.hpp"

namespace trendlab::sim {

/// One Monte-Carlo draw of the linear data-generating process: which 5 of
/// the P terms carry signal and with what coefficients.
struct DgpSpec {
  int k = 1;  // coefficient rule, in {1,2,3}
  std::vector<std::size_t> support;  // 5 distinct term indices
  std::vector<double> beta;          // 5 coefficients by rule k
  std::uint64_t noise_seed = 0;
};

/// Selection outcome of one replication for one DGP rule.
struct ReplicationResult {
  int replication = 0;
  int k = 1;
  std::string geo;
  int setup = 1;
  std::vector<std::vector<std::size_t>> selected_sets;  // 13 for setup 1, 1 for setup 2
  std::vector<std::size_t> true_support;
  std::vector<double> recalls;        // one per selected set, percent
  std::vector<int> false_positives;   // one per selected set
};

/// Table-style summary for one geo and one setup.
struct SetupReport {
  int setup = 1;
  std::string geo;
  int n_replications = 0;
  double mean_recall[3] = {0.0, 0.0, 0.0};          // indexed by k-1
  double mean_false_positives[3] = {0.0, 0.0, 0.0};
  std::vector<ReplicationResult> replications;
};

struct HarnessConfig {
  int n_replications = 1000;
  std::uint64_t seed = 0;
  lasso::SelectionRule rule = lasso::SelectionRule::bic();
  unsigned jobs = 1;
  std::size_t support_size = 5;
  double noise_scale = 1.0;  // noise sd = noise_scale * signal sd (SNR 1 at 1)
};

/// Reference synthetic pool configuration: a log-spaced popularity ladder of
/// terms, sampled S times. The geo label both tags the output and offsets
/// the seed derivation, so different geos get independent panels.
struct PoolPreset {
  std::string geo = "US";
  std::size_t n_terms = 20;
  int n_samples = 14;
  std::size_t months = 120;
  Date start{2009, 1, 1};
  double sampling_fraction = 0.25;
  double rate_min = 10.0;
  double rate_max = 600.0;
  double background_mult = 8.0;
};

SamplePool synthetic_pool(const PoolPreset& preset, std::uint64_t seed,
                          unsigned jobs = 1);

/// Coefficient draw by rule k: (1) nonzero integers in [-10,10],
/// (2) values in {1,2} with equal probability, (3) uniform [0,1].
std::vector<double> draw_beta(int k, std::uint64_t seed, std::size_t size = 5);

/// signal = X * beta; target = signal + Gaussian noise whose variance equals
/// the signal's population variance over the window (signal-to-noise 1).
/// Throws on a zero-variance signal.
std::vector<double> build_dgp(const std::vector<std::vector<double>>& x_columns,
                              const std::vector<double>& beta,
                              std::uint64_t noise_seed, double noise_scale = 1.0);

/// Recall, in percent: 100 * |selected ∩ true| / |true|.
double selection_accuracy(const std::vector<std::size_t>& selected,
                          const std::vector<std::size_t>& true_support);

int count_false_positives(const std::vector<std::size_t>& selected,
                          const std::vector<std::size_t>& true_support);

/// Setup 1: targets built from one random sample's columns; one selection
/// regression per remaining sample.
SetupReport run_setup1(const SamplePool& pool, const HarnessConfig& cfg);

/// Setup 2: samples split into a generator half and an estimator half;
/// targets built from the generator average, one regression on the
/// estimator average.
SetupReport run_setup2(const SamplePool& pool, const HarnessConfig& cfg);

/// Table-shaped CSV: one row per setup, geo x k columns.
std::string report_csv(const std::vector<SetupReport>& reports);

/// Long-format per-replication CSV.
std::string replications_csv(const std::vector<SetupReport>& reports);

}  // namespace trendlab::sim
