#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trendlab/core.hpp"

namespace trendlab::lasso {

/// Regression data with fitted standardization. Columns are standardized to
/// zero mean and unit population variance, the target is centered; the
/// intercept is recovered afterwards and never penalized. Constant columns
/// are excluded (their coefficient is pinned at zero) rather than rejected,
/// since degenerate index series do occur in rare-term pools.
class DesignMatrix {
 public:
  /// columns[j] is the j-th covariate, all of length y.size().
  static DesignMatrix build(const std::vector<std::vector<double>>& columns,
                            const std::vector<double>& y);
  /// Same, restricted to a subset of rows (used by cross-validation).
  static DesignMatrix build_rows(const std::vector<std::vector<double>>& columns,
                                 const std::vector<double>& y,
                                 const std::vector<std::size_t>& rows);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  bool included(std::size_t j) const { return included_[j] != 0; }
  double column_mean(std::size_t j) const { return col_mean_[j]; }
  double column_sd(std::size_t j) const { return col_sd_[j]; }
  double y_mean() const { return y_mean_; }

  /// Standardized column j (unit population variance).
  const double* std_column(std::size_t j) const {
    return xstd_.data() + j * n_rows_;
  }
  const std::vector<double>& centered_y() const { return y_centered_; }

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<double> xstd_;  // column-major, standardized
  std::vector<double> y_centered_;
  std::vector<double> col_mean_;
  std::vector<double> col_sd_;
  std::vector<std::uint8_t> included_;
  double y_mean_ = 0.0;
};

struct LassoFit {
  double lambda = 0.0;
  std::vector<double> coefficients;  // original scale
  double intercept = 0.0;
  std::vector<std::size_t> active_set;
  int n_iterations = 0;
  bool converged = false;
  double rss = 0.0;  // residual sum of squares on the training data
};

/// sign(z) * max(|z| - gamma, 0).
double soft_threshold(double z, double gamma);

/// Smallest penalty with an all-zero solution:
/// max_j |<x_j, y - y_mean>| / T over the standardized columns.
double lambda_max(const DesignMatrix& design);

/// Cyclic coordinate descent at a single penalty. Convergence requires both
/// a full sweep with max coefficient change below `tolerance` and the KKT
/// conditions holding at that tolerance; failure to converge is reported via
/// the flag, not an exception. `warm_start` takes original-scale coefficients.
LassoFit fit(const DesignMatrix& design, double lambda, double tolerance = 1e-7,
             int max_iter = 10000,
             const std::vector<double>* warm_start = nullptr);

/// Log-spaced penalty grid from lambda_max down to
/// lambda_max * lambda_min_ratio, warm-started along the path.
std::vector<LassoFit> fit_path(const DesignMatrix& design, int n_lambdas = 50,
                               double lambda_min_ratio = 0.01);

/// Penalty selection: BIC over the path, or k-fold cross-validation with
/// seeded contiguous blocks (contiguous modulo a seeded rotation, so folds
/// respect serial structure). Ties break toward the larger penalty.
struct SelectionRule {
  enum class Kind { bic, cv };
  Kind kind = Kind::bic;
  int cv_folds = 5;
  std::uint64_t cv_seed = 0;
  int n_lambdas = 50;
  double lambda_min_ratio = 0.01;

  static SelectionRule bic();
  static SelectionRule cv(int folds, std::uint64_t seed);
  static SelectionRule from_name(const std::string& name, std::uint64_t seed);
  const char* name() const { return kind == Kind::bic ? "bic" : "cv"; }
};

LassoFit select_lambda(const std::vector<LassoFit>& path,
                       const DesignMatrix& design, const SelectionRule& rule);

/// Convenience: fit_path + select_lambda against freshly built columns.
LassoFit fit_and_select(const std::vector<std::vector<double>>& columns,
                        const std::vector<double>& y, const SelectionRule& rule);

/// intercept + X * coefficients for the given rows of `columns`.
std::vector<double> predict(const LassoFit& fit,
                            const std::vector<std::vector<double>>& columns,
                            std::size_t row_begin, std::size_t row_end);

}  // namespace trendlab::lasso
