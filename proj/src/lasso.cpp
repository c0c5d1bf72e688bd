#include "trendlab/lasso.hpp"

#include <cmath>
#include <stdexcept>

#include "trendlab/rng.hpp"

namespace trendlab::lasso {

namespace {

constexpr double kSdFloor = 1e-10;

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

DesignMatrix DesignMatrix::build(const std::vector<std::vector<double>>& columns,
                                 const std::vector<double>& y) {
  std::vector<std::size_t> rows(y.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return build_rows(columns, y, rows);
}

DesignMatrix DesignMatrix::build_rows(
    const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
    const std::vector<std::size_t>& rows) {
  if (columns.empty()) throw std::invalid_argument("design: needs P >= 1 columns");
  if (rows.size() < 2) throw std::invalid_argument("design: needs T >= 2 rows");
  for (const auto& col : columns) {
    if (col.size() != y.size()) {
      throw std::invalid_argument("design: column/target length mismatch");
    }
  }
  DesignMatrix d;
  d.n_rows_ = rows.size();
  d.n_cols_ = columns.size();
  d.xstd_.assign(d.n_rows_ * d.n_cols_, 0.0);
  d.col_mean_.assign(d.n_cols_, 0.0);
  d.col_sd_.assign(d.n_cols_, 0.0);
  d.included_.assign(d.n_cols_, 0);
  d.y_centered_.resize(d.n_rows_);

  const double inv_t = 1.0 / static_cast<double>(d.n_rows_);
  double ysum = 0.0;
  for (std::size_t i = 0; i < d.n_rows_; ++i) {
    const double v = y[rows[i]];
    if (!std::isfinite(v)) throw std::invalid_argument("design: non-finite target");
    ysum += v;
  }
  d.y_mean_ = ysum * inv_t;
  for (std::size_t i = 0; i < d.n_rows_; ++i) {
    d.y_centered_[i] = y[rows[i]] - d.y_mean_;
  }

  for (std::size_t j = 0; j < d.n_cols_; ++j) {
    const auto& col = columns[j];
    double sum = 0.0;
    for (std::size_t i = 0; i < d.n_rows_; ++i) {
      const double v = col[rows[i]];
      if (!std::isfinite(v)) throw std::invalid_argument("design: non-finite entry");
      sum += v;
    }
    const double mean = sum * inv_t;
    double ss = 0.0;
    for (std::size_t i = 0; i < d.n_rows_; ++i) {
      const double diff = col[rows[i]] - mean;
      ss += diff * diff;
    }
    const double sd = std::sqrt(ss * inv_t);  // population sd
    d.col_mean_[j] = mean;
    d.col_sd_[j] = sd;
    if (sd > kSdFloor) {
      d.included_[j] = 1;
      double* out = d.xstd_.data() + j * d.n_rows_;
      const double inv_sd = 1.0 / sd;
      for (std::size_t i = 0; i < d.n_rows_; ++i) {
        out[i] = (col[rows[i]] - mean) * inv_sd;
      }
    }
  }
  return d;
}

double soft_threshold(double z, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("soft_threshold: gamma must be >= 0");
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double lambda_max(const DesignMatrix& design) {
  const std::size_t t = design.n_rows();
  const double inv_t = 1.0 / static_cast<double>(t);
  double best = 0.0;
  for (std::size_t j = 0; j < design.n_cols(); ++j) {
    if (!design.included(j)) continue;
    const double g =
        std::fabs(dot(design.std_column(j), design.centered_y().data(), t)) * inv_t;
    if (g > best) best = g;
  }
  return best;
}

LassoFit fit(const DesignMatrix& design, double lambda, double tolerance,
             int max_iter, const std::vector<double>* warm_start) {
  if (lambda < 0.0) throw std::invalid_argument("fit: lambda must be >= 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("fit: tolerance must be > 0");
  if (max_iter < 1) throw std::invalid_argument("fit: max_iter must be >= 1");
  const std::size_t t = design.n_rows();
  const std::size_t p = design.n_cols();
  const double inv_t = 1.0 / static_cast<double>(t);

  std::vector<double> beta(p, 0.0);  // standardized scale
  if (warm_start != nullptr) {
    if (warm_start->size() != p) {
      throw std::invalid_argument("fit: warm start has wrong length");
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (design.included(j)) beta[j] = (*warm_start)[j] * design.column_sd(j);
    }
  }

  std::vector<double> residual = design.centered_y();
  for (std::size_t j = 0; j < p; ++j) {
    if (beta[j] == 0.0) continue;
    const double* col = design.std_column(j);
    for (std::size_t i = 0; i < t; ++i) residual[i] -= col[i] * beta[j];
  }

  // Standardized columns have unit population variance, so each coordinate
  // update is a plain soft-threshold with denominator 1.
  bool converged = false;
  int sweeps = 0;
  while (sweeps < max_iter) {
    ++sweeps;
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (!design.included(j)) continue;
      const double* col = design.std_column(j);
      const double rho = beta[j] + dot(col, residual.data(), t) * inv_t;
      const double updated = soft_threshold(rho, lambda);
      const double change = updated - beta[j];
      if (change != 0.0) {
        for (std::size_t i = 0; i < t; ++i) residual[i] -= col[i] * change;
        beta[j] = updated;
      }
      const double mag = std::fabs(change);
      if (mag > max_change) max_change = mag;
    }
    if (max_change >= tolerance) continue;

    // Sweep settled; accept only if the KKT conditions hold at tolerance.
    bool kkt_ok = true;
    for (std::size_t j = 0; j < p && kkt_ok; ++j) {
      if (!design.included(j)) continue;
      const double g = dot(design.std_column(j), residual.data(), t) * inv_t;
      if (beta[j] == 0.0) {
        kkt_ok = std::fabs(g) <= lambda + tolerance;
      } else {
        kkt_ok = std::fabs(g - (beta[j] > 0.0 ? lambda : -lambda)) <= tolerance;
      }
    }
    if (kkt_ok) {
      converged = true;
      break;
    }
  }

  LassoFit out;
  out.lambda = lambda;
  out.converged = converged;
  out.n_iterations = sweeps;
  out.coefficients.assign(p, 0.0);
  double intercept = design.y_mean();
  for (std::size_t j = 0; j < p; ++j) {
    if (beta[j] != 0.0) {
      out.coefficients[j] = beta[j] / design.column_sd(j);
      out.active_set.push_back(j);
      intercept -= out.coefficients[j] * design.column_mean(j);
    }
  }
  out.intercept = intercept;
  out.rss = dot(residual.data(), residual.data(), t);
  return out;
}

std::vector<LassoFit> fit_path(const DesignMatrix& design, int n_lambdas,
                               double lambda_min_ratio) {
  if (n_lambdas < 2) throw std::invalid_argument("fit_path: n_lambdas must be >= 2");
  if (!(lambda_min_ratio > 0.0) || lambda_min_ratio >= 1.0) {
    throw std::invalid_argument("fit_path: lambda_min_ratio must be in (0,1)");
  }
  const double top = lambda_max(design);
  std::vector<LassoFit> path;
  if (top == 0.0) {
    // Degenerate target (constant y): the whole path collapses to one fit.
    path.push_back(fit(design, 0.0));
    return path;
  }
  path.reserve(static_cast<std::size_t>(n_lambdas));
  std::vector<double> warm;
  for (int i = 0; i < n_lambdas; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n_lambdas - 1);
    const double lambda = top * std::pow(lambda_min_ratio, frac);
    LassoFit step = fit(design, lambda, 1e-7, 10000, warm.empty() ? nullptr : &warm);
    warm = step.coefficients;
    path.push_back(std::move(step));
  }
  return path;
}

SelectionRule SelectionRule::bic() { return SelectionRule{}; }

SelectionRule SelectionRule::cv(int folds, std::uint64_t seed) {
  SelectionRule rule;
  rule.kind = Kind::cv;
  rule.cv_folds = folds;
  rule.cv_seed = seed;
  return rule;
}

SelectionRule SelectionRule::from_name(const std::string& name,
                                       std::uint64_t seed) {
  if (name == "bic") return bic();
  if (name == "cv") return cv(5, seed);
  throw std::invalid_argument("unknown selection rule '" + name +
                              "' (expected bic or cv)");
}

namespace {

double bic_score(const LassoFit& f, std::size_t t) {
  const double rss = f.rss > 1e-300 ? f.rss : 1e-300;
  const double n = static_cast<double>(t);
  return n * std::log(rss / n) +
         static_cast<double>(f.active_set.size()) * std::log(n);
}

LassoFit select_cv(const std::vector<LassoFit>& path, const DesignMatrix& design,
                   const SelectionRule& rule) {
  const std::size_t t = design.n_rows();
  const int k = rule.cv_folds;
  if (k < 2 || static_cast<std::size_t>(k) > t / 2) {
    throw std::invalid_argument("cv: folds must be in [2, T/2]");
  }

  // Reconstruct the original-scale data from the fitted standardization;
  // excluded columns are constant and reconstruct to their mean.
  std::vector<std::vector<double>> columns(design.n_cols(),
                                           std::vector<double>(t));
  std::vector<double> y(t);
  for (std::size_t i = 0; i < t; ++i) {
    y[i] = design.centered_y()[i] + design.y_mean();
  }
  for (std::size_t j = 0; j < design.n_cols(); ++j) {
    const double* col = design.std_column(j);
    for (std::size_t i = 0; i < t; ++i) {
      columns[j][i] = col[i] * design.column_sd(j) + design.column_mean(j);
    }
  }

  // Contiguous blocks, rotated by a seeded offset.
  const std::size_t offset =
      static_cast<std::size_t>(rng::mix64(rule.cv_seed) % t);
  std::vector<int> fold_of(t);
  for (std::size_t i = 0; i < t; ++i) {
    const std::size_t r = (i + offset) % t;
    fold_of[i] = static_cast<int>((r * static_cast<std::size_t>(k)) / t);
  }

  std::vector<double> sq_err(path.size(), 0.0);
  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_rows, valid_rows;
    for (std::size_t i = 0; i < t; ++i) {
      (fold_of[i] == fold ? valid_rows : train_rows).push_back(i);
    }
    const DesignMatrix sub = DesignMatrix::build_rows(columns, y, train_rows);
    std::vector<double> warm;
    for (std::size_t li = 0; li < path.size(); ++li) {
      const LassoFit step =
          fit(sub, path[li].lambda, 1e-7, 10000, warm.empty() ? nullptr : &warm);
      warm = step.coefficients;
      for (std::size_t row : valid_rows) {
        double pred = step.intercept;
        for (std::size_t j : step.active_set) {
          pred += step.coefficients[j] * columns[j][row];
        }
        const double err = y[row] - pred;
        sq_err[li] += err * err;
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t li = 1; li < path.size(); ++li) {
    if (sq_err[li] < sq_err[best]) best = li;  // ties keep the larger lambda
  }
  return path[best];
}

}  // namespace

LassoFit select_lambda(const std::vector<LassoFit>& path,
                       const DesignMatrix& design, const SelectionRule& rule) {
  if (path.empty()) throw std::invalid_argument("select_lambda: empty path");
  if (path.size() == 1) return path.front();
  if (rule.kind == SelectionRule::Kind::cv) return select_cv(path, design, rule);

  std::size_t best = 0;
  double best_score = bic_score(path[0], design.n_rows());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double score = bic_score(path[i], design.n_rows());
    if (score < best_score) {  // ties keep the larger lambda
      best_score = score;
      best = i;
    }
  }
  return path[best];
}

LassoFit fit_and_select(const std::vector<std::vector<double>>& columns,
                        const std::vector<double>& y, const SelectionRule& rule) {
  const DesignMatrix design = DesignMatrix::build(columns, y);
  const std::vector<LassoFit> path =
      fit_path(design, rule.n_lambdas, rule.lambda_min_ratio);
  return select_lambda(path, design, rule);
}

std::vector<double> predict(const LassoFit& fit,
                            const std::vector<std::vector<double>>& columns,
                            std::size_t row_begin, std::size_t row_end) {
  if (row_end < row_begin) throw std::invalid_argument("predict: bad row range");
  std::vector<double> out;
  out.reserve(row_end - row_begin);
  for (std::size_t i = row_begin; i < row_end; ++i) {
    double pred = fit.intercept;
    for (std::size_t j : fit.active_set) {
      pred += fit.coefficients[j] * columns[j][i];
    }
    out.push_back(pred);
  }
  return out;
}

}  // namespace trendlab::lasso
