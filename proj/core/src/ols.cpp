#include "uplift/ols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "uplift/student_t.hpp"

namespace uplift {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PivotedQR {
  Matrix packed;                  // R in the upper triangle, Householder tails below
  std::vector<double> diag;       // R_kk
  std::vector<std::size_t> perm;  // column k of R is column perm[k] of X
  std::vector<double> qty;        // Q^T y
  std::size_t rank = 0;
};

PivotedQR pivoted_householder(const Matrix& X, std::span<const double> y) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  PivotedQR qr;
  qr.packed = X;
  qr.diag.assign(p, 0.0);
  qr.perm.resize(p);
  std::iota(qr.perm.begin(), qr.perm.end(), std::size_t{0});
  qr.qty.assign(y.begin(), y.end());

  Matrix& A = qr.packed;
  const std::size_t steps = std::min(n, p);
  std::vector<double> v(n);

  for (std::size_t k = 0; k < steps; ++k) {
    // Pivot on the largest trailing column norm. Recomputed each step; p is small.
    std::size_t best = k;
    double best_norm = -1.0;
    for (std::size_t j = k; j < p; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += A(i, j) * A(i, j);
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best != k) {
      for (std::size_t i = 0; i < n; ++i) std::swap(A(i, k), A(i, best));
      std::swap(qr.perm[k], qr.perm[best]);
    }

    const double norm = std::sqrt(best_norm);
    if (norm == 0.0) break;  // every remaining column is zero

    const double alpha = A(k, k) > 0.0 ? -norm : norm;
    double vtv = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      v[i] = A(i, k);
      if (i == k) v[i] -= alpha;
      vtv += v[i] * v[i];
    }
    qr.diag[k] = alpha;
    A(k, k) = alpha;
    for (std::size_t i = k + 1; i < n; ++i) A(i, k) = 0.0;
    if (vtv == 0.0) continue;
    const double scale = 2.0 / vtv;

    for (std::size_t j = k + 1; j < p; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i] * A(i, j);
      dot *= scale;
      for (std::size_t i = k; i < n; ++i) A(i, j) -= dot * v[i];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < n; ++i) dot += v[i] * qr.qty[i];
    dot *= scale;
    for (std::size_t i = k; i < n; ++i) qr.qty[i] -= dot * v[i];
  }

  const double lead = steps > 0 ? std::fabs(qr.diag[0]) : 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    if (lead == 0.0 || std::fabs(qr.diag[k]) <= kRankTolerance * lead) break;
    ++qr.rank;
  }
  return qr;
}

}  // namespace

DesignMatrix::DesignMatrix(Matrix m, std::vector<std::string> column_labels)
    : values(std::move(m)), labels(std::move(column_labels)) {
  if (labels.size() != values.cols()) {
    throw DimensionMismatch("design matrix has " + std::to_string(values.cols()) +
                            " columns but " + std::to_string(labels.size()) + " labels");
  }
}

FitResult fit_ols(const DesignMatrix& X, std::span<const double> y) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  if (y.size() != n) {
    throw DimensionMismatch("fit_ols: X has " + std::to_string(n) + " rows but y has " +
                            std::to_string(y.size()) + " entries");
  }
  if (X.labels.size() != p) throw DimensionMismatch("fit_ols: label count differs from columns");
  if (p == 0) throw DimensionMismatch("fit_ols: design matrix has no columns");

  FitResult fit;
  fit.labels = X.labels;
  fit.n = n;
  fit.dof = static_cast<std::ptrdiff_t>(n) - static_cast<std::ptrdiff_t>(p);

  const PivotedQR qr = pivoted_householder(X.values, y);
  fit.rank = qr.rank;
  if (qr.rank < p) {
    fit.status = FitStatus::RankDeficient;
    std::vector<std::size_t> dependent(qr.perm.begin() + static_cast<std::ptrdiff_t>(qr.rank),
                                       qr.perm.end());
    std::sort(dependent.begin(), dependent.end());
    for (auto j : dependent) fit.dependent_columns.push_back(X.labels[j]);
    return fit;
  }

  // Back substitution on R beta_perm = (Q^T y)[0:p].
  const Matrix& R = qr.packed;
  std::vector<double> beta_perm(p, 0.0);
  for (std::size_t kk = p; kk-- > 0;) {
    double s = qr.qty[kk];
    for (std::size_t j = kk + 1; j < p; ++j) s -= R(kk, j) * beta_perm[j];
    beta_perm[kk] = s / R(kk, kk);
  }
  fit.coefficients.assign(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) fit.coefficients[qr.perm[k]] = beta_perm[k];

  fit.residuals.resize(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = X.values.row(i);
    double yhat = 0.0;
    for (std::size_t j = 0; j < p; ++j) yhat += row[j] * fit.coefficients[j];
    fit.residuals[i] = y[i] - yhat;
    rss += fit.residuals[i] * fit.residuals[i];
  }
  fit.rss = rss;

  fit.std_errors.assign(p, kNaN);
  fit.t_stats.assign(p, kNaN);
  fit.p_values.assign(p, kNaN);
  if (fit.dof <= 0) return fit;

  fit.sigma2 = rss / static_cast<double>(fit.dof);

  // diag((X^T X)^-1) = row sums of squares of R^-1, mapped through the pivot.
  Matrix Rinv(p, p, 0.0);
  for (std::size_t col = 0; col < p; ++col) {
    Rinv(col, col) = 1.0 / R(col, col);
    for (std::size_t r = col; r-- > 0;) {
      double s = 0.0;
      for (std::size_t j = r + 1; j <= col; ++j) s += R(r, j) * Rinv(j, col);
      Rinv(r, col) = -s / R(r, r);
    }
  }
  for (std::size_t k = 0; k < p; ++k) {
    double d = 0.0;
    for (std::size_t j = k; j < p; ++j) d += Rinv(k, j) * Rinv(k, j);
    const std::size_t col = qr.perm[k];
    const double se = std::sqrt(fit.sigma2 * d);
    const double t = fit.coefficients[col] / se;
    fit.std_errors[col] = se;
    fit.t_stats[col] = t;
    fit.p_values[col] = std::isnan(t) ? kNaN : t_pvalue(t, static_cast<long>(fit.dof));
  }
  return fit;
}

std::vector<double> predict(const FitResult& fit, const DesignMatrix& X_new) {
  if (!fit.ok()) {
    throw PredictOnFailedFit("predict: fit is rank deficient; no coefficients available");
  }
  if (X_new.cols() != fit.cols() || X_new.labels != fit.labels) {
    throw DimensionMismatch("predict: design columns do not match the fitted model");
  }
  std::vector<double> out(X_new.rows(), 0.0);
  for (std::size_t i = 0; i < X_new.rows(); ++i) {
    const auto row = X_new.values.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * fit.coefficients[j];
    out[i] = s;
  }
  return out;
}

}  // namespace uplift
