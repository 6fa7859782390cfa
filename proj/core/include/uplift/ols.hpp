#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uplift {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PredictOnFailedFit : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> values() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Regressor matrix with one label per column.
struct DesignMatrix {
  Matrix values;
  std::vector<std::string> labels;

  DesignMatrix() = default;
  DesignMatrix(Matrix m, std::vector<std::string> column_labels);

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
};

enum class FitStatus { Ok, RankDeficient };

/// Output of one least-squares fit.
///
/// Inference fields (std_errors, t_stats, p_values, sigma2) hold NaN when they
/// are undefined: for saturated fits (dof == 0) and for every rank-deficient
/// fit. A rank-deficient fit reports no coefficients at all; `dependent_columns`
/// names the columns that were found to be linear combinations of the others.
struct FitResult {
  FitStatus status = FitStatus::Ok;
  std::vector<std::string> labels;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;  // two-sided
  std::vector<double> residuals;
  std::vector<std::string> dependent_columns;
  std::size_t n = 0;
  std::size_t rank = 0;
  std::ptrdiff_t dof = 0;  // n - p
  double sigma2 = std::numeric_limits<double>::quiet_NaN();
  double rss = std::numeric_limits<double>::quiet_NaN();

  bool ok() const { return status == FitStatus::Ok; }
  bool has_inference() const { return ok() && dof > 0; }
  std::size_t cols() const { return labels.size(); }
};

/// |R_kk| <= kRankTolerance * |R_11| marks column k as dependent.
inline constexpr double kRankTolerance = 1e-10;

/// Least squares via Householder QR with column pivoting.
/// Throws DimensionMismatch when y.size() != X.rows() or the label count is off.
FitResult fit_ols(const DesignMatrix& X, std::span<const double> y);

/// X_new * beta. Labels and column count must match the fit.
std::vector<double> predict(const FitResult& fit, const DesignMatrix& X_new);

}  // namespace uplift
