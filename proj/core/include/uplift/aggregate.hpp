#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "uplift/two_step.hpp"

namespace uplift {

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoSuccessfulReports : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quantile of ascending-sorted data by linear interpolation between order
/// statistics (Hyndman-Fan type 7, the R and NumPy default).
double quantile_sorted(std::span<const double> sorted, double q);

/// Closed interval [lower, upper] kept by central trimming.
struct TrimBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds q_{(1-mass)/2} and q_{1-(1-mass)/2} of `values`.
TrimBounds trim_bounds(std::span<const double> values, double mass);

/// Values inside `bounds`, in input order.
std::vector<double> apply_bounds(std::span<const double> values, const TrimBounds& bounds);

/// Keeps the values inside [q_{(1-mass)/2}, q_{1-(1-mass)/2}], preserving input
/// order. mass must lie in (0, 1]; throws EmptyInput for an empty input.
std::vector<double> trim_central(std::span<const double> values, double mass);

struct BoxplotStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double lower_whisker = 0.0;  // smallest value >= q1 - 1.5 IQR
  double upper_whisker = 0.0;  // largest value <= q3 + 1.5 IQR
  std::size_t n_outliers = 0;
};

BoxplotStats boxplot(std::span<const double> values);

/// Equal-width bins over [lo, hi]; each bin is [left, right) except the last,
/// which also takes `hi`. Values outside the range are counted in `excluded`.
struct Histogram {
  double lo = 0.0;
  double hi = 1.5;
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
  std::size_t excluded = 0;
};

Histogram histogram(std::span<const double> values, double lo, double hi, std::size_t bins);

struct SummaryOptions {
  double trim_mass = 0.95;
  double hist_lo = 0.0;
  double hist_hi = 1.5;
  std::size_t hist_bins = 30;
};

struct StudyAggregate {
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  std::size_t trimmed_n = 0;  // may be 0 for tiny samples; trimmed statistics are then NaN
  // mean-residual statistics over the trimmed set
  double share_positive_mean_residual = 0.0;
  double mean_of_mean_residuals = 0.0;
  // the same before trimming
  double share_positive_mean_residual_untrimmed = 0.0;
  double mean_of_mean_residuals_untrimmed = 0.0;
  std::size_t n_gamma_positive = 0;
  std::size_t n_gamma_significant = 0;  // significant and positive
  std::size_t n_gamma_significant_negative = 0;
  BoxplotStats boxplot;  // of trimmed mean residuals
  Histogram histogram;   // of all gamma10 estimates
  std::size_t histogram_excluded = 0;
};

/// Cross-SKU summary. The result does not depend on the order of `reports`.
/// Throws NoSuccessfulReports when no report carries an estimate.
StudyAggregate summarize(std::span<const SkuUpliftReport> reports,
                         const SummaryOptions& options = {});

}  // namespace uplift
