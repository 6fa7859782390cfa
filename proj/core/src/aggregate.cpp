#include "uplift/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace uplift {

namespace {

// Sum in ascending order so the result is independent of input order.
double sorted_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double positive_share(std::span<const double> values) {
  const auto pos = std::count_if(values.begin(), values.end(), [](double v) { return v > 0.0; });
  return static_cast<double>(pos) / static_cast<double>(values.size());
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptyInput("quantile of empty data");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile level outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

TrimBounds trim_bounds(std::span<const double> values, double mass) {
  if (values.empty()) throw EmptyInput("trim_central: no values");
  if (!(mass > 0.0 && mass <= 1.0)) {
    throw std::domain_error("trim_central: mass must lie in (0, 1], got " + std::to_string(mass));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (mass == 1.0) return {sorted.front(), sorted.back()};
  const double tail = (1.0 - mass) / 2.0;
  return {quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail)};
}

std::vector<double> apply_bounds(std::span<const double> values, const TrimBounds& bounds) {
  std::vector<double> kept;
  kept.reserve(values.size());
  for (double v : values) {
    if (v >= bounds.lower && v <= bounds.upper) kept.push_back(v);
  }
  return kept;
}

std::vector<double> trim_central(std::span<const double> values, double mass) {
  return apply_bounds(values, trim_bounds(values, mass));
}

BoxplotStats boxplot(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("boxplot: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BoxplotStats b;
  b.min = sorted.front();
  b.max = sorted.back();
  b.q1 = quantile_sorted(sorted, 0.25);
  b.median = quantile_sorted(sorted, 0.5);
  b.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.lower_whisker = *std::lower_bound(sorted.begin(), sorted.end(), lo_fence);
  b.upper_whisker = *std::prev(std::upper_bound(sorted.begin(), sorted.end(), hi_fence));
  b.n_outliers = static_cast<std::size_t>(std::count_if(
      sorted.begin(), sorted.end(), [&](double v) { return v < lo_fence || v > hi_fence; }));
  return b;
}

Histogram histogram(std::span<const double> values, double lo, double hi, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("histogram: need at least one bin");
  if (!(lo < hi)) throw std::invalid_argument("histogram: lo must be below hi");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  for (double v : values) {
    if (!(v >= lo && v <= hi)) {
      ++h.excluded;
      continue;
    }
    auto idx = static_cast<std::size_t>((v - lo) / width);
    idx = std::min(idx, bins - 1);
    // floating-point guard so bin membership agrees with the published edges
    while (idx > 0 && v < h.edges[idx]) --idx;
    while (idx + 1 < bins && v >= h.edges[idx + 1]) ++idx;
    ++h.counts[idx];
  }
  return h;
}

StudyAggregate summarize(std::span<const SkuUpliftReport> reports, const SummaryOptions& options) {
  if (options.hist_bins < 1) throw std::invalid_argument("summarize: hist_bins must be >= 1");
  if (!(options.hist_lo < options.hist_hi)) {
    throw std::invalid_argument("summarize: histogram range is empty");
  }
  StudyAggregate agg;
  std::vector<double> mean_residuals;
  std::vector<double> gammas;
  for (const auto& r : reports) {
    if (!r.ok()) {
      ++agg.n_failed;
      continue;
    }
    ++agg.n_ok;
    const auto& e = *r.estimate;
    mean_residuals.push_back(e.mean_residual);
    gammas.push_back(e.gamma10);
    if (e.gamma10 > 0.0) ++agg.n_gamma_positive;
    if (e.significant_positive) ++agg.n_gamma_significant;
    if (e.significant_negative) ++agg.n_gamma_significant_negative;
  }
  if (agg.n_ok == 0) throw NoSuccessfulReports("summarize: no successful SKU reports");

  // Sorting first makes the trimmed set, and therefore every statistic,
  // independent of report order.
  std::sort(mean_residuals.begin(), mean_residuals.end());
  std::sort(gammas.begin(), gammas.end());

  agg.share_positive_mean_residual_untrimmed = positive_share(mean_residuals);
  agg.mean_of_mean_residuals_untrimmed = sorted_mean(mean_residuals);

  const auto trimmed = trim_central(mean_residuals, options.trim_mass);
  agg.trimmed_n = trimmed.size();
  if (trimmed.empty()) {
    // Interpolated bounds can fall strictly between two values of a tiny sample.
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    agg.share_positive_mean_residual = nan;
    agg.mean_of_mean_residuals = nan;
    agg.boxplot = {nan, nan, nan, nan, nan, nan, nan, 0};
  } else {
    agg.share_positive_mean_residual = positive_share(trimmed);
    agg.mean_of_mean_residuals = sorted_mean(trimmed);
    agg.boxplot = boxplot(trimmed);
  }

  agg.histogram = histogram(gammas, options.hist_lo, options.hist_hi, options.hist_bins);
  agg.histogram_excluded = agg.histogram.excluded;
  return agg;
}

}  // namespace uplift
