#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "builders.hpp"
#include "oracles.hpp"
#include "uplift/aggregate.hpp"

namespace uplift {
namespace {

SkuUpliftReport ok_report(std::int64_t sku, double mean_residual, double gamma,
                          bool significant = false) {
  SkuUpliftReport r;
  r.key = PanelKey{sku, std::nullopt};
  UpliftEstimate e;
  e.mean_residual = mean_residual;
  e.gamma10 = gamma;
  e.significant_positive = significant && gamma > 0;
  e.significant_negative = significant && gamma < 0;
  r.estimate = e;
  return r;
}

SkuUpliftReport failed_report(std::int64_t sku) {
  SkuUpliftReport r;
  r.key = PanelKey{sku, std::nullopt};
  r.failure = EstimationFailure{FailureReason::BaselineRankDeficient, {"Sun"}};
  return r;
}

std::vector<double> one_to(int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

TEST(Quantile, TypeSeven) {
  const auto v = one_to(100);
  EXPECT_NEAR(quantile_sorted(v, 0.025), 3.475, 1e-12);
  EXPECT_NEAR(quantile_sorted(v, 0.975), 97.525, 1e-12);
  EXPECT_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_EQ(quantile_sorted(v, 1.0), 100.0);
  const std::vector<double> one = {4.0};
  EXPECT_EQ(quantile_sorted(one, 0.3), 4.0);
}

TEST(TrimCentral, OneToHundred) {
  const auto v = one_to(100);
  const auto kept = trim_central(v, 0.95);
  const auto expected = oracle::brute_trim(v, 0.95);
  // Bounds 3.475 and 97.525 keep 4..97.
  EXPECT_EQ(expected.size(), 94u);
  EXPECT_EQ(kept, expected);
  EXPECT_EQ(kept.front(), 4.0);
  EXPECT_EQ(kept.back(), 97.0);
}

TEST(TrimCentral, IdentityCases) {
  const std::vector<double> v = {3.0, -1.0, 8.0, 2.0};
  EXPECT_EQ(trim_central(v, 1.0), v);
  const std::vector<double> same(17, 2.5);
  EXPECT_EQ(trim_central(same, 0.5), same);
}

TEST(TrimCentral, KeepsInputOrder) {
  const std::vector<double> v = {50, 1, 30, 99, 20, 70, 10, 60, 40, 80, 90};
  const auto kept = trim_central(v, 0.8);
  EXPECT_EQ(kept, oracle::brute_trim(v, 0.8));
  EXPECT_EQ(kept.front(), 50.0);
}

TEST(TrimCentral, Errors) {
  EXPECT_THROW(trim_central(std::vector<double>{}, 0.9), EmptyInput);
  EXPECT_THROW(trim_central(std::vector<double>{1.0}, 0.0), std::domain_error);
  EXPECT_THROW(trim_central(std::vector<double>{1.0}, 1.01), std::domain_error);
}

TEST(Boxplot, FiveNumbersAndWhiskers) {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 100};
  const auto b = boxplot(v);
  EXPECT_EQ(b.min, 1.0);
  EXPECT_EQ(b.q1, 3.0);
  EXPECT_EQ(b.median, 5.0);
  EXPECT_EQ(b.q3, 7.0);
  EXPECT_EQ(b.max, 100.0);
  // Fences at -3 and 13.
  EXPECT_EQ(b.lower_whisker, 1.0);
  EXPECT_EQ(b.upper_whisker, 8.0);
  EXPECT_EQ(b.n_outliers, 1u);
  EXPECT_LE(b.min, b.q1);
  EXPECT_LE(b.q1, b.median);
  EXPECT_LE(b.median, b.q3);
  EXPECT_LE(b.q3, b.max);
  EXPECT_THROW(boxplot(std::vector<double>{}), EmptyInput);
}

TEST(Histogram, BinsAndExclusions) {
  const std::vector<double> v = {-0.2, 0.3, 1.7};
  const auto h = histogram(v, 0.0, 1.5, 30);
  EXPECT_EQ(h.edges.size(), 31u);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 1u);
  EXPECT_EQ(h.excluded, 2u);
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    if (h.counts[b] == 0) continue;
    EXPECT_LE(h.edges[b], 0.3);
    EXPECT_LT(0.3, h.edges[b + 1]);
  }
}

TEST(Histogram, LastBinIsClosed) {
  const std::vector<double> v = {0.0, 1.5, 0.75};
  const auto h = histogram(v, 0.0, 1.5, 2);
  EXPECT_EQ(h.counts[0], 1u);
  EXPECT_EQ(h.counts[1], 2u);
  EXPECT_EQ(h.excluded, 0u);
  EXPECT_THROW(histogram(v, 1.0, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(histogram(v, 0.0, 1.0, 0), std::invalid_argument);
}

TEST(Summarize, ShareAndMeanWithoutTrimming) {
  const std::vector<SkuUpliftReport> reports = {ok_report(1, 0.5, 0.4), ok_report(2, -0.1, 0.2),
                                                ok_report(3, 0.3, 0.6)};
  SummaryOptions opts;
  opts.trim_mass = 1.0;
  const auto agg = summarize(reports, opts);
  EXPECT_EQ(agg.n_ok, 3u);
  EXPECT_EQ(agg.trimmed_n, 3u);
  EXPECT_NEAR(agg.share_positive_mean_residual, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(agg.mean_of_mean_residuals, 0.7 / 3.0, 1e-15);
  EXPECT_EQ(agg.share_positive_mean_residual_untrimmed, agg.share_positive_mean_residual);
}

TEST(Summarize, GammaHistogramExclusion) {
  const std::vector<SkuUpliftReport> reports = {
      ok_report(1, 0.1, -0.2, true), ok_report(2, 0.1, 0.3, true), ok_report(3, 0.1, 1.7),
      failed_report(4)};
  const auto agg = summarize(reports);
  EXPECT_EQ(agg.n_ok, 3u);
  EXPECT_EQ(agg.n_failed, 1u);
  EXPECT_EQ(agg.histogram_excluded, 2u);
  EXPECT_EQ(std::accumulate(agg.histogram.counts.begin(), agg.histogram.counts.end(),
                            std::size_t{0}),
            agg.n_ok - agg.histogram_excluded);
  EXPECT_EQ(agg.n_gamma_positive, 2u);
  EXPECT_EQ(agg.n_gamma_significant, 1u);
  EXPECT_EQ(agg.n_gamma_significant_negative, 1u);
}

TEST(Summarize, TrimmingRemovesTheTails) {
  std::vector<SkuUpliftReport> reports;
  for (int k = 1; k <= 100; ++k) reports.push_back(ok_report(k, static_cast<double>(k), 0.5));
  const auto agg = summarize(reports);
  EXPECT_EQ(agg.trimmed_n, 94u);
  EXPECT_NEAR(agg.mean_of_mean_residuals, 50.5, 1e-12);
  EXPECT_EQ(agg.boxplot.min, 4.0);
  EXPECT_EQ(agg.boxplot.max, 97.0);
  EXPECT_LE(agg.trimmed_n, agg.n_ok);
}

TEST(Summarize, TrimmingCanEmptyATinySample) {
  const std::vector<SkuUpliftReport> reports = {ok_report(1, 0.0, 0.5), ok_report(2, 1.0, 0.5)};
  SummaryOptions opts;
  opts.trim_mass = 0.5;
  const auto agg = summarize(reports, opts);
  EXPECT_EQ(agg.trimmed_n, 0u);
  EXPECT_TRUE(std::isnan(agg.mean_of_mean_residuals));
  EXPECT_EQ(agg.share_positive_mean_residual_untrimmed, 0.5);
}

TEST(Summarize, NoSuccessfulReportsThrows) {
  const std::vector<SkuUpliftReport> none;
  EXPECT_THROW(summarize(none), NoSuccessfulReports);
  const std::vector<SkuUpliftReport> failed = {failed_report(1)};
  EXPECT_THROW(summarize(failed), NoSuccessfulReports);
}

TEST(Summarize, ModeBinHoldsPlantedUplift) {
  // 300 SKUs at 2000 days each; the planted 0.6 sits on a bin edge, so the
  // check uses the closed bin.
  std::vector<SkuPanel> panels;
  for (int k = 1; k <= 300; ++k) {
    panels.push_back(generate_panel(testing::config_for(17, 2000, 0.6, 500), k));
  }
  const auto study = run_study(std::move(panels), StudyOptions{});
  const auto agg = summarize(study.reports);
  const auto& c = agg.histogram.counts;
  const auto mode = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
  EXPECT_LE(agg.histogram.edges[mode], 0.6 + 1e-12);
  EXPECT_GE(agg.histogram.edges[mode + 1], 0.6 - 1e-12);
}

}  // namespace
}  // namespace uplift
