#include "uplift/two_step.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "uplift/aggregate.hpp"
#include "uplift/student_t.hpp"

namespace uplift {

namespace {

constexpr std::size_t kBaselineCols = 9;

DesignMatrix make_design(const SkuPanel& panel, std::span<const std::size_t> days, bool with_ds) {
  const std::size_t p = with_ds ? kBaselineCols + 1 : kBaselineCols;
  Matrix m(days.size(), p, 0.0);
  for (std::size_t r = 0; r < days.size(); ++r) {
    const Observation& obs = panel.observations.at(days[r]);
    m(r, static_cast<std::size_t>(weekday_index(obs.weekday))) = 1.0;
    m(r, 7) = obs.forecast;
    m(r, 8) = static_cast<double>(obs.stock);
    if (with_ds) m(r, 9) = static_cast<double>(obs.discounted_sales);
  }
  return DesignMatrix(std::move(m), with_ds ? uplift_labels() : baseline_labels());
}

SkuUpliftReport failed(const SkuPanel& panel, FailureReason reason,
                       std::vector<std::string> columns = {}) {
  SkuUpliftReport report;
  report.key = panel.key;
  report.n_plain = panel.plain_days.size();
  report.n_disc = panel.discount_days.size();
  report.failure = EstimationFailure{reason, std::move(columns)};
  return report;
}

}  // namespace

std::vector<std::string> baseline_labels() {
  std::vector<std::string> labels;
  for (int w = 1; w <= kWeekdays; ++w) {
    labels.emplace_back(weekday_short_name(static_cast<Weekday>(w)));
  }
  labels.emplace_back("Forecast");
  labels.emplace_back("Stock");
  return labels;
}

std::vector<std::string> uplift_labels() {
  auto labels = baseline_labels();
  labels.emplace_back("DS");
  return labels;
}

DesignMatrix baseline_design(const SkuPanel& panel, std::span<const std::size_t> days) {
  return make_design(panel, days, false);
}

DesignMatrix uplift_design(const SkuPanel& panel, std::span<const std::size_t> days) {
  return make_design(panel, days, true);
}

std::string_view sidedness_name(Sidedness s) {
  return s == Sidedness::TwoSided ? "two" : "one-positive";
}

std::string_view failure_reason_name(FailureReason reason) {
  switch (reason) {
    case FailureReason::EmptyTrainingSet:
      return "empty_training_set";
    case FailureReason::BaselineRankDeficient:
      return "baseline_rank_deficient";
    case FailureReason::TooFewDiscountDays:
      return "too_few_discount_days";
    case FailureReason::UpliftRankDeficient:
      return "uplift_rank_deficient";
  }
  return "unknown";
}

std::string EstimationFailure::describe() const {
  std::string out(failure_reason_name(reason));
  if (!missing_columns.empty()) {
    out += '[';
    for (std::size_t i = 0; i < missing_columns.size(); ++i) {
      if (i) out += ';';
      out += missing_columns[i];
    }
    out += ']';
  }
  return out;
}

void UpliftOptions::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (residual_trim_mass && !(*residual_trim_mass > 0.0 && *residual_trim_mass <= 1.0)) {
    throw std::invalid_argument("residual trim mass must lie in (0, 1]");
  }
}

FitResult fit_baseline(const SkuPanel& panel) {
  if (panel.plain_days.empty()) {
    throw EmptyTrainingSet("panel " + panel.key.to_string() + " has no discount-free days");
  }
  const DesignMatrix X = baseline_design(panel, panel.plain_days);
  std::vector<double> y;
  y.reserve(panel.plain_days.size());
  for (auto i : panel.plain_days) y.push_back(static_cast<double>(panel.observations[i].sales));
  return fit_ols(X, y);
}

std::vector<double> residual_lift(const SkuPanel& panel, const FitResult& baseline) {
  const DesignMatrix X = baseline_design(panel, panel.discount_days);
  const auto predicted = predict(baseline, X);
  std::vector<double> delta(predicted.size());
  for (std::size_t r = 0; r < predicted.size(); ++r) {
    delta[r] = static_cast<double>(panel.observations[panel.discount_days[r]].sales) - predicted[r];
  }
  return delta;
}

SkuUpliftReport fit_uplift(const SkuPanel& panel, std::span<const double> residuals,
                           const UpliftOptions& options) {
  options.validate();
  if (residuals.size() != panel.discount_days.size()) {
    throw DimensionMismatch("fit_uplift: " + std::to_string(residuals.size()) +
                            " residuals for " + std::to_string(panel.discount_days.size()) +
                            " discount days");
  }
  if (panel.discount_days.size() < kMinDiscountDaysForInference) {
    return failed(panel, FailureReason::TooFewDiscountDays);
  }

  FitResult stage2 = fit_ols(uplift_design(panel, panel.discount_days), residuals);
  if (!stage2.ok()) {
    auto report = failed(panel, FailureReason::UpliftRankDeficient, stage2.dependent_columns);
    report.stage2 = std::move(stage2);
    return report;
  }

  constexpr std::size_t ds = kBaselineCols;
  UpliftEstimate e;
  if (options.residual_trim_mass) {
    const auto kept = trim_central(residuals, *options.residual_trim_mass);
    e.mean_residual = std::accumulate(kept.begin(), kept.end(), 0.0) /
                      static_cast<double>(kept.size());
  } else {
    e.mean_residual = std::accumulate(residuals.begin(), residuals.end(), 0.0) /
                      static_cast<double>(residuals.size());
  }
  e.gamma10 = stage2.coefficients[ds];
  e.gamma10_se = stage2.std_errors[ds];
  e.gamma10_t = stage2.t_stats[ds];
  e.gamma10_p_two_sided = stage2.p_values[ds];
  if (options.sidedness == Sidedness::TwoSided) {
    e.gamma10_p = e.gamma10_p_two_sided;
  } else if (std::isnan(e.gamma10_t)) {
    e.gamma10_p = e.gamma10_t;
  } else if (std::isinf(e.gamma10_t)) {
    e.gamma10_p = e.gamma10_t > 0 ? 0.0 : 1.0;
  } else {
    e.gamma10_p = t_upper_tail(e.gamma10_t, static_cast<long>(stage2.dof));
  }
  e.significant_positive = e.gamma10 > 0.0 && e.gamma10_p < options.alpha;
  e.significant_negative = e.gamma10 < 0.0 && e.gamma10_p_two_sided < options.alpha;

  SkuUpliftReport report;
  report.key = panel.key;
  report.n_plain = panel.plain_days.size();
  report.n_disc = panel.discount_days.size();
  report.estimate = e;
  report.stage2 = std::move(stage2);
  return report;
}

SkuUpliftReport estimate_panel(const SkuPanel& panel, const UpliftOptions& options) {
  if (panel.plain_days.empty()) return failed(panel, FailureReason::EmptyTrainingSet);
  FitResult stage1 = fit_baseline(panel);
  if (!stage1.ok()) {
    auto report = failed(panel, FailureReason::BaselineRankDeficient, stage1.dependent_columns);
    report.stage1 = std::move(stage1);
    return report;
  }
  if (panel.discount_days.size() < kMinDiscountDaysForInference) {
    auto report = failed(panel, FailureReason::TooFewDiscountDays);
    report.stage1 = std::move(stage1);
    return report;
  }
  const auto delta = residual_lift(panel, stage1);
  SkuUpliftReport report = fit_uplift(panel, delta, options);
  report.stage1 = std::move(stage1);
  return report;
}

std::size_t StudyResult::n_ok() const {
  return static_cast<std::size_t>(
      std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.ok(); }));
}

std::size_t StudyResult::n_failed() const { return reports.size() - n_ok(); }

StudyResult run_study(std::vector<SkuPanel> panels, const StudyOptions& options) {
  options.uplift.validate();
  std::sort(panels.begin(), panels.end(),
            [](const SkuPanel& a, const SkuPanel& b) { return a.key < b.key; });
  EligibilitySplit split = filter_eligible(std::move(panels), options.rule);

  StudyResult result;
  result.excluded = std::move(split.excluded);
  const auto& eligible = split.eligible;
  result.reports.resize(eligible.size());

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(eligible.size())));

  // Each worker claims the next unprocessed index and writes only its own
  // slot, so the merged order is the key order regardless of scheduling.
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < eligible.size(); i = next.fetch_add(1)) {
        result.reports[i] = estimate_panel(eligible[i], options.uplift);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = eligible.size();
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return result;
}

}  // namespace uplift
