#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uplift/domain.hpp"
#include "uplift/ols.hpp"

namespace uplift {

class EmptyTrainingSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Column labels of the baseline model: seven weekday dummies, Forecast, Stock.
std::vector<std::string> baseline_labels();
/// Baseline labels plus "DS".
std::vector<std::string> uplift_labels();

/// Rows of `panel` selected by `days`, laid out as the baseline regressors.
DesignMatrix baseline_design(const SkuPanel& panel, std::span<const std::size_t> days);
/// Baseline regressors plus the discounted-sales count.
DesignMatrix uplift_design(const SkuPanel& panel, std::span<const std::size_t> days);

enum class Sidedness { TwoSided, OneSidedPositive };
std::string_view sidedness_name(Sidedness s);

/// Smallest number of discount days that leaves the uplift model with a
/// positive residual degree of freedom.
inline constexpr std::size_t kMinDiscountDaysForInference = 11;

enum class FailureReason {
  EmptyTrainingSet,
  BaselineRankDeficient,
  TooFewDiscountDays,
  UpliftRankDeficient,
};
std::string_view failure_reason_name(FailureReason reason);

struct EstimationFailure {
  FailureReason reason;
  std::vector<std::string> missing_columns;

  std::string describe() const;
};

/// Estimates for one successful SKU. Absent from a failed report.
struct UpliftEstimate {
  double mean_residual = 0.0;  // average residual lift over discount days
  double gamma10 = 0.0;        // uplift per discounted sale
  double gamma10_se = 0.0;
  double gamma10_t = 0.0;
  double gamma10_p = 0.0;  // under the requested sidedness
  double gamma10_p_two_sided = 0.0;
  bool significant_positive = false;  // gamma10 > 0 and gamma10_p < alpha
  bool significant_negative = false;  // gamma10 < 0 and two-sided p < alpha
};

struct SkuUpliftReport {
  PanelKey key;
  std::size_t n_plain = 0;
  std::size_t n_disc = 0;
  std::optional<UpliftEstimate> estimate;
  std::optional<EstimationFailure> failure;
  std::optional<FitResult> stage1;
  std::optional<FitResult> stage2;

  bool ok() const { return estimate.has_value(); }
};

struct UpliftOptions {
  double alpha = 0.05;
  Sidedness sidedness = Sidedness::TwoSided;
  /// When set, the per-SKU mean residual is taken over the central `mass`
  /// of that SKU's discount-day residuals instead of all of them.
  std::optional<double> residual_trim_mass;

  void validate() const;
};

/// Baseline regression of sales on the discount-free days. A weekday that
/// never occurs among those days makes the fit RankDeficient.
/// Throws EmptyTrainingSet when the panel has no discount-free day.
FitResult fit_baseline(const SkuPanel& panel);

/// Sales minus baseline prediction on each discount day, in discount_days order.
/// Throws PredictOnFailedFit when the baseline is rank deficient.
std::vector<double> residual_lift(const SkuPanel& panel, const FitResult& baseline);

/// Regresses the residual lift on the baseline regressors plus DS and derives
/// the significance verdicts for the DS coefficient. Stage-1 is not attached.
SkuUpliftReport fit_uplift(const SkuPanel& panel, std::span<const double> residuals,
                           const UpliftOptions& options = {});

/// Full two-step estimate for one panel; never throws for data-driven failures.
SkuUpliftReport estimate_panel(const SkuPanel& panel, const UpliftOptions& options = {});

struct StudyOptions {
  EligibilityRule rule;
  UpliftOptions uplift;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 1;
};

struct StudyResult {
  std::vector<SkuUpliftReport> reports;  // ascending by key
  std::vector<ExcludedPanel> excluded;

  std::size_t n_ok() const;
  std::size_t n_failed() const;
};

/// Eligibility filter followed by the two-step estimate per panel. Panels run
/// in parallel; results are merged in key order so the output does not depend
/// on the thread count.
StudyResult run_study(std::vector<SkuPanel> panels, const StudyOptions& options);

}  // namespace uplift
