#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uplift/domain.hpp"
#include "uplift/rng.hpp"

namespace uplift {

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DemandNoise { Poisson, RoundedGaussian };

/// Ground-truth process for one SKU in one store. The conditional mean of
/// sales is linear in the weekday dummies and the discounted-sales count, so
/// the two-step regressions are correctly specified and the planted
/// `gamma_true` is what the uplift stage should recover.
///
/// Per day (weekdays cycle Monday..Sunday from `start_date`):
///   lambda   = weekday_effects[w]
///   forecast = max(0, lambda + forecast_noise_sd * N(0,1))
///   DS       = Poisson(discount_intensity) with probability discount_probability,
///              else 0; capped at stock
///   regular  = Poisson(lambda), or stochastic_round(lambda + demand_noise_sd * N(0,1))
///   sales    = clamp(regular + stochastic_round(gamma_true * DS), 0, stock)
///   discounted_sales = min(DS, sales)
/// Stock is reviewed nightly and topped up to at least `order_up_to` in whole
/// multiples of `case_pack`, so the morning stock varies in
/// [order_up_to, order_up_to + case_pack - 1].
struct DgpConfig {
  std::uint64_t seed = 7;
  int n_days = 2000;
  std::array<double, 7> weekday_effects = {7.0, 7.5, 8.0, 8.5, 10.0, 12.0, 6.0};
  double forecast_noise_sd = 1.0;
  std::int64_t order_up_to = 40;
  std::int64_t case_pack = 6;
  double discount_probability = 0.25;
  double discount_intensity = 3.0;
  double gamma_true = 0.6;
  DemandNoise demand_noise = DemandNoise::RoundedGaussian;
  double demand_noise_sd = 0.5;
  std::int64_t store_id = 1;
  Date start_date{2024, 1, 1};  // a Monday

  void validate() const;
};

struct DayOutcome {
  std::int64_t sales = 0;
  std::int64_t discounted_sales = 0;
};

/// Sales for one day given the latent regular mean, the morning stock and the
/// (already stock-capped) discounted-sales draw.
DayOutcome realize_day(double regular_mean, std::int64_t stock, std::int64_t discount_draw,
                       const DgpConfig& config, Xoshiro256& rng);

/// Generator seed for one SKU: config.seed XOR sku_id.
std::uint64_t sku_seed(std::uint64_t seed, std::int64_t sku_id);

/// Pure function of (config, sku_id).
SkuPanel generate_panel(const DgpConfig& config, std::int64_t sku_id);

/// Observations for SKUs 1..n_skus, ordered by SKU then date.
std::vector<Observation> generate_dataset(const DgpConfig& config, std::int64_t n_skus);

// --- replenishment feedback loop -------------------------------------------

/// Single-SKU store simulation of the discount/forecast feedback loop.
///
/// Stock is held in lots by remaining shelf life. Each morning, units whose
/// shelf life ends today are offered at a discount; each sells with
/// `discount_sell_probability`, and each discounted sale is regular demand with
/// probability `true_regular_share` (otherwise it is demand created by the
/// discount). Regular demand is Poisson(mean_demand); the part not already met
/// by discounted units buys full-price stock, freshest first. Unsold discounted
/// units spoil at the end of the day.
///
/// The forecaster sees full-price sales plus `assumed_share` times discounted
/// sales and smooths that with weight `smoothing_weight`. The nightly order
/// tops stock up to ceil(order_up_to_multiplier * forecast) and arrives the
/// next morning with the full shelf life.
struct CycleConfig {
  std::uint64_t seed = 1;
  int n_days = 730;
  double true_regular_share = 0.3;
  double assumed_share = 0.3;
  double smoothing_weight = 0.1;
  int shelf_life_days = 3;
  double order_up_to_multiplier = 2.0;
  double mean_demand = 8.0;
  double discount_sell_probability = 0.6;

  void validate() const;
};

struct CycleDay {
  int day = 0;
  std::int64_t stock = 0;  // start of day, after the morning delivery
  std::int64_t discounted_offer = 0;
  std::int64_t sales = 0;
  std::int64_t discounted_sales = 0;
  std::int64_t regular_discounted_sales = 0;  // latent
  std::int64_t spoilage = 0;
  std::int64_t orders = 0;  // placed tonight, part of tomorrow's stock
  double forecast = 0.0;    // demand estimate the order was based on
};

using CycleTrace = std::vector<CycleDay>;

CycleTrace simulate_cycle(const CycleConfig& config);

struct CycleSummary {
  std::size_t days = 0;
  std::size_t window_days = 0;  // last half of the horizon
  double mean_stock = 0.0;
  double mean_spoilage = 0.0;
  double mean_sales = 0.0;
  double mean_discounted_sales = 0.0;
  double mean_forecast = 0.0;
  double spoilage_rate = 0.0;  // spoiled units per unit sold
  double stock_slope = 0.0;    // trend of stock per day over the window
  double stock_slope_p = 1.0;  // two-sided p-value of that trend
};

/// Block length for the stock trend test.
inline constexpr std::size_t kTrendBlockDays = 30;

/// Statistics over the last half of the trace (days n/2 .. n-1). The stock
/// trend is an OLS slope fitted to kTrendBlockDays-day block means; it needs at
/// least three full blocks and is reported as 0 with p = 1 otherwise.
CycleSummary summarize_cycle(const CycleTrace& trace);

}  // namespace uplift
