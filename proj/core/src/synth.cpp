#include "uplift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "uplift/ols.hpp"

namespace uplift {

void DgpConfig::validate() const {
  if (n_days < 0) throw InvalidConfig("n_days must be non-negative");
  for (double w : weekday_effects) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidConfig("weekday effects must be finite and non-negative");
    }
  }
  if (!(forecast_noise_sd >= 0.0)) throw InvalidConfig("forecast_noise_sd must be >= 0");
  if (order_up_to < 0) throw InvalidConfig("order_up_to must be >= 0");
  if (case_pack < 1) throw InvalidConfig("case_pack must be >= 1");
  if (!(discount_probability >= 0.0 && discount_probability <= 1.0)) {
    throw InvalidConfig("discount_probability must lie in [0, 1]");
  }
  if (!(discount_intensity >= 0.0) || !std::isfinite(discount_intensity)) {
    throw InvalidConfig("discount_intensity must be finite and >= 0");
  }
  if (!std::isfinite(gamma_true)) throw InvalidConfig("gamma_true must be finite");
  if (!(demand_noise_sd >= 0.0)) throw InvalidConfig("demand_noise_sd must be >= 0");
}

DayOutcome realize_day(double regular_mean, std::int64_t stock, std::int64_t discount_draw,
                       const DgpConfig& config, Xoshiro256& rng) {
  std::int64_t regular = 0;
  if (config.demand_noise == DemandNoise::Poisson) {
    regular = poisson(rng, regular_mean);
  } else {
    const double noisy = regular_mean + config.demand_noise_sd * standard_normal(rng);
    regular = std::max<std::int64_t>(0, stochastic_round(rng, noisy));
  }
  const std::int64_t lift = stochastic_round(rng, config.gamma_true * static_cast<double>(discount_draw));
  DayOutcome out;
  out.sales = std::clamp<std::int64_t>(regular + lift, 0, stock);
  out.discounted_sales = std::min(discount_draw, out.sales);
  return out;
}

std::uint64_t sku_seed(std::uint64_t seed, std::int64_t sku_id) {
  return seed ^ static_cast<std::uint64_t>(sku_id);
}

SkuPanel generate_panel(const DgpConfig& config, std::int64_t sku_id) {
  config.validate();
  Xoshiro256 rng(sku_seed(config.seed, sku_id));
  std::vector<Observation> rows;
  rows.reserve(static_cast<std::size_t>(config.n_days));

  const std::int64_t start = config.start_date.serial();
  std::int64_t stock = config.order_up_to;
  for (int d = 0; d < config.n_days; ++d) {
    Observation obs;
    obs.store_id = config.store_id;
    obs.sku_id = sku_id;
    obs.date = Date::from_serial(start + d);
    obs.weekday = obs.date.weekday();
    obs.stock = stock;

    const double lambda = config.weekday_effects[static_cast<std::size_t>(weekday_index(obs.weekday))];
    obs.forecast = std::max(0.0, lambda + config.forecast_noise_sd * standard_normal(rng));
    std::int64_t ds = 0;
    if (uniform01(rng) < config.discount_probability) {
      ds = std::min(poisson(rng, config.discount_intensity), stock);
    }
    const DayOutcome day = realize_day(lambda, stock, ds, config, rng);
    obs.sales = day.sales;
    obs.discounted_sales = day.discounted_sales;
    rows.push_back(obs);

    const std::int64_t remaining = stock - day.sales;
    std::int64_t order = 0;
    if (remaining < config.order_up_to) {
      const std::int64_t gap = config.order_up_to - remaining;
      order = ((gap + config.case_pack - 1) / config.case_pack) * config.case_pack;
    }
    stock = remaining + order;
  }
  return SkuPanel::from_observations(PanelKey{sku_id, std::nullopt}, std::move(rows));
}

std::vector<Observation> generate_dataset(const DgpConfig& config, std::int64_t n_skus) {
  config.validate();
  if (n_skus < 0) throw InvalidConfig("number of SKUs must be non-negative");
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(n_skus) * static_cast<std::size_t>(config.n_days));
  for (std::int64_t sku = 1; sku <= n_skus; ++sku) {
    auto panel = generate_panel(config, sku);
    out.insert(out.end(), panel.observations.begin(), panel.observations.end());
  }
  return out;
}

void CycleConfig::validate() const {
  if (n_days < 0) throw InvalidConfig("n_days must be non-negative");
  auto share = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!share(true_regular_share)) throw InvalidConfig("true_regular_share must lie in [0, 1]");
  if (!share(assumed_share)) throw InvalidConfig("assumed_share must lie in [0, 1]");
  if (!(smoothing_weight > 0.0 && smoothing_weight < 1.0)) {
    throw InvalidConfig("smoothing_weight must lie in (0, 1)");
  }
  if (shelf_life_days < 1) throw InvalidConfig("shelf_life_days must be >= 1");
  if (!(order_up_to_multiplier > 0.0) || !std::isfinite(order_up_to_multiplier)) {
    throw InvalidConfig("order_up_to_multiplier must be positive");
  }
  if (!(mean_demand >= 0.0) || !std::isfinite(mean_demand)) {
    throw InvalidConfig("mean_demand must be finite and >= 0");
  }
  if (!share(discount_sell_probability)) {
    throw InvalidConfig("discount_sell_probability must lie in [0, 1]");
  }
}

CycleTrace simulate_cycle(const CycleConfig& config) {
  config.validate();
  CycleTrace trace;
  trace.reserve(static_cast<std::size_t>(config.n_days));
  Xoshiro256 rng(config.seed);

  // lots[k] = units with k+1 days of shelf life left (lots[0] expires today)
  const auto life = static_cast<std::size_t>(config.shelf_life_days);
  std::deque<std::int64_t> lots(life, 0);
  double forecast = config.mean_demand;
  lots.back() = static_cast<std::int64_t>(std::ceil(config.order_up_to_multiplier * forecast));

  auto on_hand = [&] {
    std::int64_t s = 0;
    for (auto v : lots) s += v;
    return s;
  };

  for (int d = 0; d < config.n_days; ++d) {
    CycleDay day;
    day.day = d;
    day.stock = on_hand();
    day.forecast = forecast;

    // Discounted units: everything on its last day.
    day.discounted_offer = lots[0];
    day.discounted_sales = binomial(rng, lots[0], config.discount_sell_probability);
    day.regular_discounted_sales = binomial(rng, day.discounted_sales, config.true_regular_share);
    lots[0] -= day.discounted_sales;

    // Remaining regular demand buys full-price stock, freshest first.
    const std::int64_t demand = poisson(rng, config.mean_demand);
    std::int64_t wanted = std::max<std::int64_t>(0, demand - day.regular_discounted_sales);
    std::int64_t full_price = 0;
    for (std::size_t k = life; k-- > 1 && wanted > 0;) {
      const std::int64_t take = std::min(wanted, lots[k]);
      lots[k] -= take;
      wanted -= take;
      full_price += take;
    }
    day.sales = full_price + day.discounted_sales;

    day.spoilage = lots[0];
    lots.pop_front();
    lots.push_back(0);

    const double observed = static_cast<double>(full_price) +
                            config.assumed_share * static_cast<double>(day.discounted_sales);
    forecast = config.smoothing_weight * observed + (1.0 - config.smoothing_weight) * forecast;

    const auto target = static_cast<std::int64_t>(std::ceil(config.order_up_to_multiplier * forecast));
    day.orders = std::max<std::int64_t>(0, target - on_hand());
    lots.back() += day.orders;
    trace.push_back(day);
  }
  return trace;
}

CycleSummary summarize_cycle(const CycleTrace& trace) {
  CycleSummary s;
  s.days = trace.size();
  if (trace.empty()) return s;
  const std::size_t first = trace.size() / 2;
  s.window_days = trace.size() - first;
  const double n = static_cast<double>(s.window_days);
  double sold = 0.0;
  double spoiled = 0.0;
  for (std::size_t i = first; i < trace.size(); ++i) {
    const auto& d = trace[i];
    s.mean_stock += static_cast<double>(d.stock);
    spoiled += static_cast<double>(d.spoilage);
    sold += static_cast<double>(d.sales);
    s.mean_discounted_sales += static_cast<double>(d.discounted_sales);
    s.mean_forecast += d.forecast;
  }
  s.mean_stock /= n;
  s.mean_spoilage = spoiled / n;
  s.mean_sales = sold / n;
  s.mean_discounted_sales /= n;
  s.mean_forecast /= n;
  s.spoilage_rate = sold > 0.0 ? spoiled / sold : 0.0;

  // Daily stock is strongly autocorrelated through the smoothed forecast, so
  // the trend is tested on non-overlapping block means.
  const std::size_t blocks = s.window_days / kTrendBlockDays;
  if (blocks >= 3) {
    Matrix X(blocks, 2);
    std::vector<double> y(blocks, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
      X(b, 0) = 1.0;
      X(b, 1) = static_cast<double>(b * kTrendBlockDays);
      for (std::size_t i = 0; i < kTrendBlockDays; ++i) {
        y[b] += static_cast<double>(trace[first + b * kTrendBlockDays + i].stock);
      }
      y[b] /= static_cast<double>(kTrendBlockDays);
    }
    const FitResult trend = fit_ols(DesignMatrix(std::move(X), {"intercept", "day"}), y);
    if (trend.has_inference()) {
      s.stock_slope = trend.coefficients[1];
      s.stock_slope_p = std::isnan(trend.p_values[1]) ? 1.0 : trend.p_values[1];
    }
  }
  return s;
}

}  // namespace uplift
