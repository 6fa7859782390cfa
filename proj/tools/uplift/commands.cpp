#include "commands.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "uplift/aggregate.hpp"

#ifndef UPLIFT_VERSION
#define UPLIFT_VERSION "0.0.0"
#endif

namespace uplift::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxIssuesPrinted = 50;

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

json manifest(std::string_view command, const std::vector<std::string>& argv, json config) {
  json m;
  m["tool"] = "uplift";
  m["version"] = UPLIFT_VERSION;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = std::move(config);
  m["timestamp"] = utc_timestamp();
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json boxplot_json(const BoxplotStats& b) {
  return json{{"min", b.min},
              {"q1", b.q1},
              {"median", b.median},
              {"q3", b.q3},
              {"max", b.max},
              {"lower_whisker", b.lower_whisker},
              {"upper_whisker", b.upper_whisker},
              {"n_outliers", b.n_outliers}};
}

json aggregate_json(const StudyAggregate& a) {
  json h;
  h["lo"] = a.histogram.lo;
  h["hi"] = a.histogram.hi;
  h["edges"] = a.histogram.edges;
  h["counts"] = a.histogram.counts;
  return json{
      {"n_ok", a.n_ok},
      {"n_failed", a.n_failed},
      {"trimmed_n", a.trimmed_n},
      {"share_positive_mean_residual", a.share_positive_mean_residual},
      {"mean_of_mean_residuals", a.mean_of_mean_residuals},
      {"share_positive_mean_residual_untrimmed", a.share_positive_mean_residual_untrimmed},
      {"mean_of_mean_residuals_untrimmed", a.mean_of_mean_residuals_untrimmed},
      {"n_gamma_positive", a.n_gamma_positive},
      {"n_gamma_significant", a.n_gamma_significant},
      {"n_gamma_significant_negative", a.n_gamma_significant_negative},
      {"boxplot", boxplot_json(a.boxplot)},
      {"histogram", std::move(h)},
      {"histogram_excluded", a.histogram_excluded},
  };
}

std::string reports_csv(const StudyResult& study, Grouping grouping) {
  std::ostringstream out;
  if (grouping == Grouping::StoreSku) out << "store,";
  out << "sku,status,n_plain,n_disc,mean_residual,gamma10,gamma10_se,gamma10_t,gamma10_p,"
         "significant,detail\n";
  for (const auto& r : study.reports) {
    if (grouping == Grouping::StoreSku) out << r.key.store_id.value_or(0) << ',';
    out << r.key.sku_id << ',' << (r.ok() ? "ok" : "failed") << ',' << r.n_plain << ','
        << r.n_disc << ',';
    if (r.ok()) {
      const auto& e = *r.estimate;
      out << format_g17(e.mean_residual) << ',' << format_g17(e.gamma10) << ','
          << format_g17(e.gamma10_se) << ',' << format_g17(e.gamma10_t) << ','
          << format_g17(e.gamma10_p) << ',' << (e.significant_positive ? 1 : 0) << ",\n";
    } else {
      out << ",,,,,," << r.failure->describe() << '\n';
    }
  }
  return out.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "bin,lo,hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << i << ',' << format_g17(h.edges[i]) << ',' << format_g17(h.edges[i + 1]) << ','
        << h.counts[i] << '\n';
  }
  return out.str();
}

std::string boxplot_csv(const BoxplotStats& b) {
  std::ostringstream out;
  out << "stat,value\n";
  out << "min," << format_g17(b.min) << '\n';
  out << "lower_whisker," << format_g17(b.lower_whisker) << '\n';
  out << "q1," << format_g17(b.q1) << '\n';
  out << "median," << format_g17(b.median) << '\n';
  out << "q3," << format_g17(b.q3) << '\n';
  out << "upper_whisker," << format_g17(b.upper_whisker) << '\n';
  out << "max," << format_g17(b.max) << '\n';
  out << "n_outliers," << b.n_outliers << '\n';
  return out.str();
}

void print_issues(std::ostream& err, const std::vector<ParseIssue>& issues, std::string_view kind) {
  for (std::size_t i = 0; i < issues.size() && i < kMaxIssuesPrinted; ++i) {
    err << kind << ": " << issues[i].to_string() << '\n';
  }
  if (issues.size() > kMaxIssuesPrinted) {
    err << kind << ": ... " << issues.size() - kMaxIssuesPrinted << " more\n";
  }
}

json dgp_json(const DgpConfig& c, std::int64_t skus) {
  return json{{"seed", c.seed},
              {"skus", skus},
              {"days", c.n_days},
              {"weekday_effects", c.weekday_effects},
              {"forecast_noise_sd", c.forecast_noise_sd},
              {"order_up_to", c.order_up_to},
              {"case_pack", c.case_pack},
              {"discount_probability", c.discount_probability},
              {"discount_intensity", c.discount_intensity},
              {"gamma_true", c.gamma_true},
              {"demand_noise", c.demand_noise == DemandNoise::Poisson ? "poisson" : "gaussian"},
              {"demand_noise_sd", c.demand_noise_sd},
              {"store_id", c.store_id},
              {"start_date", c.start_date.iso()},
              {"rng", "xoshiro256** seeded by splitmix64(seed ^ sku)"}};
}

json cycle_json(const CycleConfig& c) {
  return json{{"seed", c.seed},
              {"days", c.n_days},
              {"true_regular_share", c.true_regular_share},
              {"assumed_share", c.assumed_share},
              {"smoothing_weight", c.smoothing_weight},
              {"shelf_life_days", c.shelf_life_days},
              {"order_up_to_multiplier", c.order_up_to_multiplier},
              {"mean_demand", c.mean_demand},
              {"discount_sell_probability", c.discount_sell_probability}};
}

}  // namespace

std::string format_g17(double value) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return buf.data();
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("UPLIFT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::optional<std::pair<double, double>> parse_range(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  try {
    std::size_t used = 0;
    const std::string lo_s(text.substr(0, colon));
    const std::string hi_s(text.substr(colon + 1));
    const double lo = std::stod(lo_s, &used);
    if (used != lo_s.size()) return std::nullopt;
    const double hi = std::stod(hi_s, &used);
    if (used != hi_s.size()) return std::nullopt;
    if (!(lo < hi)) return std::nullopt;
    return std::make_pair(lo, hi);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int run_fit(const FitArgs& args, const std::vector<std::string>& argv, std::ostream& out,
            std::ostream& err) {
  const auto content = read_file(args.input);
  if (!content) {
    err << "error: cannot read input file " << args.input << '\n';
    return kExitValidation;
  }

  ParseResult parsed = parse_csv_text(*content);
  print_issues(err, parsed.warnings, "warning");
  if (!parsed.errors.empty()) {
    print_issues(err, parsed.errors, "error");
    if (!args.lenient) {
      err << "error: " << parsed.errors.size() << " invalid row(s) in " << args.input << '\n';
      return kExitValidation;
    }
  }

  StudyOptions options;
  options.rule = {args.min_entries, args.min_discount_days};
  options.uplift.alpha = args.alpha;
  options.uplift.sidedness = args.sidedness;
  options.uplift.residual_trim_mass = args.residual_trim;
  options.threads = resolve_threads(args.threads);
  try {
    options.rule.validate();
    options.uplift.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  const auto panels = build_panels(parsed.observations, args.grouping);
  const StudyResult study = run_study(panels, options);
  if (study.reports.empty()) {
    err << "error: no eligible SKUs (" << panels.size() << " panel(s), "
        << study.excluded.size() << " excluded)\n";
    return kExitValidation;
  }

  fs::create_directories(args.out_dir);

  json config{{"input", args.input.string()},
              {"input_sha256", sha256_hex(*content)},
              {"input_bytes", content->size()},
              {"min_entries", args.min_entries},
              {"min_discount_days", args.min_discount_days},
              {"alpha", args.alpha},
              {"sided", sidedness_name(args.sidedness)},
              {"trim", args.trim},
              {"hist_range", {args.hist_lo, args.hist_hi}},
              {"hist_bins", args.hist_bins},
              {"group_by", args.grouping == Grouping::Sku ? "sku" : "store-sku"},
              {"residual_trim", args.residual_trim ? json(*args.residual_trim) : json(nullptr)},
              {"threads", options.threads},
              {"lenient", args.lenient}};

  json agg_doc;
  agg_doc["eligible"] = study.reports.size();
  agg_doc["excluded"] = study.excluded.size();
  std::vector<std::string> outputs = {"reports.csv", "aggregate.json"};
  write_text(args.out_dir / "reports.csv", reports_csv(study, args.grouping));
  try {
    SummaryOptions summary{args.trim, args.hist_lo, args.hist_hi, args.hist_bins};
    const StudyAggregate agg = summarize(study.reports, summary);
    agg_doc.update(aggregate_json(agg));
    write_text(args.out_dir / "histogram.csv", histogram_csv(agg.histogram));
    write_text(args.out_dir / "boxplot.csv", boxplot_csv(agg.boxplot));
    outputs.emplace_back("histogram.csv");
    outputs.emplace_back("boxplot.csv");
  } catch (const NoSuccessfulReports&) {
    agg_doc["n_ok"] = 0;
    agg_doc["n_failed"] = study.n_failed();
    err << "warning: estimation failed for every eligible SKU; no summary statistics\n";
  }
  write_text(args.out_dir / "aggregate.json", agg_doc.dump(2) + "\n");

  json m = manifest("fit", argv, std::move(config));
  m["outputs"] = outputs;
  write_text(args.out_dir / "manifest.json", m.dump(2) + "\n");

  out << "fitted " << study.n_ok() << " SKU(s), " << study.n_failed() << " failed, "
      << study.excluded.size() << " excluded; results in " << args.out_dir << '\n';
  return kExitOk;
}

int run_simulate(const SimulateArgs& args, const std::vector<std::string>& argv,
                 std::ostream& out, std::ostream& err) {
  try {
    args.dgp.validate();
    if (args.skus < 0) throw InvalidConfig("--skus must be non-negative");
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  const auto rows = generate_dataset(args.dgp, args.skus);
  std::ostringstream csv;
  write_csv(csv, rows);
  const std::string text = csv.str();

  if (args.out.empty() || args.out == "-") {
    out << text;
    return kExitOk;
  }
  if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
  write_text(args.out, text);
  json m = manifest("simulate", argv, dgp_json(args.dgp, args.skus));
  m["outputs"] = {args.out.filename().string()};
  m["output_sha256"] = sha256_hex(text);
  write_text(fs::path(args.out.string() + ".manifest.json"), m.dump(2) + "\n");
  err << "wrote " << rows.size() << " rows to " << args.out << " (sha256 " << sha256_hex(text)
      << ")\n";
  return kExitOk;
}

int run_cycle(const CycleArgs& args, const std::vector<std::string>& argv, std::ostream& out,
              std::ostream& err) {
  CycleTrace trace;
  try {
    trace = simulate_cycle(args.cycle);
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  const CycleSummary s = summarize_cycle(trace);
  fs::create_directories(args.out_dir);

  std::ostringstream csv;
  csv << "day,stock,discounted_offer,sales,discounted_sales,regular_discounted_sales,spoilage,"
         "orders,forecast\n";
  for (const auto& d : trace) {
    csv << d.day << ',' << d.stock << ',' << d.discounted_offer << ',' << d.sales << ','
        << d.discounted_sales << ',' << d.regular_discounted_sales << ',' << d.spoilage << ','
        << d.orders << ',' << format_g17(d.forecast) << '\n';
  }
  write_text(args.out_dir / "trace.csv", csv.str());

  json summary{{"days", s.days},
               {"window_days", s.window_days},
               {"mean_stock", s.mean_stock},
               {"mean_spoilage", s.mean_spoilage},
               {"mean_sales", s.mean_sales},
               {"mean_discounted_sales", s.mean_discounted_sales},
               {"mean_forecast", s.mean_forecast},
               {"spoilage_rate", s.spoilage_rate},
               {"stock_slope", s.stock_slope},
               {"stock_slope_p", s.stock_slope_p}};
  write_text(args.out_dir / "summary.json", summary.dump(2) + "\n");

  json m = manifest("cycle", argv, cycle_json(args.cycle));
  m["outputs"] = {"trace.csv", "summary.json"};
  write_text(args.out_dir / "manifest.json", m.dump(2) + "\n");
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args_echo(argv, argv + argc);

  CLI::App app{"Promotional uplift of discounted sales: two-step regression toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(UPLIFT_VERSION));

  // fit
  FitArgs fit;
  std::string sided = "two";
  std::string group_by = "sku";
  std::string hist_range = "0:1.5";
  double residual_trim = 0.0;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate per-SKU uplift from a CSV panel");
  fit_cmd->add_option("--input", fit.input, "Input CSV")->required();
  fit_cmd->add_option("--out-dir", fit.out_dir, "Output directory")->capture_default_str();
  fit_cmd->add_option("--min-entries", fit.min_entries, "Minimum observations per SKU")
      ->capture_default_str();
  fit_cmd->add_option("--min-discount-days", fit.min_discount_days,
                      "Minimum days with discounted sales")
      ->capture_default_str();
  fit_cmd->add_option("--alpha", fit.alpha, "Significance level")->capture_default_str();
  fit_cmd->add_option("--sided", sided, "two | one-positive")
      ->check(CLI::IsMember({"two", "one-positive"}))
      ->capture_default_str();
  fit_cmd->add_option("--trim", fit.trim, "Central mass kept for mean residuals")
      ->capture_default_str();
  fit_cmd->add_option("--hist-range", hist_range, "Histogram range lo:hi")->capture_default_str();
  fit_cmd->add_option("--hist-bins", fit.hist_bins, "Histogram bins")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--group-by", group_by, "sku | store-sku")
      ->check(CLI::IsMember({"sku", "store-sku"}))
      ->capture_default_str();
  auto* rt = fit_cmd->add_option("--residual-trim", residual_trim,
                                 "Trim each SKU's residuals to this central mass first");
  fit_cmd->add_option("--threads", fit.threads, "Worker threads (0: UPLIFT_THREADS or all cores)");
  fit_cmd->add_flag("--lenient", fit.lenient, "Fit the valid rows even if some rows are invalid");

  // simulate
  SimulateArgs sim;
  std::string noise = "gaussian";
  std::vector<double> weekday_effects;
  std::string start_date = sim.dgp.start_date.iso();
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset with known uplift");
  sim_cmd->add_option("--seed", sim.dgp.seed)->capture_default_str();
  sim_cmd->add_option("--skus", sim.skus)->capture_default_str();
  sim_cmd->add_option("--days", sim.dgp.n_days)->capture_default_str();
  sim_cmd->add_option("--gamma", sim.dgp.gamma_true, "Uplift per discounted sale")
      ->capture_default_str();
  sim_cmd->add_option("--discount-prob", sim.dgp.discount_probability)->capture_default_str();
  sim_cmd->add_option("--intensity", sim.dgp.discount_intensity)->capture_default_str();
  sim_cmd->add_option("--forecast-noise", sim.dgp.forecast_noise_sd)->capture_default_str();
  sim_cmd->add_option("--order-up-to", sim.dgp.order_up_to)->capture_default_str();
  sim_cmd->add_option("--case-pack", sim.dgp.case_pack)->capture_default_str();
  sim_cmd->add_option("--noise", noise, "gaussian | poisson")
      ->check(CLI::IsMember({"gaussian", "poisson"}))
      ->capture_default_str();
  sim_cmd->add_option("--noise-sd", sim.dgp.demand_noise_sd)->capture_default_str();
  sim_cmd->add_option("--weekday-effects", weekday_effects, "Seven values, Monday first")
      ->delimiter(',')
      ->expected(7);
  sim_cmd->add_option("--store", sim.dgp.store_id)->capture_default_str();
  sim_cmd->add_option("--start-date", start_date)->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output CSV ('-' for stdout)");

  // cycle
  CycleArgs cyc;
  auto* cyc_cmd = app.add_subcommand("cycle", "Simulate the discount/forecast feedback loop");
  cyc_cmd->add_option("--seed", cyc.cycle.seed)->capture_default_str();
  cyc_cmd->add_option("--days", cyc.cycle.n_days)->capture_default_str();
  cyc_cmd->add_option("--true-share", cyc.cycle.true_regular_share)->capture_default_str();
  cyc_cmd->add_option("--assumed-share", cyc.cycle.assumed_share)->capture_default_str();
  cyc_cmd->add_option("--smoothing", cyc.cycle.smoothing_weight)->capture_default_str();
  cyc_cmd->add_option("--shelf-life", cyc.cycle.shelf_life_days)->capture_default_str();
  cyc_cmd->add_option("--multiplier", cyc.cycle.order_up_to_multiplier)->capture_default_str();
  cyc_cmd->add_option("--demand", cyc.cycle.mean_demand)->capture_default_str();
  cyc_cmd->add_option("--sell-prob", cyc.cycle.discount_sell_probability)->capture_default_str();
  cyc_cmd->add_option("--out-dir", cyc.out_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*fit_cmd) {
      fit.sidedness = sided == "two" ? Sidedness::TwoSided : Sidedness::OneSidedPositive;
      fit.grouping = group_by == "sku" ? Grouping::Sku : Grouping::StoreSku;
      const auto range = parse_range(hist_range);
      if (!range) {
        err << "error: --hist-range must look like lo:hi with lo < hi\n";
        return kExitValidation;
      }
      fit.hist_lo = range->first;
      fit.hist_hi = range->second;
      if (!(fit.trim > 0.0 && fit.trim <= 1.0)) {
        err << "error: --trim must lie in (0, 1]\n";
        return kExitValidation;
      }
      if (rt->count() > 0) fit.residual_trim = residual_trim;
      return run_fit(fit, args_echo, out, err);
    }
    if (*sim_cmd) {
      sim.dgp.demand_noise = noise == "poisson" ? DemandNoise::Poisson : DemandNoise::RoundedGaussian;
      if (!weekday_effects.empty()) {
        std::copy(weekday_effects.begin(), weekday_effects.end(), sim.dgp.weekday_effects.begin());
      }
      const auto date = parse_iso_date(start_date);
      if (!date) {
        err << "error: --start-date must be YYYY-MM-DD\n";
        return kExitValidation;
      }
      sim.dgp.start_date = *date;
      return run_simulate(sim, args_echo, out, err);
    }
    if (*cyc_cmd) return run_cycle(cyc, args_echo, out, err);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace uplift::cli
