#include "uplift/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace uplift {

namespace {

constexpr std::array<std::string_view, 7> kFullNames = {
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};
constexpr std::array<std::string_view, 7> kShortNames = {"Mon", "Tue", "Wed", "Thu",
                                                         "Fri", "Sat", "Sun"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace

std::string_view weekday_name(Weekday w) { return kFullNames.at(weekday_index(w)); }
std::string_view weekday_short_name(Weekday w) { return kShortNames.at(weekday_index(w)); }

std::optional<Weekday> parse_weekday(std::string_view text) {
  text = trim(text);
  if (auto n = parse_number<int>(text); n && *n >= 1 && *n <= kWeekdays) {
    return static_cast<Weekday>(*n);
  }
  const std::string key = lower(text);
  for (int i = 0; i < kWeekdays; ++i) {
    if (key == lower(kFullNames[i]) || key == lower(kShortNames[i])) {
      return static_cast<Weekday>(i + 1);
    }
  }
  return std::nullopt;
}

std::int64_t Date::serial() const {
  using namespace std::chrono;
  const sys_days days{year_month_day{std::chrono::year{year},
                                     std::chrono::month{static_cast<unsigned>(month)},
                                     std::chrono::day{static_cast<unsigned>(day)}}};
  return days.time_since_epoch().count();
}

Date Date::from_serial(std::int64_t days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  return Date{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
              static_cast<int>(static_cast<unsigned>(ymd.day()))};
}

Weekday Date::weekday() const {
  using namespace std::chrono;
  const std::chrono::weekday wd{sys_days{std::chrono::days{serial()}}};
  return static_cast<Weekday>(wd.iso_encoding());
}

std::string Date::iso() const {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02d-%02d", year, month, day);
  return std::string(buf.data());
}

std::optional<Date> parse_iso_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = parse_number<int>(text.substr(0, 4));
  auto m = parse_number<int>(text.substr(5, 2));
  auto d = parse_number<int>(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                        std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{*y, *m, *d};
}

std::optional<InvariantBreach> check_invariants(const Observation& obs) {
  if (obs.stock < 0) return InvariantBreach{"stock", "must be non-negative"};
  if (!std::isfinite(obs.forecast) || obs.forecast < 0.0) {
    return InvariantBreach{"forecast", "must be finite and non-negative"};
  }
  if (obs.sales < 0) return InvariantBreach{"sales", "must be non-negative"};
  if (obs.discounted_sales < 0) {
    return InvariantBreach{"discounted_sales", "must be non-negative"};
  }
  if (obs.discounted_sales > obs.sales) {
    return InvariantBreach{"discounted_sales", "discounted_sales " +
                                                   std::to_string(obs.discounted_sales) +
                                                   " exceeds sales " + std::to_string(obs.sales)};
  }
  if (obs.sales > obs.stock) {
    return InvariantBreach{"sales", "sales " + std::to_string(obs.sales) + " exceeds stock " +
                                        std::to_string(obs.stock)};
  }
  const int w = static_cast<int>(obs.weekday);
  if (w < 1 || w > kWeekdays) return InvariantBreach{"weekday", "must be in 1..7"};
  return std::nullopt;
}

std::string ParseIssue::to_string() const {
  return "line:" + std::to_string(line) + " field:" + field + " " + message;
}

ParseResult parse_csv_text(std::string_view text, const CsvSchema& schema) {
  std::istringstream in{std::string(text)};
  return parse_csv(in, schema);
}

ParseResult parse_csv(std::istream& source, const CsvSchema& schema) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;

  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };

  // Header: first non-blank line.
  bool have_header = false;
  std::unordered_map<std::string, std::size_t> column_of;
  while (std::getline(source, line)) {
    ++line_no;
    strip_cr(line);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    have_header = true;
    auto names = split_fields(line);
    for (std::size_t i = 0; i < names.size(); ++i) {
      column_of.emplace(lower(trim(names[i])), i);
    }
    break;
  }
  if (!have_header) return result;

  struct Column {
    const std::string* name;
    std::size_t index = 0;
  };
  const std::array<const std::string*, 8> wanted = {
      &schema.store, &schema.sku,      &schema.date,  &schema.weekday,
      &schema.stock, &schema.forecast, &schema.sales, &schema.discounted_sales};
  std::array<Column, 8> cols{};
  bool header_ok = true;
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    auto it = column_of.find(lower(*wanted[i]));
    if (it == column_of.end()) {
      result.errors.push_back({line_no, *wanted[i], IssueKind::MalformedRow,
                               "missing column in header"});
      header_ok = false;
      continue;
    }
    cols[i] = {wanted[i], it->second};
  }
  if (!header_ok) return result;
  const std::size_t width = column_of.size();

  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen;

  while (std::getline(source, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != width) {
      result.errors.push_back({line_no, "*", IssueKind::MalformedRow,
                               "expected " + std::to_string(width) + " fields, got " +
                                   std::to_string(fields.size())});
      continue;
    }
    auto field = [&](std::size_t i) { return fields[cols[i].index]; };
    auto malformed = [&](std::size_t i, std::string msg) {
      result.errors.push_back({line_no, *cols[i].name, IssueKind::MalformedRow, std::move(msg)});
    };

    Observation obs;
    bool row_ok = true;
    auto read_int = [&](std::size_t i, std::int64_t& out) {
      if (auto v = parse_number<std::int64_t>(field(i))) {
        out = *v;
      } else {
        malformed(i, "not an integer: '" + std::string(trim(field(i))) + "'");
        row_ok = false;
      }
    };
    read_int(0, obs.store_id);
    read_int(1, obs.sku_id);
    if (auto d = parse_iso_date(field(2))) {
      obs.date = *d;
    } else {
      malformed(2, "not an ISO 8601 date: '" + std::string(trim(field(2))) + "'");
      row_ok = false;
    }
    if (auto w = parse_weekday(field(3))) {
      obs.weekday = *w;
    } else {
      malformed(3, "unknown weekday: '" + std::string(trim(field(3))) + "'");
      row_ok = false;
    }
    read_int(4, obs.stock);
    if (auto f = parse_number<double>(field(5))) {
      obs.forecast = *f;
    } else {
      malformed(5, "not a number: '" + std::string(trim(field(5))) + "'");
      row_ok = false;
    }
    read_int(6, obs.sales);
    read_int(7, obs.discounted_sales);
    if (!row_ok) continue;

    if (auto breach = check_invariants(obs)) {
      result.errors.push_back(
          {line_no, breach->field, IssueKind::InvariantViolation, breach->message});
      continue;
    }
    if (!seen.emplace(obs.store_id, obs.sku_id, obs.date.serial()).second) {
      result.errors.push_back({line_no, *cols[2].name, IssueKind::DuplicateRow,
                               "duplicate row for store " + std::to_string(obs.store_id) +
                                   ", sku " + std::to_string(obs.sku_id) + ", date " +
                                   obs.date.iso()});
      continue;
    }
    if (obs.date.weekday() != obs.weekday) {
      result.warnings.push_back(
          {line_no, *cols[3].name, IssueKind::WeekdayMismatch,
           "weekday " + std::string(weekday_name(obs.weekday)) + " does not match date " +
               obs.date.iso() + " (" + std::string(weekday_name(obs.date.weekday())) +
               "); using the weekday column"});
    }
    result.observations.push_back(obs);
  }
  return result;
}

void write_csv_header(std::ostream& out, const CsvSchema& schema) {
  out << schema.store << ',' << schema.sku << ',' << schema.date << ',' << schema.weekday << ','
      << schema.stock << ',' << schema.forecast << ',' << schema.sales << ','
      << schema.discounted_sales << '\n';
}

void write_csv_row(std::ostream& out, const Observation& obs) {
  out << obs.store_id << ',' << obs.sku_id << ',' << obs.date.iso() << ','
      << weekday_name(obs.weekday) << ',' << obs.stock << ',' << format_double(obs.forecast)
      << ',' << obs.sales << ',' << obs.discounted_sales << '\n';
}

void write_csv(std::ostream& out, std::span<const Observation> observations,
               const CsvSchema& schema) {
  write_csv_header(out, schema);
  for (const auto& obs : observations) write_csv_row(out, obs);
}

std::string PanelKey::to_string() const {
  if (store_id) return std::to_string(*store_id) + "/" + std::to_string(sku_id);
  return std::to_string(sku_id);
}

SkuPanel SkuPanel::from_observations(PanelKey key, std::vector<Observation> observations) {
  SkuPanel panel;
  panel.key = key;
  panel.observations = std::move(observations);
  for (std::size_t i = 0; i < panel.observations.size(); ++i) {
    if (panel.observations[i].discounted_sales >= 1) {
      panel.discount_days.push_back(i);
    } else {
      panel.plain_days.push_back(i);
    }
  }
  return panel;
}

std::vector<SkuPanel> build_panels(std::span<const Observation> observations, Grouping grouping) {
  std::map<PanelKey, std::vector<Observation>> groups;
  for (const auto& obs : observations) {
    PanelKey key{obs.sku_id, std::nullopt};
    if (grouping == Grouping::StoreSku) key.store_id = obs.store_id;
    groups[key].push_back(obs);
  }
  std::vector<SkuPanel> panels;
  panels.reserve(groups.size());
  for (auto& [key, rows] : groups) {
    std::stable_sort(rows.begin(), rows.end(), [](const Observation& a, const Observation& b) {
      return std::tie(a.date, a.store_id) < std::tie(b.date, b.store_id);
    });
    panels.push_back(SkuPanel::from_observations(key, std::move(rows)));
  }
  return panels;
}

void EligibilityRule::validate() const {
  if (min_discount_days < 1) {
    throw std::invalid_argument("min_discount_days must be at least 1");
  }
  if (min_entries < min_discount_days) {
    throw std::invalid_argument("min_entries must be at least min_discount_days");
  }
}

std::string_view exclusion_reason_name(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::TooFewEntries:
      return "too_few_entries";
    case ExclusionReason::TooFewDiscountDays:
      return "too_few_discount_days";
  }
  return "unknown";
}

EligibilitySplit filter_eligible(std::vector<SkuPanel> panels, const EligibilityRule& rule) {
  rule.validate();
  EligibilitySplit split;
  for (auto& panel : panels) {
    const auto entries = panel.size();
    const auto disc = panel.discount_days.size();
    if (static_cast<std::int64_t>(entries) < rule.min_entries) {
      split.excluded.push_back({panel.key, ExclusionReason::TooFewEntries, entries, disc});
    } else if (static_cast<std::int64_t>(disc) < rule.min_discount_days) {
      split.excluded.push_back({panel.key, ExclusionReason::TooFewDiscountDays, entries, disc});
    } else {
      split.eligible.push_back(std::move(panel));
    }
  }
  return split;
}

}  // namespace uplift
