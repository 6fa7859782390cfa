#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uplift {

enum class Weekday : std::uint8_t {
  Monday = 1,
  Tuesday = 2,
  Wednesday = 3,
  Thursday = 4,
  Friday = 5,
  Saturday = 6,
  Sunday = 7,
};

inline constexpr int kWeekdays = 7;

/// Zero-based position of the weekday (Monday = 0).
constexpr int weekday_index(Weekday w) { return static_cast<int>(w) - 1; }

std::string_view weekday_name(Weekday w);
std::string_view weekday_short_name(Weekday w);

/// Accepts English names (any case, full or three-letter) and the integers 1..7.
std::optional<Weekday> parse_weekday(std::string_view text);

/// Proleptic Gregorian calendar date.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  friend auto operator<=>(const Date&, const Date&) = default;

  /// Days since 1970-01-01.
  std::int64_t serial() const;
  static Date from_serial(std::int64_t days);
  Weekday weekday() const;
  std::string iso() const;
};

/// Strict YYYY-MM-DD; rejects impossible dates such as 2024-02-30.
std::optional<Date> parse_iso_date(std::string_view text);

/// One store-SKU-day record.
struct Observation {
  std::int64_t store_id = 0;
  std::int64_t sku_id = 0;
  Date date;
  Weekday weekday = Weekday::Monday;
  std::int64_t stock = 0;      // units at start of day
  double forecast = 0.0;       // units/day
  std::int64_t sales = 0;
  std::int64_t discounted_sales = 0;

  bool operator==(const Observation&) const = default;
};

/// Empty when the record satisfies 0 <= DS <= sales <= stock and forecast >= 0;
/// otherwise names the offending field and the broken rule.
struct InvariantBreach {
  std::string field;
  std::string message;
};
std::optional<InvariantBreach> check_invariants(const Observation& obs);

// --- CSV ingestion -------------------------------------------------------

enum class IssueKind {
  MalformedRow,
  InvariantViolation,
  DuplicateRow,
  WeekdayMismatch,  // warning only
};

struct ParseIssue {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string field;
  IssueKind kind = IssueKind::MalformedRow;
  std::string message;

  /// `line:<n> field:<name> <message>`
  std::string to_string() const;
};

/// Maps each logical column to the header name used in the file.
struct CsvSchema {
  std::string store = "store";
  std::string sku = "sku";
  std::string date = "date";
  std::string weekday = "weekday";
  std::string stock = "stock";
  std::string forecast = "forecast";
  std::string sales = "sales";
  std::string discounted_sales = "discounted_sales";
};

struct ParseResult {
  std::vector<Observation> observations;
  std::vector<ParseIssue> errors;
  std::vector<ParseIssue> warnings;

  bool ok() const { return errors.empty(); }
};

/// Collects every row-level problem instead of stopping at the first one.
/// Valid rows are returned even when other rows fail. A completely empty
/// source yields an empty result with no errors.
ParseResult parse_csv(std::istream& source, const CsvSchema& schema = {});
ParseResult parse_csv_text(std::string_view text, const CsvSchema& schema = {});

/// Writes the canonical header and one row per observation. Forecasts use the
/// shortest decimal form that parses back to the same double.
void write_csv(std::ostream& out, std::span<const Observation> observations,
               const CsvSchema& schema = {});
void write_csv_header(std::ostream& out, const CsvSchema& schema = {});
void write_csv_row(std::ostream& out, const Observation& obs);

// --- panels --------------------------------------------------------------

enum class Grouping { Sku, StoreSku };

struct PanelKey {
  std::int64_t sku_id = 0;
  std::optional<std::int64_t> store_id;  // set only for store-SKU grouping

  friend auto operator<=>(const PanelKey&, const PanelKey&) = default;
  std::string to_string() const;
};

/// All observations of one SKU (or one store-SKU pair), ordered by date then
/// store. `plain_days` and `discount_days` index into `observations` and
/// partition it: a row is a discount day iff discounted_sales >= 1.
struct SkuPanel {
  PanelKey key;
  std::vector<Observation> observations;
  std::vector<std::size_t> plain_days;
  std::vector<std::size_t> discount_days;

  std::int64_t sku_id() const { return key.sku_id; }
  std::size_t size() const { return observations.size(); }

  /// Builds the partition from already-ordered observations.
  static SkuPanel from_observations(PanelKey key, std::vector<Observation> observations);
};

/// One panel per distinct key, ascending by key.
std::vector<SkuPanel> build_panels(std::span<const Observation> observations,
                                   Grouping grouping = Grouping::Sku);

struct EligibilityRule {
  std::int64_t min_entries = 100;
  std::int64_t min_discount_days = 50;

  /// Throws std::invalid_argument unless min_entries >= min_discount_days >= 1.
  void validate() const;
};

enum class ExclusionReason { TooFewEntries, TooFewDiscountDays };
std::string_view exclusion_reason_name(ExclusionReason reason);

struct ExcludedPanel {
  PanelKey key;
  ExclusionReason reason;
  std::size_t entries = 0;
  std::size_t discount_days = 0;
};

struct EligibilitySplit {
  std::vector<SkuPanel> eligible;
  std::vector<ExcludedPanel> excluded;
};

/// Entry count is checked before discount days, so a panel failing both is
/// reported as TooFewEntries.
EligibilitySplit filter_eligible(std::vector<SkuPanel> panels, const EligibilityRule& rule);

}  // namespace uplift
