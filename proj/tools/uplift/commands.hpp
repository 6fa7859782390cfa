#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uplift/domain.hpp"
#include "uplift/synth.hpp"
#include "uplift/two_step.hpp"

namespace uplift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

struct FitArgs {
  std::filesystem::path input;
  std::filesystem::path out_dir = ".";
  std::int64_t min_entries = 100;
  std::int64_t min_discount_days = 50;
  double alpha = 0.05;
  Sidedness sidedness = Sidedness::TwoSided;
  double trim = 0.95;
  double hist_lo = 0.0;
  double hist_hi = 1.5;
  std::size_t hist_bins = 30;
  Grouping grouping = Grouping::Sku;
  std::optional<double> residual_trim;
  unsigned threads = 0;  // 0: UPLIFT_THREADS, else all cores
  bool lenient = false;  // fit the valid rows even when some rows fail
};

struct SimulateArgs {
  DgpConfig dgp;
  std::int64_t skus = 50;
  std::filesystem::path out;  // empty or "-" writes to stdout
};

struct CycleArgs {
  CycleConfig cycle;
  std::filesystem::path out_dir = ".";
};

/// The `argv` copies are echoed into each manifest.
int run_fit(const FitArgs& args, const std::vector<std::string>& argv, std::ostream& out,
            std::ostream& err);
int run_simulate(const SimulateArgs& args, const std::vector<std::string>& argv,
                 std::ostream& out, std::ostream& err);
int run_cycle(const CycleArgs& args, const std::vector<std::string>& argv, std::ostream& out,
              std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Thread count: the flag if nonzero, else UPLIFT_THREADS, else all cores.
unsigned resolve_threads(unsigned flag);

/// "lo:hi" as used by --hist-range.
std::optional<std::pair<double, double>> parse_range(std::string_view text);

/// Printf %.17g: round-trips every double.
std::string format_g17(double value);

}  // namespace uplift::cli
