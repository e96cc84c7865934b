#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "housim/closed_form.hpp"
#include "housim/owt.hpp"
#include "housim/path_payoff.hpp"
#include "housim_cli/config.hpp"

namespace housim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "min:max:steps"; steps == 0 gives an empty grid, steps == 1 requires min == max.
std::vector<double> parse_grid(std::string_view text);
/// "name:min:max:steps"
owt::SweepAxis parse_axis(std::string_view text);
/// Comma-separated list of numbers, or a grid.
std::vector<double> parse_times(std::string_view text);

struct CommonOptions {
  ScenarioConfig config;
  std::filesystem::path out_dir = ".";
  unsigned threads = 0;
};

enum class OwtCurve { listed, no_list };

struct OwtOptions {
  OwtCurve mode = OwtCurve::listed;
  std::vector<double> t_grid;
  closed_form::ListedFormula formula = closed_form::ListedFormula::printed;
};

struct SweepOptions {
  owt::SweepAxis x;
  owt::SweepAxis y;
  closed_form::ListedFormula formula = closed_form::ListedFormula::exact;
};

struct ExpectedPriceOptions {
  std::vector<double> times;
  std::optional<std::size_t> reps;
};

struct PayoffPathOptions {
  std::vector<double> t_grid;
  path_payoff::ListMode mode = path_payoff::ListMode::changing;
  path_payoff::PayoffFormula formula = path_payoff::PayoffFormula::exact;
  std::optional<std::size_t> paths;
};

struct ValidateOptions {
  std::optional<std::size_t> n;
  double sigmas = 3.0;
  double perturb_lambda = 1.0;
};

/// Each command writes its files under common.out_dir and returns an exit code.
int cmd_owt(const CommonOptions& common, const OwtOptions& options);
int cmd_sweep(const CommonOptions& common, const SweepOptions& options);
int cmd_evolve(const CommonOptions& common);
int cmd_expected_price(const CommonOptions& common, const ExpectedPriceOptions& options);
int cmd_payoff_path(const CommonOptions& common, const PayoffPathOptions& options);
int cmd_validate(const CommonOptions& common, const ValidateOptions& options, std::ostream& report);

/// Full command line entry point; never throws.
int run(int argc, char** argv);

}  // namespace housim::cli
