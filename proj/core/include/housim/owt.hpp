#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "housim/closed_form.hpp"

namespace housim::owt {

enum class Boundary { interior, left, right };

struct OwtResult {
  double t_star = 0.0;
  double utility_at_t_star = 0.0;
  std::size_t evaluations = 0;
  Boundary boundary = Boundary::interior;
  /// Sign changes of successive differences along the coarse grid. More than
  /// one means the objective was not unimodal on the scanned range.
  int slope_sign_changes = 0;

  bool unimodal() const { return slope_sign_changes <= 1; }
};

inline constexpr double kDefaultTMax = 20.0;
inline constexpr double kDefaultTol = 1e-4;
inline constexpr std::size_t kCoarseGridPoints = 256;

/// Maximizes objective over (0, t_max]: coarse scan on a uniform grid, then
/// golden-section refinement of the bracketing triple down to width tol.
/// Throws std::domain_error if the objective returns a non-finite value.
OwtResult optimal_waiting_time(const std::function<double(double)>& objective,
                               double t_max = kDefaultTMax, double tol = kDefaultTol);

enum class SweepParameter { lambda, mu, r, reservation, list, gamma, p_min, p_max };

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);
std::string_view to_string(SweepParameter parameter);

struct SweepAxis {
  SweepParameter parameter = SweepParameter::lambda;
  double min = 1.0;
  double max = 10.0;
  std::size_t steps = 10;

  /// Uniform grid; steps == 1 requires min == max.
  std::vector<double> grid() const;
};

struct SweepSpec {
  SweepAxis x;
  SweepAxis y;
  closed_form::MarketParams market;
  closed_form::SellerPolicy policy;
  closed_form::ListedFormula formula = closed_form::ListedFormula::exact;
  double t_max = kDefaultTMax;
  double tol = kDefaultTol;
  unsigned threads = 0;
};

struct Surface {
  std::vector<double> x;
  std::vector<double> y;
  /// Row-major over (y, x); empty where the parameter combination is invalid.
  std::vector<std::optional<double>> t_star;

  std::optional<double> at(std::size_t iy, std::size_t ix) const { return t_star[iy * x.size() + ix]; }
};

Surface sweep_owt(const SweepSpec& spec);

}  // namespace housim::owt
