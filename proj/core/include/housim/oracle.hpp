#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "housim/closed_form.hpp"
#include "housim/market_sim.hpp"
#include "housim/path_payoff.hpp"
#include "housim/stats.hpp"

// Brute-force Monte Carlo estimators of the payoff formulas. They simulate the
// offer process directly and share only the random streams with the analytic
// code.

namespace housim::oracle {

/// Replications per random substream. Blocks are merged in index order, so
/// results do not depend on the thread count.
inline constexpr std::size_t kBlockSize = 4096;

McEstimate mc_auxiliary_payoff(double T, const closed_form::MarketParams& market, std::size_t n, std::uint64_t seed,
                               unsigned threads = 0);

McEstimate mc_listed_payoff(double T, const closed_form::MarketParams& market, double reservation, double list,
                            std::size_t n, std::uint64_t seed, unsigned threads = 0);

/// Discounted payoff of one listing along ctx.path from ctx.origin, simulated
/// offer by offer. Arrivals follow k1/max(r, floor) + k2/L(a) in every mode.
McEstimate mc_path_payoff(const path_payoff::PathContext& ctx, double t, path_payoff::ListMode mode, std::size_t n,
                          std::uint64_t seed, unsigned threads = 0);

enum class Verdict { pass, fail, low_power, reported };

std::string_view to_string(Verdict verdict);

/// fail if |z| > sigmas; low_power if the band sigmas * stderr is wider than
/// power_fraction * |analytic|; pass otherwise.
Verdict judge(double analytic, const McEstimate& estimate, double sigmas, double power_fraction);

struct ValidationRow {
  std::string check;
  double analytic = 0.0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double z = 0.0;
  Verdict verdict = Verdict::pass;
};

struct ValidationOptions {
  double sigmas = 3.0;
  std::size_t n = 1'000'000;
  std::uint64_t seed = 20240611;
  /// Multiplies every intensity fed to the analytic side; 1 leaves it intact.
  double lambda_perturbation = 1.0;
  double power_fraction = 0.01;
  unsigned threads = 0;
  closed_form::MarketParams market;
  closed_form::SellerPolicy policy;
  market_sim::SimulationConfig simulation;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;

  std::size_t count(Verdict verdict) const;
  bool passed() const { return count(Verdict::fail) == 0; }
};

inline constexpr double kGridT[] = {0.25, 0.5, 1.0, 2.0, 5.0};
inline constexpr double kGridLambda[] = {1.0, 2.0, 5.0, 8.0, 12.0};
inline constexpr double kPathTimes[] = {0.5, 1.0, 2.0};
inline constexpr double kLowListPrice = 180.0;

/// Deterministic expected CIR path with the simulation defaults, exponential list
/// decay from L0 to R0, uniform offers and exponential withdrawals.
path_payoff::PathContext reference_path_context(const market_sim::SimulationConfig& config, double horizon = 5.0);

/// Oracle-versus-formula grid: auxiliary, thinned, exact listed (printed listed
/// reported), and the path payoffs at L0 = initial_list and L0 = kLowListPrice
/// (printed variants reported).
ValidationReport validate_all(const ValidationOptions& options);

}  // namespace housim::oracle
