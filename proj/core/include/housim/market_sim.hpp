#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "housim/closed_form.hpp"
#include "housim/owt.hpp"
#include "housim/path_payoff.hpp"
#include "housim/rng.hpp"
#include "housim/stochastic.hpp"

// Multi-owner price evolution: occupation, posting triggers, sale attempts
// governed by the optimal waiting time, and price updates.

namespace housim::market_sim {

enum class OwtMode {
  frozen,     // r and lambda frozen at the posting instant, closed-form utility
  mean_path,  // changing-list path payoff along the expected CIR path
};

struct SimulationConfig {
  double mu = 10.0;
  double occupation_min = 4.0;
  double occupation_max = 6.0;
  double crisis_mean = 10.0;
  double initial_reservation = 140.0;
  double initial_list = 200.0;
  double gamma = 0.8;
  double rate_threshold = 0.06;
  double p_min = 100.0;
  double p_max = 200.0;
  stochastic::DemandParams demand;
  stochastic::CirParams cir;
  double zeta = 1.0;
  double dt = stochastic::kTradingDay;
  double horizon = 50.0;
  double t_max = owt::kDefaultTMax;
  double tol = owt::kDefaultTol;
  OwtMode owt_mode = OwtMode::frozen;
  closed_form::ListedFormula formula = closed_form::ListedFormula::printed;
  unsigned threads = 0;

  void validate() const;
};

/// L(T) = R + (L0 - R) e^{-zeta T}
class ExponentialListSchedule {
 public:
  ExponentialListSchedule(double reservation, double initial_list, double zeta);

  double operator()(double T) const;

 private:
  double reservation_;
  double initial_list_;
  double zeta_;
};

path_payoff::ListSchedule list_schedule(double reservation, double initial_list, double zeta);

struct OwnerState {
  double reservation = 0.0;
  double gamma = 0.0;
  double occupation_end = 0.0;  // absolute time
  double crisis_time = 0.0;     // absolute time
};

double draw_occupation(const SimulationConfig& config, RandomStream& stream);
double draw_crisis(const SimulationConfig& config, RandomStream& stream);

enum class PostingCause { crisis, profit, open };

struct PostingTrigger {
  double time = 0.0;
  PostingCause cause = PostingCause::open;
};

/// min(crisis time, first grid time >= occupation end with r <= threshold),
/// or {horizon, open} when neither happens by the horizon.
PostingTrigger time_to_posting(const OwnerState& owner, const stochastic::RatePath& path, double threshold,
                               double horizon);

struct MarketSnapshot {
  double rate = 0.0;
  double reservation = 0.0;
  double initial_list = 0.0;
};

owt::OwtResult compute_owt_frozen(const MarketSnapshot& snapshot, const SimulationConfig& config);
/// Maximizes e^{-gamma T} times the changing-list path payoff along E[r(s)] started at the snapshot rate.
owt::OwtResult compute_owt_mean_path(const MarketSnapshot& snapshot, const SimulationConfig& config);
owt::OwtResult compute_owt(const MarketSnapshot& snapshot, const SimulationConfig& config);

struct Sale {
  double price = 0.0;
  double time = 0.0;  // relative to posting
  bool via_list = false;
};

struct SaleAttempt {
  double post_time = 0.0;
  double t_star = 0.0;
  double initial_list = 0.0;
  std::vector<stochastic::OfferEvent> offers;  // up to and including the accepted one
  std::optional<Sale> outcome;
};

/// Applies the sale rule to offers sorted by arrival.
std::optional<Sale> resolve_sale(std::span<const stochastic::OfferEvent> offers, const path_payoff::ListSchedule& list,
                                 double reservation, double t_star);

/// Offers over [0, t_star] from ctx (posting at ctx.origin), then resolve_sale.
SaleAttempt run_sale_attempt(const path_payoff::PathContext& ctx, double t_star, RandomStream& stream);

struct PricePair {
  double reservation = 0.0;
  double initial_list = 0.0;
};

/// Sale: (price, p_max). NoSale: ((R + p_min) / 2, R).
PricePair update_prices(double reservation, const std::optional<Sale>& outcome, const SimulationConfig& config);

enum class EventType {
  occupation_start,
  crisis_shock,
  profit_opportunity,
  post_for_sale,
  offer_received,
  offer_withdrawn,
  sale,
  no_sale,
  reprice,
};

std::string_view to_string(EventType type);

inline constexpr std::size_t kNoAttempt = std::numeric_limits<std::size_t>::max();

struct Event {
  double time = 0.0;
  EventType type = EventType::occupation_start;
  double price = std::numeric_limits<double>::quiet_NaN();
  double list_price = std::numeric_limits<double>::quiet_NaN();
  double rate = 0.0;
  double demand = std::numeric_limits<double>::quiet_NaN();  // NaN without an active listing
  std::size_t owner = 0;
  std::size_t attempt = kNoAttempt;
};

struct DemandSample {
  double time = 0.0;
  double intensity = 0.0;
};

struct EvolutionLog {
  std::vector<Event> events;
  stochastic::RatePath path;
  std::vector<DemandSample> demand_trace;

  std::vector<Event> sales() const;
};

/// One realized CIR path and the full owner/attempt history up to the horizon.
/// An attempt in flight at the horizon runs to completion.
EvolutionLog run_evolution(const SimulationConfig& config, double horizon, std::uint64_t seed);

struct PricePoint {
  double time = 0.0;
  double mean_price = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> std_error;
  double no_sale_fraction = 0.0;
  std::size_t sales = 0;
  std::size_t replications = 0;
  double t_star = 0.0;
};

/// n_reps independent attempts posted at each query time with the initial
/// (R, L0) on the given path; NoSale outcomes are excluded from the mean.
std::vector<PricePoint> expected_price_curve(const SimulationConfig& config, const stochastic::RatePath& path,
                                             std::span<const double> times, std::size_t n_reps, std::uint64_t seed);

}  // namespace housim::market_sim
