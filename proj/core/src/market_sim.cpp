#include "housim/market_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "housim/parallel.hpp"
#include "housim/stats.hpp"

namespace housim::market_sim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void SimulationConfig::validate() const {
  require(std::isfinite(mu) && mu >= 0.0, "mu must be finite and >= 0");
  require(occupation_min > 0.0 && occupation_max >= occupation_min && std::isfinite(occupation_max),
          "occupation range must satisfy 0 < min <= max");
  require(crisis_mean > 0.0, "crisis mean must be positive");
  require(p_min > 0.0 && p_max > p_min && std::isfinite(p_max), "offer support must satisfy p_max > p_min > 0");
  require(initial_reservation >= p_min && initial_reservation <= initial_list && initial_list <= p_max,
          "initial prices must satisfy p_min <= R0 <= L0 <= p_max");
  require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be finite and >= 0");
  require(rate_threshold > 0.0, "rate threshold must be positive");
  require(zeta > 0.0 && std::isfinite(zeta), "zeta must be positive");
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  require(horizon >= 0.0 && std::isfinite(horizon), "horizon must be finite and >= 0");
  require(t_max > 0.0 && std::isfinite(t_max), "t_max must be positive");
  require(tol > 0.0, "tol must be positive");
  demand.validate();
  cir.validate();
}

ExponentialListSchedule::ExponentialListSchedule(double reservation, double initial_list, double zeta)
    : reservation_(reservation), initial_list_(initial_list), zeta_(zeta) {
  require(initial_list >= reservation, "list schedule needs L0 >= R");
  require(zeta > 0.0, "list schedule needs zeta > 0");
}

double ExponentialListSchedule::operator()(double T) const {
  return reservation_ + (initial_list_ - reservation_) * std::exp(-zeta_ * T);
}

path_payoff::ListSchedule list_schedule(double reservation, double initial_list, double zeta) {
  return ExponentialListSchedule(reservation, initial_list, zeta);
}

double draw_occupation(const SimulationConfig& config, RandomStream& stream) {
  return stream.uniform(config.occupation_min, config.occupation_max);
}

double draw_crisis(const SimulationConfig& config, RandomStream& stream) {
  return stream.exponential(1.0 / config.crisis_mean);
}

PostingTrigger time_to_posting(const OwnerState& owner, const stochastic::RatePath& path, double threshold,
                               double horizon) {
  require(threshold > 0.0, "rate threshold must be positive");
  const double limit = std::min(horizon, path.horizon());
  double profit = std::numeric_limits<double>::infinity();
  const double start = std::max(0.0, std::ceil(owner.occupation_end / path.dt() - 1e-9));
  for (auto i = static_cast<std::size_t>(start); i < path.size() && path.time_at(i) <= limit; ++i) {
    if (path.values()[i] <= threshold) {
      profit = path.time_at(i);
      break;
    }
  }
  if (owner.crisis_time <= profit && owner.crisis_time <= limit) return {owner.crisis_time, PostingCause::crisis};
  if (std::isfinite(profit)) return {profit, PostingCause::profit};
  return {horizon, PostingCause::open};
}

owt::OwtResult compute_owt_frozen(const MarketSnapshot& snapshot, const SimulationConfig& config) {
  require(snapshot.rate >= 0.0, "snapshot rate must be >= 0");
  closed_form::MarketParams market;
  market.lambda = stochastic::floored_demand_intensity(snapshot.rate, snapshot.initial_list, config.demand);
  market.mu = config.mu;
  market.r = snapshot.rate;
  market.p_min = config.p_min;
  market.p_max = config.p_max;
  closed_form::SellerPolicy policy;
  policy.reservation = snapshot.reservation;
  policy.list = snapshot.initial_list;
  policy.gamma = config.gamma;
  policy.zeta = config.zeta;
  policy.validate(market);
  const auto formula = config.formula;
  return owt::optimal_waiting_time(
      [&](double T) { return closed_form::expected_utility(T, market, policy, formula); }, config.t_max, config.tol);
}

owt::OwtResult compute_owt_mean_path(const MarketSnapshot& snapshot, const SimulationConfig& config) {
  const auto path = stochastic::RatePath::mean_reverting(config.cir.theta, config.cir.kappa, snapshot.rate,
                                                         config.t_max, config.dt);
  const path_payoff::PathContext ctx{path,
                                     0.0,
                                     list_schedule(snapshot.reservation, snapshot.initial_list, config.zeta),
                                     path_payoff::OfferDistribution::uniform(config.p_min, config.p_max),
                                     path_payoff::WithdrawalDistribution::exponential(config.mu),
                                     snapshot.reservation,
                                     config.demand};
  ctx.validate();
  const auto formula = config.formula == closed_form::ListedFormula::exact ? path_payoff::PayoffFormula::exact
                                                                           : path_payoff::PayoffFormula::printed;
  return owt::optimal_waiting_time(
      [&](double T) {
        return std::exp(-config.gamma * T) * path_payoff::conditional_payoff_changing_list(ctx, T, formula);
      },
      config.t_max, config.tol);
}

owt::OwtResult compute_owt(const MarketSnapshot& snapshot, const SimulationConfig& config) {
  return config.owt_mode == OwtMode::mean_path ? compute_owt_mean_path(snapshot, config)
                                               : compute_owt_frozen(snapshot, config);
}

std::optional<Sale> resolve_sale(std::span<const stochastic::OfferEvent> offers, const path_payoff::ListSchedule& list,
                                 double reservation, double t_star) {
  double previous = 0.0;
  for (const auto& offer : offers) {
    if (offer.arrival < previous) throw std::invalid_argument("resolve_sale: offers must be sorted by arrival");
    previous = offer.arrival;
    if (offer.arrival > t_star) break;
    if (offer.value >= list(offer.arrival)) return Sale{offer.value, offer.arrival, true};
  }
  std::optional<Sale> best;
  for (const auto& offer : offers) {
    if (offer.arrival > t_star) break;
    if (offer.value < reservation || offer.withdrawal_delay < t_star - offer.arrival) continue;
    if (!best || offer.value > best->price) best = Sale{offer.value, t_star, false};
  }
  return best;
}

SaleAttempt run_sale_attempt(const path_payoff::PathContext& ctx, double t_star, RandomStream& stream) {
  require(t_star > 0.0 && std::isfinite(t_star), "run_sale_attempt: t_star must be positive");
  SaleAttempt attempt;
  attempt.post_time = ctx.origin;
  attempt.t_star = t_star;
  attempt.initial_list = ctx.list0();
  const double bound =
      stochastic::demand_bound(ctx.demand, ctx.path.min_over(ctx.origin, ctx.origin + t_star), ctx.reservation);
  const auto arrivals = stochastic::sample_nhpp([&](double a) { return ctx.intensity(a); }, t_star, bound, stream);
  for (double a : arrivals) {
    stochastic::OfferEvent offer;
    offer.arrival = a;
    offer.value = ctx.offers.quantile(stream.uniform());
    offer.withdrawal_delay = ctx.withdrawal.quantile(stream.uniform());
    attempt.offers.push_back(offer);
    if (offer.value >= ctx.list(a)) break;
  }
  attempt.outcome = resolve_sale(attempt.offers, ctx.list, ctx.reservation, t_star);
  return attempt;
}

PricePair update_prices(double reservation, const std::optional<Sale>& outcome, const SimulationConfig& config) {
  if (outcome) return {outcome->price, config.p_max};
  return {0.5 * (reservation + config.p_min), reservation};
}

std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::occupation_start: return "OccupationStart";
    case EventType::crisis_shock: return "CrisisShock";
    case EventType::profit_opportunity: return "ProfitOpportunity";
    case EventType::post_for_sale: return "PostForSale";
    case EventType::offer_received: return "OfferReceived";
    case EventType::offer_withdrawn: return "OfferWithdrawn";
    case EventType::sale: return "Sale";
    case EventType::no_sale: return "NoSale";
    case EventType::reprice: return "Reprice";
  }
  return "Unknown";
}

std::vector<Event> EvolutionLog::sales() const {
  std::vector<Event> out;
  for (const auto& e : events) {
    if (e.type == EventType::sale) out.push_back(e);
  }
  return out;
}

namespace {

class EvolutionRecorder {
 public:
  EvolutionRecorder(EvolutionLog& log, const SimulationConfig& config) : log_(log), config_(config) {}

  Event make(double time, EventType type, double price, double list_price, std::size_t owner,
             std::size_t attempt) const {
    Event e;
    e.time = time;
    e.type = type;
    e.price = price;
    e.list_price = list_price;
    e.rate = log_.path.at(time);
    if (!std::isnan(list_price)) e.demand = stochastic::floored_demand_intensity(e.rate, list_price, config_.demand);
    e.owner = owner;
    e.attempt = attempt;
    return e;
  }

  void push(const Event& e) {
    if (!std::isnan(e.demand)) log_.demand_trace.push_back({e.time, e.demand});
    log_.events.push_back(e);
  }

 private:
  EvolutionLog& log_;
  const SimulationConfig& config_;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

EvolutionLog run_evolution(const SimulationConfig& config, double horizon, std::uint64_t seed) {
  config.validate();
  require(horizon >= 0.0 && std::isfinite(horizon), "evolution horizon must be finite and >= 0");
  const double length = std::max(horizon + config.t_max, config.dt);
  EvolutionLog log{{}, stochastic::simulate_cir(config.cir, length, config.dt, seed), {}};
  if (horizon == 0.0) return log;
  EvolutionRecorder rec(log, config);

  double now = 0.0;
  double reservation = config.initial_reservation;
  double initial_list = config.initial_list;
  std::size_t owner = 0;
  std::size_t attempt = 0;
  const auto offers = path_payoff::OfferDistribution::uniform(config.p_min, config.p_max);
  const auto withdrawal = path_payoff::WithdrawalDistribution::exponential(config.mu);

  while (now <= horizon) {
    RandomStream occupation(seed, StreamPurpose::occupation, owner);
    RandomStream crisis(seed, StreamPurpose::crisis, owner);
    OwnerState state;
    state.reservation = reservation;
    state.gamma = config.gamma;
    state.occupation_end = now + draw_occupation(config, occupation);
    state.crisis_time = now + draw_crisis(config, crisis);
    rec.push(rec.make(now, EventType::occupation_start, reservation, kNaN, owner, kNoAttempt));

    const auto trigger = time_to_posting(state, log.path, config.rate_threshold, horizon);
    if (trigger.cause == PostingCause::open) break;
    const auto cause = trigger.cause == PostingCause::crisis ? EventType::crisis_shock : EventType::profit_opportunity;
    rec.push(rec.make(trigger.time, cause, kNaN, kNaN, owner, kNoAttempt));

    double post = trigger.time;
    while (true) {
      const auto result = compute_owt({log.path.at(post), reservation, initial_list}, config);
      rec.push(rec.make(post, EventType::post_for_sale, reservation, initial_list, owner, attempt));

      const path_payoff::PathContext ctx{log.path,   post,        list_schedule(reservation, initial_list, config.zeta),
                                         offers,     withdrawal,  reservation,
                                         config.demand};
      RandomStream stream(seed, StreamPurpose::sale_attempt, attempt);
      const auto outcome = run_sale_attempt(ctx, result.t_star, stream);
      const double end = outcome.outcome ? outcome.outcome->time : result.t_star;

      std::vector<Event> offer_events;
      for (const auto& offer : outcome.offers) {
        offer_events.push_back(rec.make(post + offer.arrival, EventType::offer_received, offer.value,
                                        ctx.list(offer.arrival), owner, attempt));
        const double gone = offer.arrival + offer.withdrawal_delay;
        if (gone < end) {
          offer_events.push_back(
              rec.make(post + gone, EventType::offer_withdrawn, offer.value, ctx.list(gone), owner, attempt));
        }
      }
      std::stable_sort(offer_events.begin(), offer_events.end(),
                       [](const Event& a, const Event& b) { return a.time < b.time; });
      for (const auto& e : offer_events) rec.push(e);

      const auto next = update_prices(reservation, outcome.outcome, config);
      if (outcome.outcome) {
        const auto& sale = *outcome.outcome;
        rec.push(rec.make(post + sale.time, EventType::sale, sale.price, ctx.list(sale.time), owner, attempt));
        reservation = next.reservation;
        initial_list = next.initial_list;
        now = post + sale.time;
        ++owner;
        ++attempt;
        break;
      }
      rec.push(rec.make(post + end, EventType::no_sale, kNaN, ctx.list(end), owner, attempt));
      reservation = next.reservation;
      initial_list = next.initial_list;
      post += end;
      rec.push(rec.make(post, EventType::reprice, reservation, initial_list, owner, attempt));
      ++attempt;
      if (post > horizon) return log;
    }
  }
  return log;
}

std::vector<PricePoint> expected_price_curve(const SimulationConfig& config, const stochastic::RatePath& path,
                                             std::span<const double> times, std::size_t n_reps, std::uint64_t seed) {
  config.validate();
  require(n_reps >= 1, "expected_price_curve needs n_reps >= 1");
  std::vector<PricePoint> curve;
  curve.reserve(times.size());
  const auto offers = path_payoff::OfferDistribution::uniform(config.p_min, config.p_max);
  const auto withdrawal = path_payoff::WithdrawalDistribution::exponential(config.mu);
  for (std::size_t q = 0; q < times.size(); ++q) {
    const double t = times[q];
    require(t >= 0.0 && std::isfinite(t), "query times must be finite and >= 0");
    const auto result = compute_owt({path.at(t), config.initial_reservation, config.initial_list}, config);
    const path_payoff::PathContext ctx{path,    t,          list_schedule(config.initial_reservation, config.initial_list, config.zeta),
                                       offers,  withdrawal, config.initial_reservation,
                                       config.demand};
    std::vector<std::optional<double>> prices(n_reps);
    parallel_for(n_reps, config.threads, [&](std::size_t rep) {
      RandomStream stream(seed, StreamPurpose::expected_price, (static_cast<std::uint64_t>(q) << 32) | rep);
      const auto attempt = run_sale_attempt(ctx, result.t_star, stream);
      if (attempt.outcome) prices[rep] = attempt.outcome->price;
    });
    RunningStats stats;
    for (const auto& p : prices) {
      if (p) stats.add(*p);
    }
    PricePoint point;
    point.time = t;
    point.replications = n_reps;
    point.sales = stats.count();
    point.no_sale_fraction = 1.0 - static_cast<double>(stats.count()) / static_cast<double>(n_reps);
    if (stats.count() > 0) point.mean_price = stats.mean();
    if (stats.count() > 1) point.std_error = stats.std_error();
    point.t_star = result.t_star;
    curve.push_back(point);
  }
  return curve;
}

}  // namespace housim::market_sim
