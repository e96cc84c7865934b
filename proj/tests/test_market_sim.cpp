#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "housim/market_sim.hpp"
#include "housim/stats.hpp"

using namespace housim;
using namespace housim::market_sim;
using stochastic::OfferEvent;

namespace {

path_payoff::ListSchedule flat(double list) {
  return [list](double) { return list; };
}

double dense_argmax(const std::function<double(double)>& f, double t_max, int points) {
  double best_t = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= points; ++i) {
    const double t = t_max * i / points;
    if (const double v = f(t); v > best) {
      best = v;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

TEST(Draws, OccupationWithinRange) {
  SimulationConfig cfg;
  RandomStream s(1, StreamPurpose::occupation);
  for (int i = 0; i < 100000; ++i) {
    const double o = draw_occupation(cfg, s);
    ASSERT_GE(o, 4.0);
    ASSERT_LE(o, 6.0);
  }
}

TEST(Draws, CrisisMeanTenYears) {
  SimulationConfig cfg;
  RandomStream s(2, StreamPurpose::crisis);
  RunningStats st;
  for (int i = 0; i < 100000; ++i) st.add(draw_crisis(cfg, s));
  EXPECT_NEAR(st.mean(), 10.0, 3.0 * st.std_error());
}

TEST(ListSchedule, Values) {
  const auto L = list_schedule(140, 200, 1.0);
  EXPECT_DOUBLE_EQ(L(0.0), 200.0);
  EXPECT_NEAR(L(1.0), 162.07276647028654, 1e-12);
  EXPECT_NEAR(L(200.0), 140.0, 1e-12);
  for (double t = 0.0; t < 10.0; t += 0.5) EXPECT_GT(L(t), L(t + 0.5));
  EXPECT_THROW(list_schedule(150, 140, 1.0), std::invalid_argument);
  EXPECT_THROW(list_schedule(140, 200, 0.0), std::invalid_argument);
}

TEST(Posting, CrisisBeforeOccupationEnd) {
  const auto path = stochastic::RatePath::constant(0.01, 20.0);
  const OwnerState o{140, 0.8, 5.0, 2.0};
  const auto trig = time_to_posting(o, path, 0.06, 20.0);
  EXPECT_EQ(trig.cause, PostingCause::crisis);
  EXPECT_DOUBLE_EQ(trig.time, 2.0);
}

TEST(Posting, OpenWhenNeitherTriggerFires) {
  const auto path = stochastic::RatePath::constant(0.09, 20.0);
  const OwnerState o{140, 0.8, 5.0, 1e9};
  const auto trig = time_to_posting(o, path, 0.06, 20.0);
  EXPECT_EQ(trig.cause, PostingCause::open);
  EXPECT_DOUBLE_EQ(trig.time, 20.0);
}

TEST(Posting, FirstThresholdCrossingAfterOccupation) {
  // theta + (r0 - theta) e^{-kappa t} reaches 0.06 at t = 7 exactly
  const double theta = 0.04;
  const double kappa = -std::log(0.4) / 7.0;
  const auto path = stochastic::RatePath::mean_reverting(theta, kappa, 0.09, 20.0);
  const OwnerState o{140, 0.8, 5.0, 1e9};
  const auto trig = time_to_posting(o, path, 0.06, 20.0);
  EXPECT_EQ(trig.cause, PostingCause::profit);
  EXPECT_GE(trig.time, 7.0 - 1e-9);
  EXPECT_LE(trig.time, 7.0 + stochastic::kTradingDay);
}

TEST(Posting, ProfitStartsAtOccupationEnd) {
  const auto path = stochastic::RatePath::constant(0.03, 20.0);
  const OwnerState o{140, 0.8, 4.5, 1e9};
  const auto trig = time_to_posting(o, path, 0.06, 20.0);
  EXPECT_EQ(trig.cause, PostingCause::profit);
  EXPECT_GE(trig.time, 4.5);
  EXPECT_LT(trig.time, 4.5 + stochastic::kTradingDay);
}

TEST(FrozenOwt, LowerRateWaitsLess) {
  SimulationConfig cfg;
  const auto low = compute_owt_frozen({0.06, 140, 200}, cfg);
  const auto high = compute_owt_frozen({0.12, 140, 200}, cfg);
  EXPECT_LE(low.t_star, high.t_star);
}

TEST(FrozenOwt, ImpatienceForcesLeftBoundary) {
  SimulationConfig cfg;
  cfg.gamma = 1e6;
  EXPECT_EQ(compute_owt_frozen({0.09, 140, 200}, cfg).boundary, owt::Boundary::left);
}

TEST(FrozenOwt, MatchesDenseGrid) {
  SimulationConfig cfg;
  closed_form::MarketParams m;
  m.lambda = 0.5 / 0.09 + 1000.0 / 200.0;
  m.mu = 10;
  m.r = 0.09;
  closed_form::SellerPolicy p;
  p.reservation = 140;
  p.list = 200;
  p.gamma = 0.8;
  const auto res = compute_owt_frozen({0.09, 140, 200}, cfg);
  const double dense =
      dense_argmax([&](double T) { return closed_form::expected_utility(T, m, p); }, 2.0, 200000);
  EXPECT_NEAR(res.t_star, dense, 1e-3);
}

TEST(MeanPathOwt, InteriorOptimum) {
  SimulationConfig cfg;
  cfg.t_max = 3.0;
  const auto res = compute_owt_mean_path({0.09, 140, 200}, cfg);
  EXPECT_EQ(res.boundary, owt::Boundary::interior);
  EXPECT_GT(res.t_star, 0.0);
}

TEST(SaleRule, NoOffersNoSale) { EXPECT_FALSE(resolve_sale({}, flat(180), 140, 1.0)); }

TEST(SaleRule, OfferAtListSellsImmediately) {
  const std::vector<OfferEvent> offers{{0.3, 195.0, 0.01}};
  const auto sale = resolve_sale(offers, list_schedule(140, 190, 1.0), 140, 1.0);
  ASSERT_TRUE(sale);
  EXPECT_TRUE(sale->via_list);
  EXPECT_DOUBLE_EQ(sale->time, 0.3);
  EXPECT_DOUBLE_EQ(sale->price, 195.0);
}

TEST(SaleRule, DecayingListCatchesLaterOffer) {
  // 170 is below L(0.1) = 180.7; 160 is above L(1.5) = 150.0
  const std::vector<OfferEvent> offers{{0.1, 170.0, 10.0}, {1.5, 160.0, 10.0}};
  const auto sale = resolve_sale(offers, list_schedule(140, 185, 1.0), 140, 3.0);
  ASSERT_TRUE(sale);
  EXPECT_TRUE(sale->via_list);
  EXPECT_DOUBLE_EQ(sale->time, 1.5);
  EXPECT_DOUBLE_EQ(sale->price, 160.0);
}

TEST(SaleRule, AllBelowReservationNoSale) {
  const std::vector<OfferEvent> offers{{0.1, 120.0, 10.0}, {0.5, 139.9, 10.0}};
  EXPECT_FALSE(resolve_sale(offers, flat(180), 140, 1.0));
}

TEST(SaleRule, BestSurvivingOfferAtDeadline) {
  const std::vector<OfferEvent> offers{{0.1, 150.0, 10.0}, {0.2, 175.0, 0.5}, {0.6, 165.0, 10.0}};
  const auto sale = resolve_sale(offers, flat(180), 140, 1.0);
  ASSERT_TRUE(sale);
  EXPECT_FALSE(sale->via_list);
  EXPECT_DOUBLE_EQ(sale->time, 1.0);
  EXPECT_DOUBLE_EQ(sale->price, 165.0);  // 175 withdrew at 0.7
}

TEST(SaleRule, UnsortedOffersRejected) {
  const std::vector<OfferEvent> offers{{0.5, 150.0, 1.0}, {0.1, 150.0, 1.0}};
  EXPECT_THROW(resolve_sale(offers, flat(180), 140, 1.0), std::invalid_argument);
}

TEST(SaleAttempt, SimulatedAttemptRespectsRule) {
  SimulationConfig cfg;
  const auto path = stochastic::RatePath::constant(0.09, 10.0);
  const path_payoff::PathContext ctx{path,
                                     1.0,
                                     list_schedule(140, 200, 1.0),
                                     path_payoff::OfferDistribution::uniform(100, 200),
                                     path_payoff::WithdrawalDistribution::exponential(10),
                                     140.0,
                                     cfg.demand};
  for (std::uint64_t i = 0; i < 200; ++i) {
    RandomStream s(3, StreamPurpose::sale_attempt, i);
    const auto a = run_sale_attempt(ctx, 0.5, s);
    EXPECT_DOUBLE_EQ(a.post_time, 1.0);
    EXPECT_DOUBLE_EQ(a.initial_list, 200.0);
    if (!a.outcome) continue;
    if (a.outcome->via_list) {
      EXPECT_GE(a.outcome->price, ctx.list(a.outcome->time));
      EXPECT_DOUBLE_EQ(a.offers.back().arrival, a.outcome->time);
    } else {
      EXPECT_GE(a.outcome->price, 140.0);
      EXPECT_DOUBLE_EQ(a.outcome->time, 0.5);
    }
  }
  EXPECT_THROW(
      {
        RandomStream s(3, StreamPurpose::sale_attempt);
        run_sale_attempt(ctx, 0.0, s);
      },
      std::invalid_argument);
}

TEST(PriceUpdate, SaleAndNoSale) {
  SimulationConfig cfg;
  const auto sold = update_prices(140, Sale{173, 0.2, false}, cfg);
  EXPECT_DOUBLE_EQ(sold.reservation, 173);
  EXPECT_DOUBLE_EQ(sold.initial_list, 200);
  const auto once = update_prices(140, std::nullopt, cfg);
  EXPECT_DOUBLE_EQ(once.reservation, 120);
  EXPECT_DOUBLE_EQ(once.initial_list, 140);
  const auto twice = update_prices(once.reservation, std::nullopt, cfg);
  EXPECT_DOUBLE_EQ(twice.reservation, 110);
  EXPECT_DOUBLE_EQ(twice.initial_list, 120);
}

TEST(Evolution, ZeroHorizonIsEmpty) {
  const auto log = run_evolution(SimulationConfig{}, 0.0, 1);
  EXPECT_TRUE(log.events.empty());
}

TEST(Evolution, ShortHorizonOnlyOccupies) {
  SimulationConfig cfg;
  cfg.crisis_mean = 1e12;
  const auto log = run_evolution(cfg, 2.0, 1);
  ASSERT_EQ(log.events.size(), 1u);
  EXPECT_EQ(log.events[0].type, EventType::occupation_start);
}

TEST(Evolution, QuietMarketNeverPosts) {
  SimulationConfig cfg;
  cfg.crisis_mean = 1e12;
  cfg.rate_threshold = 1e-12;
  cfg.cir.sigma = 0.0;
  const auto log = run_evolution(cfg, 50.0, 4);
  for (const auto& e : log.events) EXPECT_NE(e.type, EventType::post_for_sale);
}

TEST(Evolution, CrisisDominantPostings) {
  SimulationConfig cfg;
  cfg.crisis_mean = 0.5;
  const auto log = run_evolution(cfg, 50.0, 12);
  int postings = 0;
  for (const auto& e : log.events) {
    EXPECT_NE(e.type, EventType::profit_opportunity);
    if (e.type == EventType::crisis_shock) ++postings;
  }
  EXPECT_GT(postings, 3);
}

TEST(Evolution, LogIntegrity) {
  SimulationConfig cfg;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto log = run_evolution(cfg, 50.0, seed);
    ASSERT_FALSE(log.events.empty());
    EXPECT_EQ(log.events.front().type, EventType::occupation_start);
    double reservation = cfg.initial_reservation;
    int open_attempts = 0;
    for (std::size_t i = 0; i < log.events.size(); ++i) {
      const auto& e = log.events[i];
      if (i > 0) EXPECT_GE(e.time, log.events[i - 1].time);
      switch (e.type) {
        case EventType::post_for_sale:
          ++open_attempts;
          reservation = e.price;
          break;
        case EventType::sale:
          --open_attempts;
          EXPECT_GE(e.price, reservation);
          break;
        case EventType::no_sale: {
          --open_attempts;
          ASSERT_LT(i + 1, log.events.size());
          const auto& next = log.events[i + 1];
          EXPECT_EQ(next.type, EventType::reprice);
          EXPECT_EQ(next.price, (reservation + cfg.p_min) / 2);
          EXPECT_EQ(next.list_price, reservation);
          if (next.time <= 50.0) {
            ASSERT_LT(i + 2, log.events.size());
            EXPECT_EQ(log.events[i + 2].type, EventType::post_for_sale);
          }
          break;
        }
        default: break;
      }
      EXPECT_LE(open_attempts, 1);
    }
    EXPECT_EQ(open_attempts, 0);
  }
}

TEST(Evolution, ReproducibleAcrossThreadSettings) {
  SimulationConfig cfg;
  cfg.threads = 1;
  const auto a = run_evolution(cfg, 50.0, 42);
  cfg.threads = 4;
  const auto b = run_evolution(cfg, 50.0, 42);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].time, b.events[i].time);
    EXPECT_EQ(a.events[i].type, b.events[i].type);
    EXPECT_EQ(std::isnan(a.events[i].price), std::isnan(b.events[i].price));
    if (!std::isnan(a.events[i].price)) EXPECT_EQ(a.events[i].price, b.events[i].price);
  }
  EXPECT_EQ(a.path.values(), b.path.values());
}

TEST(ExpectedPrice, HighDemandSellsHigher) {
  SimulationConfig cfg;
  const double t0 = 0.0;
  const auto low_rate = stochastic::RatePath::constant(0.05, 25.0);
  const auto high_rate = stochastic::RatePath::constant(0.14, 25.0);
  const auto a = expected_price_curve(cfg, low_rate, std::span(&t0, 1), 20000, 7)[0];
  const auto b = expected_price_curve(cfg, high_rate, std::span(&t0, 1), 20000, 7)[0];
  EXPECT_GT(a.mean_price, b.mean_price);
  EXPECT_LT(a.no_sale_fraction, b.no_sale_fraction);
}

TEST(ExpectedPrice, SingleReplicationHasNoStandardError) {
  SimulationConfig cfg;
  const auto path = stochastic::RatePath::constant(0.05, 25.0);
  const double t0 = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = expected_price_curve(cfg, path, std::span(&t0, 1), 1, seed)[0];
    EXPECT_FALSE(p.std_error);
    EXPECT_EQ(p.replications, 1u);
  }
}

TEST(ExpectedPrice, StableUnderDoubling) {
  SimulationConfig cfg;
  const auto path = stochastic::simulate_cir(cfg.cir, 30.0, cfg.dt, 3);
  const std::vector<double> times{1.0, 5.0};
  const auto a = expected_price_curve(cfg, path, times, 4000, 11);
  const auto b = expected_price_curve(cfg, path, times, 8000, 12);
  for (std::size_t q = 0; q < times.size(); ++q) {
    EXPECT_LT(std::abs(a[q].mean_price - b[q].mean_price), 3.0 * std::hypot(*a[q].std_error, *b[q].std_error));
  }
}

TEST(ExpectedPrice, DeterministicAcrossThreads) {
  SimulationConfig cfg;
  const auto path = stochastic::RatePath::constant(0.08, 25.0);
  const std::vector<double> times{0.0, 2.0};
  cfg.threads = 1;
  const auto a = expected_price_curve(cfg, path, times, 500, 3);
  cfg.threads = 3;
  const auto b = expected_price_curve(cfg, path, times, 500, 3);
  for (std::size_t q = 0; q < times.size(); ++q) {
    EXPECT_EQ(a[q].mean_price, b[q].mean_price);
    EXPECT_EQ(a[q].sales, b[q].sales);
  }
}
