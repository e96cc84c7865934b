#include "housim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "housim/parallel.hpp"
#include "housim/rng.hpp"

namespace housim::oracle {

namespace {

template <class Replication>
McEstimate run_blocks(std::size_t n, std::uint64_t seed, StreamPurpose purpose, unsigned threads,
                      Replication&& replication) {
  if (n < 2) throw std::invalid_argument("Monte Carlo estimate needs n >= 2");
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<RunningStats> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    RandomStream stream(seed, purpose, b);
    const std::size_t count = std::min(kBlockSize, n - b * kBlockSize);
    for (std::size_t i = 0; i < count; ++i) partial[b].add(replication(stream));
  });
  RunningStats total;
  for (const auto& p : partial) total.merge(p);
  return total.estimate();
}

// Piecewise linear rate read straight off the grid values.
class GridRate {
 public:
  GridRate(const stochastic::RatePath& path, double origin)
      : dt_(path.dt()), values_(path.values()), origin_(origin), area_(values_.size(), 0.0) {
    for (std::size_t i = 1; i < values_.size(); ++i) {
      area_[i] = area_[i - 1] + dt_ * (values_[i - 1] + values_[i]) / 2.0;
    }
    origin_area_ = area_to(origin_);
  }

  double rate(double a) const {
    const double s = origin_ + a;
    const double k = std::floor(s / dt_);
    const auto i = static_cast<std::size_t>(k);
    if (i + 1 >= values_.size()) return values_.back();
    const double w = s / dt_ - k;
    return (1.0 - w) * values_[i] + w * values_[i + 1];
  }

  /// Integral of the rate over [origin, origin + a].
  double area(double a) const { return area_to(origin_ + a) - origin_area_; }

  double minimum(double a) const {
    double m = std::min(rate(0.0), rate(a));
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double s = dt_ * static_cast<double>(i);
      if (s >= origin_ && s <= origin_ + a) m = std::min(m, values_[i]);
    }
    return m;
  }

 private:
  double area_to(double s) const {
    const double k = std::floor(s / dt_);
    const auto i = static_cast<std::size_t>(k);
    if (i + 1 >= values_.size()) {
      const double end = dt_ * static_cast<double>(values_.size() - 1);
      return area_.back() + values_.back() * (s - end);
    }
    const double h = s - dt_ * k;
    const double r_end = values_[i] + (values_[i + 1] - values_[i]) * h / dt_;
    return area_[i] + h * (values_[i] + r_end) / 2.0;
  }

  double dt_;
  const std::vector<double>& values_;
  double origin_;
  std::vector<double> area_;
  double origin_area_ = 0.0;
};

constexpr double kOracleRateFloor = 1e-4;

std::string format_number(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

std::string label(std::string_view name, std::string_view a_name, double a, std::string_view b_name, double b) {
  std::ostringstream out;
  out << name << ' ' << a_name << '=' << a;
  if (!b_name.empty()) out << ' ' << b_name << '=' << b;
  return out.str();
}

ValidationRow make_row(std::string check, double analytic, const McEstimate& est, Verdict verdict) {
  ValidationRow row;
  row.check = std::move(check);
  row.analytic = analytic;
  row.mc_mean = est.mean;
  row.mc_stderr = est.std_error;
  const double gap = analytic - est.mean;
  if (est.std_error > 0.0) {
    row.z = gap / est.std_error;
  } else {
    row.z = gap == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), gap);
  }
  row.verdict = verdict;
  return row;
}

}  // namespace

McEstimate mc_auxiliary_payoff(double T, const closed_form::MarketParams& market, std::size_t n, std::uint64_t seed,
                               unsigned threads) {
  market.validate();
  if (!(T >= 0.0)) throw std::invalid_argument("mc_auxiliary_payoff: T must be >= 0");
  const double discount = std::exp(-market.r * T);
  return run_blocks(n, seed, StreamPurpose::oracle_auxiliary, threads, [&](RandomStream& s) {
    if (market.lambda == 0.0) return 0.0;
    double best = 0.0;
    for (double a = s.exponential(market.lambda); a <= T; a += s.exponential(market.lambda)) {
      const double value = s.uniform(market.p_min, market.p_max);
      const double delay = s.exponential(market.mu);
      if (delay >= T - a) best = std::max(best, value);
    }
    return discount * best;
  });
}

McEstimate mc_listed_payoff(double T, const closed_form::MarketParams& market, double reservation, double list,
                            std::size_t n, std::uint64_t seed, unsigned threads) {
  market.validate();
  if (!(T >= 0.0)) throw std::invalid_argument("mc_listed_payoff: T must be >= 0");
  if (!(reservation <= list)) throw std::invalid_argument("mc_listed_payoff: needs R <= L");
  const double discount = std::exp(-market.r * T);
  return run_blocks(n, seed, StreamPurpose::oracle_listed, threads, [&](RandomStream& s) {
    if (market.lambda == 0.0) return 0.0;
    double best = 0.0;
    for (double a = s.exponential(market.lambda); a <= T; a += s.exponential(market.lambda)) {
      const double value = s.uniform(market.p_min, market.p_max);
      const double delay = s.exponential(market.mu);
      if (value >= list) return std::exp(-market.r * a) * value;
      if (value >= reservation && delay >= T - a) best = std::max(best, value);
    }
    return discount * best;
  });
}

McEstimate mc_path_payoff(const path_payoff::PathContext& ctx, double t, path_payoff::ListMode mode, std::size_t n,
                          std::uint64_t seed, unsigned threads) {
  if (!(t >= 0.0)) throw std::invalid_argument("mc_path_payoff: t must be >= 0");
  const GridRate rates(ctx.path, ctx.origin);
  const double R = ctx.reservation;
  const double L0 = ctx.list(0.0);
  const double k1 = ctx.demand.k1;
  const double k2 = ctx.demand.k2;
  auto intensity = [&](double a) { return k1 / std::max(rates.rate(a), kOracleRateFloor) + k2 / ctx.list(a); };
  const double bound = k1 / std::max(rates.minimum(t), kOracleRateFloor) + k2 / R;
  const double end_discount = std::exp(-rates.area(t));

  return run_blocks(n, seed, StreamPurpose::oracle_path, threads, [&](RandomStream& s) {
    double best = 0.0;
    for (double a = s.exponential(bound); a <= t; a += s.exponential(bound)) {
      const double rate = intensity(a);
      if (rate > bound * (1.0 + 1e-12)) throw std::runtime_error("mc_path_payoff: intensity above thinning bound");
      if (s.uniform() * bound >= rate) continue;
      const double value = ctx.offers.quantile(s.uniform());
      const double delay = ctx.withdrawal.quantile(s.uniform());
      if (mode == path_payoff::ListMode::changing && value >= ctx.list(a)) return std::exp(-rates.area(a)) * value;
      if (mode == path_payoff::ListMode::constant && value >= L0) return std::exp(-rates.area(a)) * value;
      if (value >= R && delay >= t - a) best = std::max(best, value);
    }
    return end_discount * best;
  });
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::low_power: return "low_power";
    case Verdict::reported: return "reported";
  }
  return "unknown";
}

Verdict judge(double analytic, const McEstimate& estimate, double sigmas, double power_fraction) {
  const double gap = std::abs(analytic - estimate.mean);
  const double band = sigmas * estimate.std_error;
  if (gap > band) return Verdict::fail;
  if (band > power_fraction * std::abs(analytic)) return Verdict::low_power;
  return Verdict::pass;
}

std::size_t ValidationReport::count(Verdict verdict) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const ValidationRow& r) { return r.verdict == verdict; }));
}

path_payoff::PathContext reference_path_context(const market_sim::SimulationConfig& config, double horizon) {
  auto path = stochastic::RatePath::mean_reverting(config.cir.theta, config.cir.kappa, config.cir.r0, horizon,
                                                   config.dt);
  return path_payoff::PathContext{std::move(path),
                                  0.0,
                                  market_sim::list_schedule(config.initial_reservation, config.initial_list,
                                                            config.zeta),
                                  path_payoff::OfferDistribution::uniform(config.p_min, config.p_max),
                                  path_payoff::WithdrawalDistribution::exponential(config.mu),
                                  config.initial_reservation,
                                  config.demand};
}

ValidationReport validate_all(const ValidationOptions& options) {
  if (!(options.sigmas > 0.0)) throw std::invalid_argument("validate_all: sigmas must be positive");
  if (!(options.lambda_perturbation > 0.0)) throw std::invalid_argument("validate_all: perturbation must be positive");
  ValidationReport report;
  const double pert = options.lambda_perturbation;
  const double R = options.policy.reservation;
  const double L = options.policy.list;
  auto judged = [&](std::string check, double analytic, const McEstimate& est) {
    report.rows.push_back(
        make_row(std::move(check), analytic, est, judge(analytic, est, options.sigmas, options.power_fraction)));
  };
  auto reported = [&](std::string check, double analytic, const McEstimate& est) {
    report.rows.push_back(make_row(std::move(check), analytic, est, Verdict::reported));
  };

  std::uint64_t index = 0;
  for (double T : kGridT) {
    for (double lambda : kGridLambda) {
      closed_form::MarketParams m = options.market;
      m.lambda = lambda;
      closed_form::MarketParams shifted = m;
      shifted.lambda = lambda * pert;
      const auto aux = mc_auxiliary_payoff(T, m, options.n,
                                           derive_seed(options.seed, StreamPurpose::oracle_auxiliary, index),
                                           options.threads);
      judged(label("auxiliary", "T", T, "lambda", lambda), closed_form::auxiliary_payoff(T, shifted), aux);
      const auto thin = mc_listed_payoff(T, m, R, m.p_max, options.n,
                                         derive_seed(options.seed, StreamPurpose::oracle_listed, 2 * index),
                                         options.threads);
      judged(label("thinned", "T", T, "lambda", lambda), closed_form::thinned_payoff(T, shifted, R), thin);
      const auto listed = mc_listed_payoff(T, m, R, L, options.n,
                                           derive_seed(options.seed, StreamPurpose::oracle_listed, 2 * index + 1),
                                           options.threads);
      judged(label("listed_exact", "T", T, "lambda", lambda), closed_form::listed_payoff_exact(T, shifted, R, L),
             listed);
      reported(label("listed_printed", "T", T, "lambda", lambda), closed_form::listed_payoff(T, shifted, R, L),
               listed);
      ++index;
    }
  }

  using path_payoff::ListMode;
  using path_payoff::PayoffFormula;
  struct PathCheck {
    ListMode mode;
    const char* name;
  };
  const PathCheck checks[] = {{ListMode::changing, "path_changing"},
                              {ListMode::constant, "path_constant"},
                              {ListMode::none, "path_none"}};
  // The simulation defaults list at p_max, where a constant list never binds;
  // the second context lists below p_max so the above-list branch is exercised.
  auto low_list = options.simulation;
  low_list.initial_list = kLowListPrice;
  struct PathScenario {
    market_sim::SimulationConfig config;
    std::string suffix;
  };
  const PathScenario scenarios[] = {{options.simulation, ""}, {low_list, " L0=" + format_number(kLowListPrice)}};
  std::uint64_t path_index = 0;
  for (const auto& scenario : scenarios) {
    const auto ctx = reference_path_context(scenario.config);
    auto analytic_ctx = ctx;
    analytic_ctx.demand.k1 *= pert;
    analytic_ctx.demand.k2 *= pert;
    for (const auto& check : checks) {
      if (!scenario.suffix.empty() && check.mode == ListMode::none) continue;
      for (double t : kPathTimes) {
        const auto est = mc_path_payoff(ctx, t, check.mode, options.n,
                                        derive_seed(options.seed, StreamPurpose::oracle_path, path_index++),
                                        options.threads);
        const std::string base = label(check.name, "t", t, "", 0.0) + scenario.suffix;
        judged(base, path_payoff::conditional_payoff(analytic_ctx, t, check.mode, PayoffFormula::exact), est);
        if (check.mode != ListMode::none) {
          reported(base + " printed",
                   path_payoff::conditional_payoff(analytic_ctx, t, check.mode, PayoffFormula::printed), est);
        }
      }
    }
  }
  return report;
}

}  // namespace housim::oracle
