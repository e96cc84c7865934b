#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>

#include "housim/quadrature.hpp"
#include "housim/stats.hpp"
#include "housim/stochastic.hpp"

// Conditional expected discounted payoffs given a realized rate path, for
// offers arriving at the demand-driven intensity lambda(a) = k1/r(a) + k2/L(a).

namespace housim::path_payoff {

/// Offer value distribution on [lo, hi].
struct OfferDistribution {
  double lo = 0.0;
  double hi = 0.0;
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;
  std::function<double(double)> quantile;
  /// Optional closed form of the partial mean over [x, hi]; quadrature otherwise.
  std::function<double(double)> upper_partial_mean;

  static OfferDistribution uniform(double lo, double hi);

  /// Integral of s f(s) over [x, hi].
  double partial_mean_above(double x, std::size_t nodes = kDefaultQuadratureNodes) const;
};

/// Withdrawal delay distribution.
struct WithdrawalDistribution {
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;

  static WithdrawalDistribution exponential(double mu);
};

/// T -> L(T), non-increasing with L >= R.
using ListSchedule = std::function<double(double)>;

struct PathContext {
  stochastic::RatePath path;
  double origin = 0.0;  // posting time on the path
  ListSchedule list;
  OfferDistribution offers;
  WithdrawalDistribution withdrawal;
  double reservation = 0.0;
  stochastic::DemandParams demand;
  std::size_t nodes = kDefaultQuadratureNodes;

  double list0() const { return list(0.0); }
  double rate(double a) const { return path.at(origin + a); }
  double intensity(double a) const;
  double discount(double a) const { return std::exp(-path.integral(origin, origin + a)); }

  void validate() const;
};

enum class ListMode { changing, constant, none };

enum class PayoffFormula {
  printed,  // the above-list term uses lambda(a)/Lambda(t) as the density of beta
  exact,    // first-passage density of beta
};

double cumulative_intensity(const PathContext& ctx, double t);

/// P{offer below the list at its arrival | F_t, N(t) = n}. Throws if Lambda(t) == 0.
double phi(const PathContext& ctx, double t);

/// P{xi 1{R <= xi < L(A)} 1{tau >= t - A} > y | F_t, N(t) = n}.
double psi(const PathContext& ctx, double t, double y);

/// P{beta > t | F_t, N(t) = n} = phi(t)^n.
double beta_survival(const PathContext& ctx, double t, unsigned n);

double conditional_payoff_changing_list(const PathContext& ctx, double t,
                                        PayoffFormula formula = PayoffFormula::printed);
/// Uses the constant list L = ctx.list0().
double conditional_payoff_constant_list(const PathContext& ctx, double t,
                                        PayoffFormula formula = PayoffFormula::printed);
double conditional_payoff_no_list(const PathContext& ctx, double t);

double conditional_payoff(const PathContext& ctx, double t, ListMode mode, PayoffFormula formula);

/// Template for contexts built on independently simulated CIR paths.
struct PathModel {
  stochastic::CirParams cir;
  double dt = stochastic::kTradingDay;
  ListSchedule list;
  OfferDistribution offers;
  WithdrawalDistribution withdrawal;
  double reservation = 0.0;
  stochastic::DemandParams demand;
  std::size_t nodes = kDefaultQuadratureNodes;

  PathContext context_for(stochastic::RatePath path) const;
};

/// P(t) = E[P(t | F_t)] by Monte Carlo over n_paths CIR paths.
McEstimate expected_payoff(const PathModel& model, double t, ListMode mode, PayoffFormula formula,
                           std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

}  // namespace housim::path_payoff
