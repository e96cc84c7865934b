#include "housim/closed_form.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace housim::closed_form {
namespace {

void require_finite_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and non-negative, got " +
                                std::to_string(value));
  }
}

void require_time(double T) {
  if (!std::isfinite(T) || T < 0.0) throw std::invalid_argument("waiting time must be finite and >= 0");
}

// 1 - (1 - e^{-m}) / m, series near 0.
double excess_fraction(double m) {
  if (m < kSeriesThreshold) return m / 2.0 - m * m / 6.0 + m * m * m / 24.0 - m * m * m * m / 120.0;
  return 1.0 + std::expm1(-m) / m;
}

void check_ordering(const MarketParams& market, double reservation, double list) {
  if (!(market.p_min <= reservation && reservation <= list && list <= market.p_max)) {
    throw std::invalid_argument("prices must satisfy p_min <= R <= L <= p_max");
  }
}

}  // namespace

void MarketParams::validate() const {
  require_finite_nonnegative(lambda, "lambda");
  require_finite_nonnegative(mu, "mu");
  require_finite_nonnegative(r, "r");
  if (!std::isfinite(p_min) || !std::isfinite(p_max) || !(p_max > p_min && p_min > 0.0)) {
    throw std::invalid_argument("offer support must satisfy p_max > p_min > 0");
  }
}

void SellerPolicy::validate(const MarketParams& market) const {
  check_ordering(market, reservation, list);
  require_finite_nonnegative(gamma, "gamma");
  if (!std::isfinite(zeta) || zeta <= 0.0) throw std::invalid_argument("zeta must be positive");
}

MarketParams default_market() { return MarketParams{}; }
SellerPolicy default_policy() { return SellerPolicy{}; }

double withdrawal_fraction(double T, double mu) {
  if (!std::isfinite(T) || !std::isfinite(mu)) throw std::invalid_argument("withdrawal_fraction: non-finite input");
  if (T < 0.0 || mu < 0.0) throw std::invalid_argument("withdrawal_fraction: negative input");
  return excess_fraction(mu * T);
}

namespace detail {

double auxiliary(double T, double lambda, double mu, double lo, double hi, double r) {
  if (lambda == 0.0 || T == 0.0) return 0.0;
  // Surviving offers form a Poisson count with mean m; the expected best of
  // them (0 if none) collapses the printed double series to this form.
  const double survive = 1.0 - withdrawal_fraction(T, mu);
  const double m = lambda * T * survive;
  const double best = (hi - lo) * excess_fraction(m) - lo * std::expm1(-m);
  return std::exp(-r * T) * best;
}

}  // namespace detail

double auxiliary_payoff(double T, const MarketParams& market) {
  market.validate();
  require_time(T);
  return detail::auxiliary(T, market.lambda, market.mu, market.p_min, market.p_max, market.r);
}

double thinned_payoff(double T, const MarketParams& market, double reservation) {
  market.validate();
  require_time(T);
  if (!(market.p_min <= reservation && reservation <= market.p_max)) {
    throw std::invalid_argument("reservation price outside [p_min, p_max]");
  }
  const double thinned = market.lambda * (market.p_max - reservation) / (market.p_max - market.p_min);
  return detail::auxiliary(T, thinned, market.mu, reservation, market.p_max, market.r);
}

namespace {

double listed_impl(double T, const MarketParams& market, double reservation, double list, bool exact) {
  market.validate();
  require_time(T);
  check_ordering(market, reservation, list);
  const double width = market.p_max - market.p_min;
  const double x = (list - reservation) / width;
  const double y = (market.p_max - list) / width;
  const double above_rate = market.lambda * y;
  const double above_mean = (market.p_max + list) / 2.0;
  const double total = above_rate + market.r;

  double above = 0.0;
  if (above_rate > 0.0) {
    if (exact) {
      above = above_mean * above_rate * (-std::expm1(-total * T)) / total;
    } else {
      above = -std::expm1(-above_rate * T) * above_mean * above_rate / total;
    }
  }
  const double below = std::exp(-above_rate * T) *
                       detail::auxiliary(T, market.lambda * x, market.mu, reservation, list, market.r);
  return above + below;
}

}  // namespace

double listed_payoff(double T, const MarketParams& market, double reservation, double list) {
  return listed_impl(T, market, reservation, list, false);
}

double listed_payoff_exact(double T, const MarketParams& market, double reservation, double list) {
  return listed_impl(T, market, reservation, list, true);
}

double listed_payoff(double T, const MarketParams& market, double reservation, double list,
                     ListedFormula formula) {
  return listed_impl(T, market, reservation, list, formula == ListedFormula::exact);
}

double asymptotic_listed_payoff(const MarketParams& market, double list) {
  market.validate();
  if (list > market.p_max) throw std::invalid_argument("list price above p_max");
  const double y = (market.p_max - list) / (market.p_max - market.p_min);
  const double above_rate = market.lambda * y;
  if (above_rate == 0.0) return 0.0;
  return (market.p_max + list) / 2.0 * above_rate / (above_rate + market.r);
}

double expected_utility(double T, const MarketParams& market, const SellerPolicy& policy,
                        ListedFormula formula) {
  if (!std::isfinite(policy.gamma) || policy.gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  const double w = listed_payoff(T, market, policy.reservation, policy.list, formula);
  return std::exp(-policy.gamma * T) * w;
}

}  // namespace housim::closed_form
