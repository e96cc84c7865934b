#pragma once

// Expected discounted payoffs for a seller facing Poisson offer arrivals with
// exponential withdrawals, uniform offer values and a flat discount rate.

namespace housim::closed_form {

/// Static market environment.
struct MarketParams {
  double lambda = 5.0;  // offers per unit time
  double mu = 5.0;      // withdrawals per unit time
  double r = 0.1;       // continuously compounded rate
  double p_min = 100.0;
  double p_max = 200.0;

  /// Throws std::invalid_argument unless p_max > p_min > 0 and all rates are finite and >= 0.
  void validate() const;
};

struct SellerPolicy {
  double reservation = 140.0;  // R
  double list = 180.0;         // L (initial list price L0 in the simulator)
  double gamma = 0.1;          // impatience
  double zeta = 1.0;           // list decay rate, simulator only

  /// Throws unless p_min <= R <= L <= p_max and gamma >= 0.
  void validate(const MarketParams& market) const;
};

/// Defaults of the OWT analysis.
MarketParams default_market();
SellerPolicy default_policy();

/// Below this value of mu*T (or the expected surviving-offer count) the
/// closed forms switch to their series expansions.
inline constexpr double kSeriesThreshold = 1e-4;

enum class ListedFormula {
  printed,  // above-list discount taken as the unconditional MGF of beta
  exact,    // truncated expectation E[e^{-r beta} 1{beta <= T}]
};

/// Probability that an offer arriving uniformly on [0, T] has been withdrawn by T.
double withdrawal_fraction(double T, double mu);

/// Expected discounted payoff of selling at T to the best surviving offer.
double auxiliary_payoff(double T, const MarketParams& market);

/// No list price; offers below the private reservation price are ignored.
double thinned_payoff(double T, const MarketParams& market, double reservation);

/// Public list price L and private reservation R, printed form.
double listed_payoff(double T, const MarketParams& market, double reservation, double list);

/// Same model with the exact truncated discount of the above-list sale.
double listed_payoff_exact(double T, const MarketParams& market, double reservation, double list);

double listed_payoff(double T, const MarketParams& market, double reservation, double list,
                     ListedFormula formula);

/// Limit of listed_payoff as T grows without bound.
double asymptotic_listed_payoff(const MarketParams& market, double list);

/// e^{-gamma T} times the listed payoff.
double expected_utility(double T, const MarketParams& market, const SellerPolicy& policy,
                        ListedFormula formula = ListedFormula::printed);

namespace detail {
// Unvalidated payoff for offers uniform on [lo, hi] with hi >= lo; lambda == 0 gives 0.
double auxiliary(double T, double lambda, double mu, double lo, double hi, double r);
}  // namespace detail

}  // namespace housim::closed_form
