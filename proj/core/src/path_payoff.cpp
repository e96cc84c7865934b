#include "housim/path_payoff.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "housim/parallel.hpp"

namespace housim::path_payoff {

OfferDistribution OfferDistribution::uniform(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("uniform offers need hi > lo");
  const double width = hi - lo;
  OfferDistribution d;
  d.lo = lo;
  d.hi = hi;
  d.cdf = [=](double x) { return std::clamp((x - lo) / width, 0.0, 1.0); };
  d.pdf = [=](double x) { return (x >= lo && x <= hi) ? 1.0 / width : 0.0; };
  d.quantile = [=](double u) { return lo + u * width; };
  d.upper_partial_mean = [=](double x) {
    const double a = std::clamp(x, lo, hi);
    return (hi * hi - a * a) / (2.0 * width);
  };
  return d;
}

double OfferDistribution::partial_mean_above(double x, std::size_t nodes) const {
  if (upper_partial_mean) return upper_partial_mean(x);
  const double a = std::clamp(x, lo, hi);
  return simpson([this](double s) { return s * pdf(s); }, a, hi, nodes);
}

WithdrawalDistribution WithdrawalDistribution::exponential(double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("withdrawal rate must be >= 0");
  WithdrawalDistribution d;
  d.cdf = [=](double s) { return s <= 0.0 ? 0.0 : -std::expm1(-mu * s); };
  d.quantile = [=](double u) {
    if (mu == 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-u) / mu;
  };
  return d;
}

double PathContext::intensity(double a) const {
  return stochastic::floored_demand_intensity(rate(a), list(a), demand);
}

void PathContext::validate() const {
  if (!list) throw std::invalid_argument("PathContext: missing list schedule");
  if (!offers.cdf || !offers.pdf || !(offers.hi > offers.lo)) throw std::invalid_argument("PathContext: bad offer distribution");
  if (!withdrawal.cdf) throw std::invalid_argument("PathContext: missing withdrawal distribution");
  if (!(reservation > 0.0)) throw std::invalid_argument("PathContext: reservation must be positive");
  if (list0() < reservation) throw std::invalid_argument("PathContext: L(0) must be >= R");
  if (nodes < 3 || nodes % 2 == 0) throw std::invalid_argument("PathContext: node count must be odd and >= 3");
  demand.validate();
}

namespace {

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("payoff time must be finite and >= 0");
}

// Integrates f over [0, top] panel by panel, splitting at every cut inside the range.
template <class F>
double integrate_with_cuts(F&& f, double top, std::vector<double> cuts, std::size_t nodes) {
  cuts.push_back(0.0);
  cuts.push_back(top);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  double prev = 0.0;
  for (double c : cuts) {
    if (c <= prev || c > top) continue;
    total += simpson(f, prev, c, nodes);
    prev = c;
  }
  return total;
}

// Sup of {a in [0, t] : L(a) > y} for non-increasing L with L(0) > y.
double list_crossing(const ListSchedule& list, double t, double y) {
  if (list(t) > y) return t;
  double lo = 0.0;
  double hi = t;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, t); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (list(mid) > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double survival_weight(const PathContext& ctx, double t, double a) {
  return 1.0 - ctx.withdrawal.cdf(t - a);
}

double phi_numerator(const PathContext& ctx, double t) {
  return simpson([&](double a) { return ctx.intensity(a) * ctx.offers.cdf(ctx.list(a)); }, 0.0, t, ctx.nodes);
}

// Lambda(t) * psi(t, y)
double psi_numerator(const PathContext& ctx, double t, double y) {
  if (y >= ctx.list0()) return 0.0;
  const auto& F = ctx.offers.cdf;
  if (y <= ctx.reservation) {
    const double FR = F(ctx.reservation);
    return simpson([&](double a) { return ctx.intensity(a) * survival_weight(ctx, t, a) * (F(ctx.list(a)) - FR); },
                   0.0, t, ctx.nodes);
  }
  const double Fy = F(y);
  const double end = list_crossing(ctx.list, t, y);
  return simpson([&](double a) { return ctx.intensity(a) * survival_weight(ctx, t, a) * (F(ctx.list(a)) - Fy); },
                 0.0, end, ctx.nodes);
}

// Integral over a of lambda(a) * F_tau(t - a).
double withdrawn_mass(const PathContext& ctx, double t) {
  return simpson([&](double a) { return ctx.intensity(a) * ctx.withdrawal.cdf(t - a); }, 0.0, t, ctx.nodes);
}

// E[e^{-int r} xi 1{beta <= t}] with beta the first above-list arrival.
double above_list_exact(const PathContext& ctx, double t, const ListSchedule& list) {
  const auto& F = ctx.offers.cdf;
  auto above_rate = [&](double s) { return ctx.intensity(s) * (1.0 - F(list(s))); };
  return simpson(
      [&](double a) {
        const double passed = simpson(above_rate, 0.0, a, ctx.nodes);
        return ctx.intensity(a) * std::exp(-passed) * ctx.discount(a) * ctx.offers.partial_mean_above(list(a), ctx.nodes);
      },
      0.0, t, ctx.nodes);
}

// Above-list term with beta spread as lambda(a)/Lambda(t), before the (1 - e^{Lambda(phi-1)}) factor.
double above_list_printed_integral(const PathContext& ctx, double t, const ListSchedule& list, double total) {
  const auto& F = ctx.offers.cdf;
  const double integral = simpson(
      [&](double a) {
        const double L = list(a);
        const double above = 1.0 - F(L);
        if (above <= 0.0) {
          // 0/0: conditional mean tends to the top of the support as L -> hi;
          // strictly above the support no offer can qualify.
          return L <= ctx.offers.hi ? ctx.intensity(a) * ctx.discount(a) * ctx.offers.hi : 0.0;
        }
        return ctx.intensity(a) * ctx.discount(a) * ctx.offers.partial_mean_above(L, ctx.nodes) / above;
      },
      0.0, t, ctx.nodes);
  return integral / total;
}

}  // namespace

double cumulative_intensity(const PathContext& ctx, double t) {
  require_time(t);
  return simpson([&](double a) { return ctx.intensity(a); }, 0.0, t, ctx.nodes);
}

double phi(const PathContext& ctx, double t) {
  const double total = cumulative_intensity(ctx, t);
  if (!(total > 0.0)) throw std::domain_error("phi: Lambda(t) is zero");
  return phi_numerator(ctx, t) / total;
}

double psi(const PathContext& ctx, double t, double y) {
  if (!(y >= 0.0)) throw std::invalid_argument("psi: y must be >= 0");
  const double total = cumulative_intensity(ctx, t);
  if (!(total > 0.0)) throw std::domain_error("psi: Lambda(t) is zero");
  return psi_numerator(ctx, t, y) / total;
}

double beta_survival(const PathContext& ctx, double t, unsigned n) {
  if (n == 0) return 1.0;
  return std::pow(phi(ctx, t), static_cast<double>(n));
}

double conditional_payoff_changing_list(const PathContext& ctx, double t, PayoffFormula formula) {
  require_time(t);
  if (t == 0.0) return 0.0;
  const double total = cumulative_intensity(ctx, t);
  if (total == 0.0) return 0.0;
  const double L0 = ctx.list0();
  const double no_crossing = std::exp(phi_numerator(ctx, t) - total);  // e^{Lambda (phi - 1)}

  const std::vector<double> cuts{ctx.reservation, ctx.list(t), ctx.offers.lo, ctx.offers.hi};
  const double best_below = integrate_with_cuts(
      [&](double y) { return -std::expm1(-psi_numerator(ctx, t, y)); }, L0, cuts, ctx.nodes);
  const double below = ctx.discount(t) * no_crossing * best_below;

  double above = 0.0;
  if (formula == PayoffFormula::exact) {
    above = above_list_exact(ctx, t, ctx.list);
  } else {
    above = -std::expm1(phi_numerator(ctx, t) - total) * above_list_printed_integral(ctx, t, ctx.list, total);
  }
  return below + above;
}

double conditional_payoff_constant_list(const PathContext& ctx, double t, PayoffFormula formula) {
  require_time(t);
  if (t == 0.0) return 0.0;
  const double total = cumulative_intensity(ctx, t);
  if (total == 0.0) return 0.0;
  const double L = ctx.list0();
  const auto& F = ctx.offers.cdf;
  const double FL = F(L);
  const double surviving = total - withdrawn_mass(ctx, t);  // Lambda (1 - (1/Lambda) int lambda F_tau)

  auto scaled_psi = [&](double y) { return (F(std::max(L, y)) - F(std::max(ctx.reservation, y))) * surviving; };
  const std::vector<double> cuts{ctx.reservation, ctx.offers.lo, ctx.offers.hi};
  const double best_below =
      integrate_with_cuts([&](double y) { return -std::expm1(-scaled_psi(y)); }, L, cuts, ctx.nodes);
  const double below = ctx.discount(t) * std::exp(total * (FL - 1.0)) * best_below;

  const ListSchedule constant = [L](double) { return L; };
  double above = 0.0;
  if (formula == PayoffFormula::exact) {
    above = above_list_exact(ctx, t, constant);
  } else {
    above = -std::expm1(total * (FL - 1.0)) * above_list_printed_integral(ctx, t, constant, total);
  }
  return below + above;
}

double conditional_payoff_no_list(const PathContext& ctx, double t) {
  require_time(t);
  if (t == 0.0) return 0.0;
  const auto& F = ctx.offers.cdf;
  if (ctx.reservation >= ctx.offers.hi) return 0.0;
  const double total = cumulative_intensity(ctx, t);
  if (total == 0.0) return 0.0;
  const double surviving = total - withdrawn_mass(ctx, t);
  const std::vector<double> cuts{ctx.reservation, ctx.offers.lo};
  const double best = integrate_with_cuts(
      [&](double y) { return -std::expm1(-(1.0 - F(std::max(ctx.reservation, y))) * surviving); }, ctx.offers.hi,
      cuts, ctx.nodes);
  return ctx.discount(t) * best;
}

double conditional_payoff(const PathContext& ctx, double t, ListMode mode, PayoffFormula formula) {
  switch (mode) {
    case ListMode::changing: return conditional_payoff_changing_list(ctx, t, formula);
    case ListMode::constant: return conditional_payoff_constant_list(ctx, t, formula);
    case ListMode::none: return conditional_payoff_no_list(ctx, t);
  }
  throw std::invalid_argument("unknown list mode");
}

PathContext PathModel::context_for(stochastic::RatePath path) const {
  return PathContext{std::move(path), 0.0, list, offers, withdrawal, reservation, demand, nodes};
}

McEstimate expected_payoff(const PathModel& model, double t, ListMode mode, PayoffFormula formula,
                           std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  if (n_paths < 2) throw std::invalid_argument("expected_payoff needs n_paths >= 2");
  require_time(t);
  const double horizon = std::max(t, model.dt);
  std::vector<double> values(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    const std::uint64_t path_seed = derive_seed(seed, StreamPurpose::path_payoff_mc, i);
    const PathContext ctx = model.context_for(stochastic::simulate_cir(model.cir, horizon, model.dt, path_seed));
    values[i] = conditional_payoff(ctx, t, mode, formula);
  });
  RunningStats stats;
  for (double v : values) stats.add(v);
  return stats.estimate();
}

}  // namespace housim::path_payoff
