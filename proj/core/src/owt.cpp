#include "housim/owt.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "housim/parallel.hpp"

namespace housim::owt {
namespace {

class CountingObjective {
 public:
  explicit CountingObjective(const std::function<double(double)>& f) : f_(f) {}

  double operator()(double t) {
    const double v = f_(t);
    ++evaluations_;
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "objective returned non-finite value " << v << " at T=" << t;
      throw std::domain_error(msg.str());
    }
    return v;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const std::function<double(double)>& f_;
  std::size_t evaluations_ = 0;
};

int count_sign_changes(const std::vector<double>& values) {
  int changes = 0;
  int previous = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (previous != 0 && sign != previous) ++changes;
    previous = sign;
  }
  return changes;
}

}  // namespace

OwtResult optimal_waiting_time(const std::function<double(double)>& objective, double t_max, double tol) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

  CountingObjective f(objective);
  const std::size_t n = kCoarseGridPoints;
  const double h = t_max / static_cast<double>(n);
  std::vector<double> grid_values(n);
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    grid_values[i] = f(h * static_cast<double>(i + 1));
    if (grid_values[i] > grid_values[best]) best = i;
  }

  OwtResult result;
  result.slope_sign_changes = count_sign_changes(grid_values);

  if (best == n - 1) {
    result.t_star = t_max;
    result.utility_at_t_star = grid_values[best];
    result.boundary = Boundary::right;
    result.evaluations = f.evaluations();
    return result;
  }

  // Bracket (t_{k-1}, t_{k+1}); t_0 = 0 is never evaluated.
  constexpr double inv_phi = 0.61803398874989484820;
  double a = h * static_cast<double>(best);
  double b = h * static_cast<double>(best + 2);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    // Ties move left so a flat (e.g. fully discounted) objective converges to 0.
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }

  const double t_star = 0.5 * (a + b);
  const double value = f(t_star);
  if (value >= grid_values[best]) {
    result.t_star = t_star;
    result.utility_at_t_star = value;
  } else {
    result.t_star = h * static_cast<double>(best + 1);
    result.utility_at_t_star = grid_values[best];
  }
  if (result.t_star <= tol) result.boundary = Boundary::left;
  result.evaluations = f.evaluations();
  return result;
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  if (name == "lambda") return SweepParameter::lambda;
  if (name == "mu") return SweepParameter::mu;
  if (name == "r") return SweepParameter::r;
  if (name == "reservation" || name == "R") return SweepParameter::reservation;
  if (name == "list" || name == "L") return SweepParameter::list;
  if (name == "gamma") return SweepParameter::gamma;
  if (name == "p_min") return SweepParameter::p_min;
  if (name == "p_max") return SweepParameter::p_max;
  return std::nullopt;
}

std::string_view to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::lambda: return "lambda";
    case SweepParameter::mu: return "mu";
    case SweepParameter::r: return "r";
    case SweepParameter::reservation: return "reservation";
    case SweepParameter::list: return "list";
    case SweepParameter::gamma: return "gamma";
    case SweepParameter::p_min: return "p_min";
    case SweepParameter::p_max: return "p_max";
  }
  return "?";
}

std::vector<double> SweepAxis::grid() const {
  if (steps == 0) throw std::invalid_argument("sweep axis needs at least one step");
  if (steps == 1) {
    if (min != max) throw std::invalid_argument("single-step sweep axis requires min == max");
    return {min};
  }
  if (!(max > min)) throw std::invalid_argument("sweep axis grid must be strictly increasing");
  std::vector<double> g(steps);
  const double step = (max - min) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) g[i] = min + step * static_cast<double>(i);
  g.back() = max;
  return g;
}

namespace {

void apply(SweepParameter p, double v, closed_form::MarketParams& m, closed_form::SellerPolicy& s) {
  switch (p) {
    case SweepParameter::lambda: m.lambda = v; break;
    case SweepParameter::mu: m.mu = v; break;
    case SweepParameter::r: m.r = v; break;
    case SweepParameter::reservation: s.reservation = v; break;
    case SweepParameter::list: s.list = v; break;
    case SweepParameter::gamma: s.gamma = v; break;
    case SweepParameter::p_min: m.p_min = v; break;
    case SweepParameter::p_max: m.p_max = v; break;
  }
}

}  // namespace

Surface sweep_owt(const SweepSpec& spec) {
  Surface surface;
  surface.x = spec.x.grid();
  surface.y = spec.y.grid();
  const std::size_t nx = surface.x.size();
  surface.t_star.assign(nx * surface.y.size(), std::nullopt);

  parallel_for(surface.t_star.size(), spec.threads, [&](std::size_t cell) {
    closed_form::MarketParams market = spec.market;
    closed_form::SellerPolicy policy = spec.policy;
    apply(spec.y.parameter, surface.y[cell / nx], market, policy);
    apply(spec.x.parameter, surface.x[cell % nx], market, policy);
    try {
      market.validate();
      policy.validate(market);
    } catch (const std::invalid_argument&) {
      return;
    }
    auto objective = [&](double T) { return closed_form::expected_utility(T, market, policy, spec.formula); };
    surface.t_star[cell] = optimal_waiting_time(objective, spec.t_max, spec.tol).t_star;
  });
  return surface;
}

}  // namespace housim::owt
