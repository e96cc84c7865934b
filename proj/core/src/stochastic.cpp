#include "housim/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace housim::stochastic {

void CirParams::validate() const {
  if (!(kappa > 0.0) || !(theta > 0.0) || !(sigma >= 0.0) || !(r0 > 0.0) || !std::isfinite(kappa) ||
      !std::isfinite(theta) || !std::isfinite(sigma) || !std::isfinite(r0)) {
    throw std::invalid_argument("CIR parameters require kappa > 0, theta > 0, sigma >= 0, r0 > 0");
  }
}

double CirParams::mean_at(double t) const { return theta + (r0 - theta) * std::exp(-kappa * t); }

RatePath::RatePath(double dt, std::vector<double> values) : dt_(dt), values_(std::move(values)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw std::invalid_argument("RatePath: dt must be positive");
  if (values_.empty()) throw std::invalid_argument("RatePath: needs at least one value");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("RatePath: rates must be finite and >= 0");
  }
  cumulative_.resize(values_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + 0.5 * dt_ * (values_[i - 1] + values_[i]);
  }
}

RatePath RatePath::constant(double rate, double horizon, double dt) {
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  return RatePath(dt, std::vector<double>(steps + 1, rate));
}

RatePath RatePath::mean_reverting(double theta, double kappa, double r_start, double horizon, double dt) {
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  std::vector<double> v(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    v[i] = theta + (r_start - theta) * std::exp(-kappa * dt * static_cast<double>(i));
  }
  return RatePath(dt, std::move(v));
}

double RatePath::at(double t) const {
  if (t <= 0.0) return values_.front();
  const double pos = t / dt_;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values_.size()) return values_.back();
  const double frac = pos - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double RatePath::cumulative_at(double t) const {
  if (t <= 0.0) return values_.front() * t;
  const double pos = t / dt_;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values_.size()) {
    return cumulative_.back() + values_.back() * (t - horizon());
  }
  const double s = (pos - static_cast<double>(i)) * dt_;
  const double slope = (values_[i + 1] - values_[i]) / dt_;
  return cumulative_[i] + s * (values_[i] + 0.5 * slope * s);
}

double RatePath::integral(double t0, double t1) const { return cumulative_at(t1) - cumulative_at(t0); }

double RatePath::min_over(double t0, double t1) const {
  double m = std::min(at(t0), at(t1));
  const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(t0 / dt_)));
  for (std::size_t i = first; i < values_.size() && time_at(i) <= t1; ++i) m = std::min(m, values_[i]);
  return m;
}

RatePath simulate_cir(const CirParams& params, double horizon, double dt, std::uint64_t seed) {
  params.validate();
  if (!(dt > 0.0) || !(horizon >= dt)) throw std::invalid_argument("simulate_cir requires horizon >= dt > 0");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  RandomStream stream(seed, StreamPurpose::cir_path);
  std::vector<double> r(steps + 1);
  r[0] = params.r0;
  const double sqrt_dt = std::sqrt(dt);
  for (std::size_t n = 0; n < steps; ++n) {
    const double positive = std::max(r[n], 0.0);
    const double next = r[n] + params.kappa * (params.theta - positive) * dt +
                        params.sigma * std::sqrt(positive) * sqrt_dt * stream.normal();
    r[n + 1] = std::max(next, 0.0);
  }
  return RatePath(dt, std::move(r));
}

void DemandParams::validate() const {
  if (!(k1 >= 0.0) || !(k2 >= 0.0) || (k1 == 0.0 && k2 == 0.0)) {
    throw std::invalid_argument("demand constants must be >= 0 and not both zero");
  }
}

double demand_intensity(double r, double list, const DemandParams& demand) {
  if (!(r > 0.0)) throw std::invalid_argument("demand_intensity: rate must be positive");
  if (!(list > 0.0)) throw std::invalid_argument("demand_intensity: list price must be positive");
  return demand.k1 / r + demand.k2 / list;
}

double floored_demand_intensity(double r, double list, const DemandParams& demand) {
  return demand_intensity(std::max(r, kRateFloor), list, demand);
}

double demand_bound(const DemandParams& demand, double min_rate, double reservation) {
  return floored_demand_intensity(min_rate, reservation, demand);
}

std::vector<double> sample_nhpp(const std::function<double(double)>& intensity, double horizon,
                                double intensity_bound, RandomStream& stream) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("sample_nhpp: negative horizon");
  if (!(intensity_bound >= 0.0) || !std::isfinite(intensity_bound)) {
    throw std::invalid_argument("sample_nhpp: bound must be finite and >= 0");
  }
  std::vector<double> arrivals;
  if (intensity_bound == 0.0) return arrivals;
  double t = 0.0;
  while (true) {
    t += stream.exponential(intensity_bound);
    if (t > horizon) break;
    const double rate = intensity(t);
    if (rate > intensity_bound * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "sample_nhpp: intensity " << rate << " exceeds bound " << intensity_bound << " at t=" << t;
      throw std::runtime_error(msg.str());
    }
    if (stream.uniform() * intensity_bound < rate) arrivals.push_back(t);
  }
  return arrivals;
}

double cumulative_intensity(const std::function<double(double)>& intensity, double t, std::size_t n_nodes) {
  if (!(t >= 0.0)) throw std::invalid_argument("cumulative_intensity: t must be >= 0");
  return simpson(intensity, 0.0, t, n_nodes);
}

double sample_offer_value(double p_min, double p_max, RandomStream& stream) {
  return stream.uniform(p_min, p_max);
}

double sample_withdrawal(double mu, RandomStream& stream) { return stream.exponential(mu); }

}  // namespace housim::stochastic
