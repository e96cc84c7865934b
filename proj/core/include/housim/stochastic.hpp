#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "housim/quadrature.hpp"
#include "housim/rng.hpp"

namespace housim::stochastic {

/// dr = kappa (theta - r) dt + sigma sqrt(r) dW
struct CirParams {
  double kappa = 0.25;
  double theta = 0.1;
  double sigma = 0.08;
  double r0 = 0.09;

  void validate() const;
  /// E[r(t)] = theta + (r0 - theta) e^{-kappa t}
  double mean_at(double t) const;
};

inline constexpr double kTradingDay = 1.0 / 252.0;

// Short-rate realization on the grid t = 0, dt, 2dt, ... Between nodes the
// path is linear, so integral() is the trapezoid rule on the native grid.
class RatePath {
 public:
  RatePath(double dt, std::vector<double> values);

  static RatePath constant(double rate, double horizon, double dt = kTradingDay);
  /// Deterministic path theta + (r_start - theta) e^{-kappa t} sampled on the grid.
  static RatePath mean_reverting(double theta, double kappa, double r_start, double horizon,
                                 double dt = kTradingDay);

  double dt() const { return dt_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double horizon() const { return dt_ * static_cast<double>(values_.size() - 1); }
  double time_at(std::size_t i) const { return dt_ * static_cast<double>(i); }

  /// Linear interpolation; held flat beyond the last node.
  double at(double t) const;
  /// Integral of the interpolated path over [t0, t1], t0 <= t1.
  double integral(double t0, double t1) const;
  /// Smallest value over [t0, t1] (exact for the piecewise linear path).
  double min_over(double t0, double t1) const;

 private:
  double cumulative_at(double t) const;

  double dt_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

/// Full-truncation Euler scheme, floored at zero. Bit-reproducible per (seed, dt, horizon).
RatePath simulate_cir(const CirParams& params, double horizon, double dt, std::uint64_t seed);

/// lambda(r, L) = k1 / r + k2 / L
struct DemandParams {
  double k1 = 0.5;
  double k2 = 1000.0;

  void validate() const;
};

inline constexpr double kRateFloor = 1e-4;

/// Throws std::invalid_argument if r <= 0 or list <= 0.
double demand_intensity(double r, double list, const DemandParams& demand);
/// demand_intensity with r clamped below at kRateFloor.
double floored_demand_intensity(double r, double list, const DemandParams& demand);

/// A bound on floored_demand_intensity valid whenever r >= min_rate and list >= reservation.
double demand_bound(const DemandParams& demand, double min_rate, double reservation);

/// One buyer offer.
struct OfferEvent {
  double arrival = 0.0;           // A_i, relative to posting
  double value = 0.0;             // xi_i
  double withdrawal_delay = 0.0;  // tau_i
};

/// Non-homogeneous Poisson arrivals on [0, horizon] by thinning a homogeneous
/// process of rate intensity_bound. Throws std::runtime_error if the intensity
/// exceeds the bound at a proposed point.
std::vector<double> sample_nhpp(const std::function<double(double)>& intensity, double horizon,
                                double intensity_bound, RandomStream& stream);

/// Lambda(t) by composite Simpson on n_nodes points.
double cumulative_intensity(const std::function<double(double)>& intensity, double t,
                            std::size_t n_nodes = kDefaultQuadratureNodes);

double sample_offer_value(double p_min, double p_max, RandomStream& stream);
double sample_withdrawal(double mu, RandomStream& stream);

}  // namespace housim::stochastic
